#pragma once

#include "operators.hpp"

namespace hcdg {

// Omega_F (x)_R D(B): coefficient xi^S x^x times the ordered transversal word
// j(b_1)^{y_1} o j(b_2)^{y_2} o ...  (T unused).
struct OmBTag {};
using OmB = Lin<WKey, OmBTag>;

inline OmB omb_word(Exp beta) { return OmB(WKey{beta, 0, Exp{}, 0}, Scalar(1)); }

// Reduction of D(M) onto D(B) = D(M)/D(M)Gamma(F), left multiplication by
// frame fields, and the F-module structure on D(B).
class Transversal {
public:
    explicit Transversal(const ChartModel& m) : m_(&m) {}

    const ChartModel& model() const { return *m_; }

    // e_k o (word beta), reduced; R-coefficients only.
    const OmB& lmul_word(int k, Exp beta) const {
        auto key = std::make_pair(k, beta.bits);
        auto it = lw_.find(key);
        if (it != lw_.end()) return it->second;
        OmB res = compute_lmul_word(k, beta);
        return lw_.emplace(key, std::move(res)).first->second;
    }

    OmB lmul_frame(int k, const OmB& t) const {
        OmB out;
        const VField& ek = m_->E[k];
        for (auto& [key, c] : t) {
            MultiPoly f(key.x, c);
            MultiPoly df = act(ek, f);
            for (auto& [e, cf] : df) out.add(WKey{key.y, 0, e, key.S}, cf);
            const OmB& w = lmul_word(k, key.y);
            out += lmul_form(FormElement(FKey{key.x, key.S}, c), w);
        }
        return out;
    }

    OmB lmul_field(const VField& v, const OmB& t) const {
        Sec c = m_->frame_coeffs(v);
        OmB out;
        for (int k = 0; k < m_->n(); ++k)
            if (!c[k].is_zero()) out += lmul_poly(c[k], lmul_frame(k, t));
        return out;
    }

    OmB lmul_dx(int i, const OmB& t) const {
        OmB out;
        for (int k = 0; k < m_->n(); ++k)
            if (!m_->N[i][k].is_zero()) out += lmul_poly(m_->N[i][k], lmul_frame(k, t));
        return out;
    }

    // class of d_x^alpha in D(B)
    const OmB& reduce_pure(Exp alpha) const {
        auto it = rp_.find(alpha.bits);
        if (it != rp_.end()) return it->second;
        OmB t = omb_word(Exp{});
        for (int i = m_->n() - 1; i >= 0; --i)
            for (int s = 0; s < alpha[i]; ++s) t = lmul_dx(i, t);
        return rp_.emplace(alpha.bits, std::move(t)).first->second;
    }

    OmB reduce(const DiffOpM& d) const {
        OmB out;
        for (auto& [k, c] : d) out += lmul_form(FormElement(FKey{k.x, k.S}, c), reduce_pure(k.y));
        return out;
    }

    // Chevalley-Eilenberg differential of the F-module D(B).
    OmB dFU(const OmB& t, const DiffOpF1& q) const {
        OmB out;
        const Names& nm = m_->names;
        for (auto& [key, c] : t) {
            FormElement w(FKey{key.x, key.S}, c);
            FormElement dw = apply(q, w, nm);
            for (auto& [fk, fc] : dw) out.add(WKey{key.y, 0, fk.x, fk.S}, fc);
            bool odd = popcount(key.S) & 1;
            for (int a = 0; a < m_->r(); ++a) {
                FormElement wa = wedge(w, form_xi(a));
                if (wa.is_zero()) continue;
                OmB term = lmul_form(wa, lmul_word(a, key.y));
                if (odd) out -= term;
                else out += term;
            }
        }
        return out;
    }

private:
    OmB compute_lmul_word(int k, Exp beta) const {
        int r = m_->r();
        if (beta.is_zero()) {
            if (k < r) return OmB{};
            return omb_word(Exp::unit(k - r));
        }
        int d = 0;
        while (beta[d] == 0) ++d;
        if (k >= r && k - r <= d) return omb_word(beta.inc(k - r));
        Exp rest = beta - Exp::unit(d);
        // e_k o j_d o rest = j_d o (e_k o rest) + [e_k, j_d] o rest
        OmB inner = lmul_word(k, rest);
        OmB out = lmul_frame(r + d, inner);
        for (int mm = 0; mm < m_->n(); ++mm) {
            const MultiPoly& c = m_->C[k][r + d][mm];
            if (c.is_zero()) continue;
            out += lmul_poly(c, lmul_word(mm, rest));
        }
        return out;
    }

    const ChartModel* m_;
    mutable std::map<std::pair<int, uint64_t>, OmB> lw_;
    mutable std::map<uint64_t, OmB> rp_;
};

} // namespace hcdg
