#pragma once

#include "transfer.hpp"

#include <numeric>

namespace hcdg {

// Polyvector fields on F[1]: coefficient xi^S x^x times iota^y (even after the shift)
// wedge eh^T (odd after the shift), iotas first.
struct PVF1Tag {};
using PolyVecF1 = Lin<WKey, PVF1Tag>;
// Omega_F (x) Gamma(wedge B): T = mask of b letters.
struct PVBTag {};
using PolyVecB = Lin<WKey, PVBTag>;

template <>
inline void detail::symbol_factors<PVF1Tag>(std::vector<std::string>& f, const WKey& k, const Names& nm) {
    for (int a = 0; a < nm.r; ++a) detail::push_pow(f, nm.iota(a), k.y[a]);
    std::vector<std::string> e;
    for (int i = 0; i < nm.n(); ++i)
        if (k.T >> i & 1) e.push_back(nm.eh(i));
    detail::push_chain(f, e);
}
template <>
inline void detail::symbol_factors<PVBTag>(std::vector<std::string>& f, const WKey& k, const Names& nm) {
    std::vector<std::string> e;
    for (int b = 0; b < nm.nB(); ++b)
        if (k.T >> b & 1) e.push_back(nm.b(b));
    detail::push_chain(f, e);
}

// wedge over Omega_F; same sign rule as the symmetric product with T odd
template <class L>
L pv_wedge(const L& a, const L& b) {
    return sym_mul(a, b);
}

inline PolyVecF1 parse_polyvec(const std::string& s, const Names& nm) {
    PolyVecF1 out;
    for (auto& t : parse_terms(s, nm)) {
        PolyVecF1 acc(WKey{}, t.coef);
        for (auto& f : t.factors)
            for (int p = 0; p < f.power; ++p) {
                PolyVecF1 g;
                switch (f.kind) {
                case Tok::Coord: g = PolyVecF1(WKey{Exp{}, 0, Exp::unit(f.index), 0}, Scalar(1)); break;
                case Tok::Xi: g = PolyVecF1(WKey{Exp{}, 0, Exp{}, 1u << f.index}, Scalar(1)); break;
                case Tok::Iota: g = PolyVecF1(WKey{Exp::unit(f.index), 0, Exp{}, 0}, Scalar(1)); break;
                case Tok::EHat: g = PolyVecF1(WKey{Exp{}, 1u << f.index, Exp{}, 0}, Scalar(1)); break;
                default: throw parse_error("token not allowed in a polyvector field: '" + s + "'");
                }
                acc = pv_wedge(acc, g);
            }
        out += acc;
    }
    return out;
}
inline PolyVecB parse_polyvec_b(const std::string& s, const Names& nm) {
    PolyVecB out;
    for (auto& t : parse_terms(s, nm)) {
        PolyVecB acc(WKey{}, t.coef);
        for (auto& f : t.factors)
            for (int p = 0; p < f.power; ++p) {
                PolyVecB g;
                switch (f.kind) {
                case Tok::Coord: g = PolyVecB(WKey{Exp{}, 0, Exp::unit(f.index), 0}, Scalar(1)); break;
                case Tok::Xi: g = PolyVecB(WKey{Exp{}, 0, Exp{}, 1u << f.index}, Scalar(1)); break;
                case Tok::B: g = PolyVecB(WKey{Exp{}, 1u << f.index, Exp{}, 0}, Scalar(1)); break;
                default: throw parse_error("token not allowed in a transversal polyvector: '" + s + "'");
                }
                acc = pv_wedge(acc, g);
            }
        out += acc;
    }
    return out;
}

// Polydifferential calculus for one Transfer (model + connection).
class Hochschild {
public:
    explicit Hochschild(const Transfer& t) : t_(&t) {}

    const Transfer& transfer() const { return *t_; }
    const Names& names() const { return t_->names(); }
    int n() const { return t_->model().n(); }

    // [[d_F, -]] extended to tensors over Omega_F
    PolyOpF1 dF_poly(const PolyOpF1& p) const {
        PolyOpF1 out;
        const Names& nm = names();
        for (auto& [k, c] : p) {
            FormElement dw = apply(t_->dF(), FormElement(k.coef(), c), nm);
            for (auto& [fk, fc] : dw) out.add(PKey{fk.x, fk.S, k.slots}, fc);
        }
        int amax = max_arity(p);
        for (int i = 0; i < amax; ++i) out += tensor_map_slot(p, i, 1, [&](const DiffOpF1& d) { return t_->dA(d); });
        return out;
    }

    // d_F^U extended to Omega_F (x) D(B)^{(x) p}
    PolyOpB dFU_poly(const PolyOpB& p) const {
        PolyOpB out;
        const Names& nm = names();
        const Transversal& tr = t_->transversal();
        int r = t_->model().r();
        for (auto& [k, c] : p) {
            FormElement w(k.coef(), c);
            FormElement dw = apply(t_->dF(), w, nm);
            for (auto& [fk, fc] : dw) out.add(PKey{fk.x, fk.S, k.slots}, fc);
            FormElement ws = (popcount(k.S) & 1) ? -w : w;
            for (int a = 0; a < r; ++a) {
                FormElement wa = wedge(ws, form_xi(a));
                if (wa.is_zero()) continue;
                for (int i = 0; i < k.arity(); ++i) {
                    std::vector<OmB> slots;
                    for (auto& s : k.slots) slots.push_back(omb_word(s.y));
                    slots[i] = tr.lmul_word(a, k.slots[i].y);
                    if (slots[i].is_zero()) continue;
                    std::vector<const OmB*> ptr;
                    for (auto& s : slots) ptr.push_back(&s);
                    tensor_accumulate(out, wa, ptr, Scalar(1));
                }
            }
        }
        return out;
    }

    PolyOpF1 dH(const PolyOpF1& p) const { return hochschild_dH(p, n()); }
    PolyOpB dH(const PolyOpB& p) const { return hochschild_dH(p, t_->model().nB()); }

    PolyOpF1 bracket(const PolyOpF1& a, const PolyOpF1& b) const {
        return gerstenhaber(a, b, n(), compose_slot());
    }
    PolyOpF1 star_f1(const PolyOpF1& a, const PolyOpF1& b) const { return star(a, b, n(), compose_slot()); }
    PolyOpB bracket(const PolyOpB& a, const PolyOpB& b) const {
        return gerstenhaber(a, b, t_->model().nB(), hopf_slot());
    }
    PolyOpB star_b(const PolyOpB& a, const PolyOpB& b) const { return star(a, b, t_->model().nB(), hopf_slot()); }

    // HKR ------------------------------------------------------------------
    PolyOpF1 hkr(const PolyVecF1& v) const {
        PolyOpF1 out;
        int r = t_->model().r();
        for (auto& [k, c] : v) {
            // generators: iotas (even) then eh (odd)
            std::vector<std::pair<bool, int>> g;  // (odd, index)
            for (int a = 0; a < r; ++a)
                for (int s = 0; s < k.y[a]; ++s) g.push_back({false, a});
            for (int i = 0; i < n(); ++i)
                if (k.T >> i & 1) g.push_back({true, i});
            int p = int(g.size());
            std::vector<int> perm(p);
            std::iota(perm.begin(), perm.end(), 0);
            Scalar fact(1);
            for (int i = 2; i <= p; ++i) fact *= Scalar(i);
            FormElement front(k.coef(), c / fact);
            do {
                std::vector<int> degs;
                for (auto& x : g) degs.push_back(x.first ? 1 : 0);
                Scalar kap = koszul_sign(perm, degs);
                std::vector<DiffOpF1> slots;
                for (int q : perm) slots.push_back(g[q].first ? hat_frame(t_->geometry(), g[q].second) : dop_dxi(g[q].second));
                std::vector<const DiffOpF1*> ptr;
                for (auto& s : slots) ptr.push_back(&s);
                tensor_accumulate(out, front, ptr, kap);
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        return out;
    }

    PolyOpB hkr(const PolyVecB& v) const {
        PolyOpB out;
        int nb = t_->model().nB();
        for (auto& [k, c] : v) {
            std::vector<int> g;
            for (int b = 0; b < nb; ++b)
                if (k.T >> b & 1) g.push_back(b);
            int p = int(g.size());
            std::vector<int> perm(p);
            std::iota(perm.begin(), perm.end(), 0);
            Scalar fact(1);
            for (int i = 2; i <= p; ++i) fact *= Scalar(i);
            do {
                PKey key{k.x, k.S, {}};
                for (int q : perm) key.slots.push_back(Slot{Exp::unit(g[q]), 0});
                Scalar v2 = c / fact;
                out.add(std::move(key), perm_parity(perm) ? -v2 : v2);
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        return out;
    }

    // Lie derivative along d_F on polyvector fields
    PolyVecF1 LQ(const PolyVecF1& v) const {
        PolyVecF1 out;
        const Names& nm = names();
        int r = t_->model().r();
        for (auto& [k, c] : v) {
            FormElement w(k.coef(), c);
            FormElement dw = apply(t_->dF(), w, nm);
            for (auto& [fk, fc] : dw) out.add(WKey{k.y, k.T, fk.x, fk.S}, fc);
            // generators in canonical order
            std::vector<PolyVecF1> gens;
            std::vector<PolyVecF1> images;
            for (int a = 0; a < r; ++a)
                for (int s = 0; s < k.y[a]; ++s) {
                    gens.push_back(PolyVecF1(WKey{Exp::unit(a), 0, Exp{}, 0}, Scalar(1)));
                    images.push_back(lq_gen(false, a));
                }
            for (int i = 0; i < n(); ++i)
                if (k.T >> i & 1) {
                    gens.push_back(PolyVecF1(WKey{Exp{}, 1u << i, Exp{}, 0}, Scalar(1)));
                    images.push_back(lq_gen(true, i));
                }
            FormElement ws = (popcount(k.S) & 1) ? -w : w;
            int odd_before = 0;
            for (size_t i = 0; i < gens.size(); ++i) {
                PolyVecF1 pre(WKey{}, Scalar(1)), post(WKey{}, Scalar(1));
                for (size_t j = 0; j < i; ++j) pre = pv_wedge(pre, gens[j]);
                for (size_t j = i + 1; j < gens.size(); ++j) post = pv_wedge(post, gens[j]);
                PolyVecF1 t = pv_wedge(pv_wedge(pre, images[i]), post);
                t = lmul_form(ws, t);
                if (odd_before & 1) out -= t;
                else out += t;
                odd_before += gens[i].begin()->first.T ? 1 : 0;
            }
        }
        return out;
    }

    // Chevalley-Eilenberg differential of wedge B with the Bott connection
    PolyVecB dBott(const PolyVecB& v) const {
        PolyVecB out;
        const Names& nm = names();
        int r = t_->model().r(), nb = t_->model().nB();
        const Geometry& g = t_->geometry();
        for (auto& [k, c] : v) {
            FormElement w(k.coef(), c);
            FormElement dw = apply(t_->dF(), w, nm);
            for (auto& [fk, fc] : dw) out.add(WKey{k.y, k.T, fk.x, fk.S}, fc);
            FormElement ws = (popcount(k.S) & 1) ? -w : w;
            for (int a = 0; a < r; ++a) {
                FormElement wa = wedge(ws, form_xi(a));
                if (wa.is_zero()) continue;
                for (int be = 0; be < nb; ++be) {
                    if (!(k.T >> be & 1)) continue;
                    uint32_t rest = k.T & ~(1u << be);
                    int s0 = below_parity(k.T, be);
                    for (int ga = 0; ga < nb; ++ga) {
                        const MultiPoly& G = g.G(a, be, ga);
                        if (G.is_zero() || (rest >> ga & 1)) continue;
                        int s1 = below_parity(rest, ga);
                        PolyVecB term = lmul_poly(G, PolyVecB(WKey{Exp{}, rest | (1u << ga), Exp{}, 0}, sign_scalar(s0 ^ s1)));
                        out += lmul_form(wa, term);
                    }
                }
            }
        }
        return out;
    }

    SlotProduct<DiffOpF1> compose_slot() const {
        return [this](const Slot& s, const DiffOpF1& e) {
            return compose_key(WKey{s.y, s.T, Exp{}, 0}, Scalar(1), e, n(), t_->model().r());
        };
    }
    SlotProduct<OmB> hopf_slot() const {
        return [this](const Slot& s, const OmB& y) { return t_->hopf_slot(s, y); };
    }

private:
    PolyVecF1 lq_gen(bool eh, int idx) const {
        const SymCalculus& sc = t_->sym();
        Gen g{!eh, idx};
        const SymT& d = sc.D_gen(g);
        PolyVecF1 out;
        for (auto& [k, c] : d) {
            if (k.T) out.add(WKey{Exp::unit(std::countr_zero(k.T)), 0, k.x, k.S}, c);
            else {
                int i = 0;
                while (k.y[i] == 0) ++i;
                out.add(WKey{Exp{}, 1u << i, k.x, k.S}, c);
            }
        }
        return out;
    }

    const Transfer* t_;
};

} // namespace hcdg
