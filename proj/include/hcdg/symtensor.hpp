#pragma once

#include "operators.hpp"

namespace hcdg {

// Omega_F(S(F[1] + TM)) in generators: y = exponents of eh_k (horizontal lifts of the
// mixed frame, even), T = mask of iota_a (odd), coefficient in front.
struct SymTag {};
using SymT = Lin<WKey, SymTag>;
// Omega_F(SB): y = exponents of b_alpha.
struct SymBTag {};
using SymB = Lin<WKey, SymBTag>;

inline WKey pure_key(const WKey& k) { return WKey{k.y, k.T, Exp{}, 0}; }
inline std::pair<uint64_t, uint32_t> pure_id(const WKey& k) { return {k.y.bits, k.T}; }

template <class L>
L pure_elem(Exp y, uint32_t T) {
    return L(WKey{y, T, Exp{}, 0}, Scalar(1));
}

// Graded symmetric product over Omega_F (iota odd, eh even).
template <class L>
L sym_mul(const L& a, const L& b) {
    L r;
    for (auto& [ka, ca] : a)
        for (auto& [kb, cb] : b) {
            if ((ka.S & kb.S) || (ka.T & kb.T)) continue;
            int par = merge_parity(ka.S, kb.S) ^ merge_parity(ka.T, kb.T) ^ ((popcount(ka.T) * popcount(kb.S)) & 1);
            Scalar v = ca * cb;
            r.add(WKey{ka.y + kb.y, ka.T | kb.T, ka.x + kb.x, ka.S | kb.S}, par ? -v : v);
        }
    return r;
}

// Apply a map that is Omega_F-linear of degree deg, given its value on pure keys.
template <class Out, class In, class F>
Out omega_linear(const In& x, int deg, F&& pure_image) {
    Out out;
    for (auto& [k, c] : x) {
        const Out& img = pure_image(pure_key(k));
        if (img.is_zero()) continue;
        Scalar s = ((deg & 1) && (popcount(k.S) & 1)) ? -c : c;
        if (k.x.is_zero() && k.S == 0) out.add_scaled(img, s);
        else out += lmul_form(FormElement(k.coef(), s), img);
    }
    return out;
}

// Generator sequence of a pure key in canonical order: iotas (ascending) then eh's.
struct Gen {
    bool odd;  // iota
    int idx;
};
inline std::vector<Gen> gens_of(const WKey& k, int n, int r) {
    std::vector<Gen> g;
    for (int a = 0; a < r; ++a)
        if (k.T >> a & 1) g.push_back({true, a});
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < k.y[i]; ++t) g.push_back({false, i});
    return g;
}
template <class L>
L gen_elem(const Gen& g) {
    return g.odd ? pure_elem<L>(Exp{}, 1u << g.idx) : pure_elem<L>(Exp::unit(g.idx), 0);
}
template <class L>
L gens_product(const std::vector<Gen>& g, size_t from, size_t to) {
    Exp y;
    uint32_t T = 0;
    int sign = 0;
    for (size_t i = from; i < to; ++i) {
        if (g[i].odd) {
            sign ^= merge_parity(T, 1u << g[i].idx);
            T |= 1u << g[i].idx;
        } else {
            y = y.inc(g[i].idx);
        }
    }
    return L(WKey{y, T, Exp{}, 0}, sign_scalar(sign));
}

// Extend a generator map as a graded derivation of degree deg on pure monomials.
template <class L, class F>
L derivation_on_pure(const WKey& k, int n, int r, int deg, F&& on_gen) {
    auto g = gens_of(k, n, r);
    L out;
    int passed = 0;
    for (size_t i = 0; i < g.size(); ++i) {
        L img = on_gen(g[i]);
        if (!img.is_zero()) {
            L t = sym_mul(sym_mul(gens_product<L>(g, 0, i), img), gens_product<L>(g, i + 1, g.size()));
            if ((deg * passed) & 1) out -= t;
            else out += t;
        }
        passed += g[i].odd ? 1 : 0;
    }
    return out;
}

inline SymT sym_from_form(const FormElement& w) {
    SymT s;
    for (auto& [k, c] : w) s.add(WKey{Exp{}, 0, k.x, k.S}, c);
    return s;
}

class SymCalculus {
public:
    SymCalculus(const Geometry& g) : g_(g), Q_(build_dF(g.model())) {
        const ChartModel& m = g.model();
        int n = m.n(), r = m.r();
        // coordinate fields d/dx_i of F[1] in generators
        for (int i = 0; i < n; ++i) {
            SymT s;
            for (int k = 0; k < n; ++k) {
                if (m.N[i][k].is_zero()) continue;
                s += lmul_poly(m.N[i][k], pure_elem<SymT>(Exp::unit(k), 0));
                for (int b = 0; b < r; ++b)
                    for (int c = 0; c < r; ++c) {
                        MultiPoly f = m.N[i][k] * g.A(k, b, c);
                        if (f.is_zero()) continue;
                        s += lmul_form(form_from_poly(f, 1u << c), pure_elem<SymT>(Exp{}, 1u << b));
                    }
            }
            dx_.push_back(s);
        }
        for (int c = 0; c < r; ++c) {
            SymT s = pure_elem<SymT>(Exp::unit(c), 0);
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b) {
                    const MultiPoly& gt = g.conn().gt[b][a][c];
                    if (!gt.is_zero()) s += lmul_form(form_from_poly(gt, 1u << a), pure_elem<SymT>(Exp{}, 1u << b));
                }
            D_iota_.push_back(s);
        }
        for (int k = 0; k < n; ++k) {
            SymT s;
            for (int a = 0; a < r; ++a) {
                Sec ca = m.frame_coeffs(g.bas(sec_unit(r, a), m.E[k]));
                for (int l = 0; l < n; ++l)
                    if (!ca[l].is_zero()) s += lmul_form(form_from_poly(ca[l], 1u << a), pure_elem<SymT>(Exp::unit(l), 0));
            }
            for (int a = 0; a < r; ++a)
                for (int b = a + 1; b < r; ++b) {
                    Sec R = g.Rbas(sec_unit(r, a), sec_unit(r, b), m.E[k]);
                    for (int c = 0; c < r; ++c)
                        if (!R[c].is_zero())
                            s += lmul_form(form_from_poly(R[c], (1u << a) | (1u << b)), pure_elem<SymT>(Exp{}, 1u << c));
                }
            D_eh_.push_back(s);
        }
    }

    const Geometry& geometry() const { return g_; }
    const ChartModel& model() const { return g_.model(); }
    const DiffOpF1& dF() const { return Q_; }
    int n() const { return model().n(); }
    int r() const { return model().r(); }

    // a vector field on F[1] (order-one operator) in generators
    SymT decompose(const DiffOpF1& X) const {
        SymT out;
        for (auto& [k, c] : X) {
            int ord = key_order(k);
            if (ord != 1) throw std::invalid_argument("decompose: not a vector field");
            FormElement w(k.coef(), c);
            if (k.T) {
                int a = std::countr_zero(k.T);
                out += lmul_form(w, pure_elem<SymT>(Exp{}, 1u << a));
            } else {
                int i = 0;
                while (k.y[i] == 0) ++i;
                out += lmul_form(w, dx_[i]);
            }
        }
        return out;
    }
    DiffOpF1 gen_op(const Gen& g) const { return g.odd ? dop_dxi(g.idx) : hat_frame(g_, g.idx); }
    // a sum of single generators back to a vector field
    DiffOpF1 to_field(const SymT& s) const {
        DiffOpF1 out;
        for (auto& [k, c] : s) {
            auto gs = gens_of(k, n(), r());
            if (gs.size() != 1) throw std::invalid_argument("to_field: not linear in generators");
            out += lmul_form(FormElement(k.coef(), c), gen_op(gs[0]));
        }
        return out;
    }

    const SymT& D_gen(const Gen& g) const { return g.odd ? D_iota_[g.idx] : D_eh_[g.idx]; }

    const SymT& D_pure(const WKey& k) const {
        auto id = pure_id(k);
        auto it = Dm_.find(id);
        if (it != Dm_.end()) return it->second;
        SymT v = derivation_on_pure<SymT>(k, n(), r(), 1, [&](const Gen& g) { return D_gen(g); });
        return Dm_.emplace(id, std::move(v)).first->second;
    }
    SymT D(const SymT& t) const {
        SymT out;
        const Names& nm = model().names;
        for (auto& [k, c] : t) {
            FormElement w(k.coef(), c);
            FormElement dw = apply(Q_, w, nm);
            if (!dw.is_zero()) out += lmul_form(dw, pure_elem<SymT>(k.y, k.T));
            const SymT& dm = D_pure(k);
            if (dm.is_zero()) continue;
            out += lmul_form((popcount(k.S) & 1) ? -w : w, dm);
        }
        return out;
    }

    SymT delta(const SymT& t) const {
        return omega_linear<SymT>(t, 1, [&](const WKey& k) -> const SymT& {
            return memo(delta_, k, [&] {
                return derivation_on_pure<SymT>(k, n(), r(), 1, [&](const Gen& g) {
                    return g.odd ? pure_elem<SymT>(Exp::unit(g.idx), 0) : SymT{};
                });
            });
        });
    }

    SymB Phi(const SymT& t) const {
        SymB out;
        int rr = r();
        for (auto& [k, c] : t) {
            if (k.T) continue;
            bool ftype = false;
            for (int a = 0; a < rr; ++a) ftype |= k.y[a] != 0;
            if (ftype) continue;
            Exp b;
            for (int g = 0; g < n() - rr; ++g) b.set(g, k.y[rr + g]);
            out.add(WKey{b, 0, k.x, k.S}, c);
        }
        return out;
    }
    SymT Psi(const SymB& t) const {
        SymT out;
        for (auto& [k, c] : t) {
            Exp y;
            for (int g = 0; g < n() - r(); ++g) y.set(r() + g, k.y[g]);
            out.add(WKey{y, 0, k.x, k.S}, c);
        }
        return out;
    }
    SymT H(const SymT& t) const {
        return omega_linear<SymT>(t, 1, [&](const WKey& k) -> const SymT& {
            return memo(h_, k, [&] {
                int p = popcount(k.T), q = 0;
                for (int a = 0; a < r(); ++a) q += k.y[a];
                SymT out;
                if (p + q == 0) return out;
                Scalar pre = Scalar((p & 1) ? -1 : 1) / Scalar(p + q);
                for (int a = 0; a < r(); ++a) {
                    if (k.y[a] == 0 || (k.T >> a & 1)) continue;
                    SymT rest = pure_elem<SymT>(k.y - Exp::unit(a), 0);
                    SymT t1 = sym_mul(pure_elem<SymT>(Exp{}, k.T), pure_elem<SymT>(Exp{}, 1u << a));
                    out.add_scaled(sym_mul(t1, rest), -pre * Scalar(k.y[a]));
                }
                return out;
            });
        });
    }

    // Chevalley-Eilenberg differential of SB with the Bott connection
    SymB dSB(const SymB& t) const {
        SymB out;
        int rr = r(), nb = n() - r();
        const Names& nm = model().names;
        for (auto& [k, c] : t) {
            FormElement w(k.coef(), c);
            FormElement dw = apply(Q_, w, nm);
            for (auto& [fk, fc] : dw) out.add(WKey{k.y, 0, fk.x, fk.S}, fc);
            FormElement ws = (popcount(k.S) & 1) ? -w : w;
            for (int a = 0; a < rr; ++a) {
                FormElement wa = wedge(ws, form_xi(a));
                if (wa.is_zero()) continue;
                for (int ga = 0; ga < nb; ++ga) {
                    if (k.y[ga] == 0) continue;
                    Exp rest = k.y - Exp::unit(ga);
                    for (int de = 0; de < nb; ++de) {
                        const MultiPoly& G = g_.G(a, ga, de);
                        if (G.is_zero()) continue;
                        SymB term = lmul_poly(G * Scalar(k.y[ga]), pure_elem<SymB>(rest.inc(de), 0));
                        out += lmul_form(wa, term);
                    }
                }
            }
        }
        return out;
    }

    const std::vector<SymT>& coordinate_fields() const { return dx_; }

private:
    template <class F>
    const SymT& memo(std::map<std::pair<uint64_t, uint32_t>, SymT>& store, const WKey& k, F&& make) const {
        auto id = pure_id(k);
        auto it = store.find(id);
        if (it != store.end()) return it->second;
        SymT v = make();
        return store.emplace(id, std::move(v)).first->second;
    }

    Geometry g_;
    DiffOpF1 Q_;
    std::vector<SymT> dx_, D_iota_, D_eh_;
    mutable std::map<std::pair<uint64_t, uint32_t>, SymT> Dm_, delta_, h_;
};

} // namespace hcdg
