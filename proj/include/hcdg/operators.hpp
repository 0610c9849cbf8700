#pragma once

#include "chart.hpp"

#include <unordered_map>

namespace hcdg {

// Differential operators on F[1] in the normal form  xi^S x^x d_x^y d_xi^T
// (d_xi factors in increasing index order, applied right to left).
struct DOF1Tag {};
using DiffOpF1 = Lin<WKey, DOF1Tag>;
// Omega_F (x) D(M): T unused, y = exponent of d_x.
struct DOMTag {};
using DiffOpM = Lin<WKey, DOMTag>;

inline int key_degree(const WKey& k) { return popcount(k.S) - popcount(k.T); }
inline int key_order(const WKey& k) { return k.y.degree() + popcount(k.T); }

template <class L>
int max_order(const L& d) {
    int o = -1;
    for (auto& [k, c] : d) o = std::max(o, key_order(k));
    return o;
}
template <class L>
L order_part(const L& d, int o) {
    return d.filter([o](const WKey& k) { return key_order(k) == o; });
}
template <class L>
L degree_part(const L& d, int g) {
    return d.filter([g](const WKey& k) { return key_degree(k) == g; });
}
template <class L>
std::vector<int> degrees_of(const L& d) {
    std::vector<int> g;
    for (auto& [k, c] : d) g.push_back(key_degree(k));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

inline DiffOpF1 dop_form(const FormElement& w) {
    DiffOpF1 d;
    for (auto& [k, c] : w) d.add(WKey{Exp{}, 0, k.x, k.S}, c);
    return d;
}
inline DiffOpF1 dop_one() { return DiffOpF1(WKey{}, Scalar(1)); }
inline DiffOpF1 dop_dx(int i) { return DiffOpF1(WKey{Exp::unit(i), 0, Exp{}, 0}, Scalar(1)); }
inline DiffOpF1 dop_dxi(int a) { return DiffOpF1(WKey{Exp{}, 1u << a, Exp{}, 0}, Scalar(1)); }

// Left multiplication of the form coefficient: w * D.
template <class L>
L lmul_form(const FormElement& w, const L& d) {
    L r;
    for (auto& [kw, cw] : w)
        for (auto& [k, c] : d) {
            if (kw.S & k.S) continue;
            Scalar v = cw * c;
            if (merge_parity(kw.S, k.S)) v = -v;
            WKey n = k;
            n.x = k.x + kw.x;
            n.S = k.S | kw.S;
            r.add(std::move(n), v);
        }
    return r;
}
template <class L>
L lmul_poly(const MultiPoly& p, const L& d) {
    L r;
    for (auto& [e, ce] : p)
        for (auto& [k, c] : d) {
            WKey n = k;
            n.x = k.x + e;
            r.add(std::move(n), ce * c);
        }
    return r;
}
template <class L>
FormElement coef_of(const L& d, Exp y, uint32_t T) {
    FormElement f;
    for (auto& [k, c] : d)
        if (k.y == y && k.T == T) f.add(k.coef(), c);
    return f;
}

namespace detail {

inline void lmul_dx_term(DiffOpF1& out, int i, const WKey& k, const Scalar& c) {
    int e = k.x[i];
    if (e) {
        WKey a = k;
        a.x = k.x - Exp::unit(i);
        out.add(std::move(a), c * Scalar(e));
    }
    WKey b = k;
    b.y = k.y.inc(i);
    out.add(std::move(b), c);
}

inline void lmul_dxi_term(DiffOpF1& out, int a, const WKey& k, const Scalar& c) {
    if (k.S >> a & 1) {
        WKey n = k;
        n.S = k.S & ~(1u << a);
        out.add(std::move(n), below_parity(k.S, a) ? -c : c);
    }
    if (!(k.T >> a & 1)) {
        WKey n = k;
        n.T = k.T | (1u << a);
        int p = (popcount(k.S) + below_parity(k.T, a)) & 1;
        out.add(std::move(n), p ? -c : c);
    }
}

} // namespace detail

inline DiffOpF1 lmul_dx(int i, const DiffOpF1& d) {
    DiffOpF1 r;
    for (auto& [k, c] : d) detail::lmul_dx_term(r, i, k, c);
    return r;
}
inline DiffOpF1 lmul_dxi(int a, const DiffOpF1& d) {
    DiffOpF1 r;
    for (auto& [k, c] : d) detail::lmul_dxi_term(r, a, k, c);
    return r;
}

// D o E for a single normal-form monomial D = key.
inline DiffOpF1 compose_key(const WKey& k, const Scalar& c, const DiffOpF1& e, int n, int r) {
    DiffOpF1 cur = e;
    for (int a = r - 1; a >= 0; --a)
        if (k.T >> a & 1) cur = lmul_dxi(a, cur);
    for (int i = n - 1; i >= 0; --i)
        for (int t = 0; t < k.y[i]; ++t) cur = lmul_dx(i, cur);
    FormElement w(FKey{k.x, k.S}, c);
    return lmul_form(w, cur);
}

inline DiffOpF1 compose(const DiffOpF1& d, const DiffOpF1& e, const Names& nm) {
    DiffOpF1 r;
    for (auto& [k, c] : d) r += compose_key(k, c, e, nm.n(), nm.r);
    return r;
}

// Graded commutator, split into homogeneous parts.
inline DiffOpF1 commutator(const DiffOpF1& d, const DiffOpF1& e, const Names& nm) {
    DiffOpF1 r;
    for (int gd : degrees_of(d)) {
        DiffOpF1 dd = degree_part(d, gd);
        for (int ge : degrees_of(e)) {
            DiffOpF1 ee = degree_part(e, ge);
            r += compose(dd, ee, nm);
            DiffOpF1 back = compose(ee, dd, nm);
            if ((gd * ge) & 1) r += back;
            else r -= back;
        }
    }
    return r;
}

inline FormElement apply(const DiffOpF1& d, const FormElement& w, const Names& nm) {
    FormElement out;
    for (auto& [k, c] : d) {
        FormElement cur = w;
        for (int a = nm.r - 1; a >= 0; --a)
            if (k.T >> a & 1) cur = form_deriv_xi(cur, a);
        for (int i = 0; i < nm.n(); ++i)
            for (int t = 0; t < k.y[i]; ++t) cur = form_deriv_x(cur, i);
        if (cur.is_zero()) continue;
        out += wedge(FormElement(FKey{k.x, k.S}, c), cur);
    }
    return out;
}

// Vector fields on F[1] -------------------------------------------------------

inline DiffOpF1 vf_even(const VField& v) {
    DiffOpF1 d;
    for (size_t i = 0; i < v.size(); ++i)
        for (auto& [e, c] : v[i]) d.add(WKey{Exp::unit(int(i)), 0, e, 0}, c);
    return d;
}

// Homological vector field of the foliation.
inline DiffOpF1 build_dF(const ChartModel& m) {
    DiffOpF1 q;
    int r = m.r();
    for (int a = 0; a < r; ++a) q += lmul_form(form_xi(a), vf_even(m.U[a]));
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) {
            if (a == b) continue;
            for (int c = 0; c < r; ++c) {
                if (m.C[a][b][c].is_zero()) continue;
                FormElement w = form_from_poly(m.C[a][b][c] * Scalar(-1, 2));
                w = wedge(w, wedge(form_xi(a), form_xi(b)));
                q += lmul_form(w, dop_dxi(c));
            }
        }
    return q;
}

// Horizontal lift of the mixed-frame field e_k along the F-connection.
inline DiffOpF1 hat_frame(const Geometry& g, int k) {
    const ChartModel& m = g.model();
    DiffOpF1 d = vf_even(m.E[k]);
    for (int b = 0; b < m.r(); ++b)
        for (int c = 0; c < m.r(); ++c) {
            const MultiPoly& A = g.A(k, b, c);
            if (A.is_zero()) continue;
            d -= lmul_form(form_from_poly(A, 1u << c), dop_dxi(b));
        }
    return d;
}

inline DiffOpF1 hat_field(const Geometry& g, const VField& v) {
    const ChartModel& m = g.model();
    Sec c = m.frame_coeffs(v);
    DiffOpF1 d;
    for (int k = 0; k < m.n(); ++k)
        if (!c[k].is_zero()) d += lmul_poly(c[k], hat_frame(g, k));
    return d;
}

// Pushforward along F[1] -> M: keeps the d_xi-free part.
inline DiffOpM pushforward(const DiffOpF1& d) {
    DiffOpM r;
    for (auto& [k, c] : d)
        if (k.T == 0) r.add(k, c);
    return r;
}

// Coproduct -------------------------------------------------------------------

struct Slot {
    Exp y;
    uint32_t T = 0;
    auto operator<=>(const Slot&) const = default;
};

inline Scalar binom_exp(Exp a, Exp b, int n) {
    mpz_class acc = 1;
    for (int i = 0; i < n; ++i) {
        mpz_class bc;
        mpz_bin_uiui(bc.get_mpz_t(), a[i], b[i]);
        acc *= bc;
    }
    return Scalar(mpq_class(acc));
}

// Terms (coefficient, left slot, right slot) of the unshifted coproduct of the pure
// monomial d_x^y d_xi^T, with (B1 (x) B2)(a (x) b) = (-1)^{|B2||a|} B1(a) B2(b).
inline std::vector<std::tuple<Scalar, Slot, Slot>> coproduct_pure(const Slot& s, int n) {
    std::vector<std::tuple<Scalar, Slot, Slot>> out;
    std::vector<Exp> subs{Exp{}};
    for (int i = 0; i < n; ++i) {
        std::vector<Exp> nx;
        for (auto e : subs)
            for (int t = 0; t <= s.y[i]; ++t) nx.push_back(e.inc(i, t));
        subs = std::move(nx);
    }
    for (uint32_t T1 = s.T;; T1 = (T1 - 1) & s.T) {
        uint32_t T2 = s.T & ~T1;
        int sp = merge_parity(T1, T2);
        for (auto b : subs) {
            Scalar c = binom_exp(s.y, b, n);
            out.emplace_back(sp ? -c : c, Slot{b, T1}, Slot{s.y - b, T2});
        }
        if (T1 == 0) break;
    }
    return out;
}

} // namespace hcdg
