#pragma once

#include "lin.hpp"

#include <numeric>
#include <optional>

namespace hcdg {

struct PolyTag {};
struct FormTag {};

using MultiPoly = Lin<Exp, PolyTag>;

inline MultiPoly poly_const(const Scalar& c) { return MultiPoly(Exp{}, c); }
inline MultiPoly poly_var(int i) { return MultiPoly(Exp::unit(i), Scalar(1)); }

inline MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) r.add(ea + eb, ca * cb);
    return r;
}
inline MultiPoly& operator*=(MultiPoly& a, const MultiPoly& b) { return a = a * b; }

inline MultiPoly poly_mono(Exp e, const MultiPoly& p) {
    MultiPoly r;
    for (const auto& [ep, c] : p) r.add(e + ep, c);
    return r;
}

inline MultiPoly deriv(const MultiPoly& p, int i) {
    MultiPoly r;
    for (const auto& [e, c] : p) {
        int k = e[i];
        if (k == 0) continue;
        r.add(e - Exp::unit(i), c * Scalar(k));
    }
    return r;
}

inline int poly_degree(const MultiPoly& p) {
    int d = -1;
    for (const auto& [e, c] : p) d = std::max(d, e.degree());
    return d;
}

inline std::optional<Scalar> as_constant(const MultiPoly& p) {
    if (p.is_zero()) return Scalar(0);
    if (p.size() == 1 && p.begin()->first.is_zero()) return p.begin()->second;
    return std::nullopt;
}

inline Scalar eval_at_origin(const MultiPoly& p) { return p.coeff(Exp{}); }

inline MultiPoly poly_pow(const MultiPoly& p, int k) {
    MultiPoly r = poly_const(1);
    for (int i = 0; i < k; ++i) r = r * p;
    return r;
}

// A monomial x^e xi^S of Omega_F; S is a bitmask over the odd generators.
struct FKey {
    Exp x;
    uint32_t S = 0;
    auto operator<=>(const FKey&) const = default;
};

using FormElement = Lin<FKey, FormTag>;

inline FormElement form_from_poly(const MultiPoly& p, uint32_t S = 0) {
    FormElement f;
    for (const auto& [e, c] : p) f.add(FKey{e, S}, c);
    return f;
}
inline FormElement form_const(const Scalar& c) { return FormElement(FKey{}, c); }
inline FormElement form_xi(int a) { return FormElement(FKey{Exp{}, 1u << a}, Scalar(1)); }

inline FormElement wedge(const FormElement& a, const FormElement& b) {
    FormElement r;
    for (const auto& [ka, ca] : a)
        for (const auto& [kb, cb] : b) {
            if (ka.S & kb.S) continue;
            Scalar c = ca * cb;
            if (merge_parity(ka.S, kb.S)) c = -c;
            r.add(FKey{ka.x + kb.x, ka.S | kb.S}, c);
        }
    return r;
}

inline FormElement operator*(const FormElement& a, const FormElement& b) { return wedge(a, b); }

inline FormElement form_times_poly(const FormElement& a, const MultiPoly& p) {
    FormElement r;
    for (const auto& [k, c] : a)
        for (const auto& [e, cp] : p) r.add(FKey{k.x + e, k.S}, c * cp);
    return r;
}

// Homogeneous component of form degree d.
inline FormElement form_part(const FormElement& a, int d) {
    return a.filter([d](const FKey& k) { return popcount(k.S) == d; });
}

// -1 if not homogeneous
inline int form_degree(const FormElement& a) {
    int d = -1;
    for (const auto& [k, c] : a) {
        int dk = popcount(k.S);
        if (d >= 0 && d != dk) return -1;
        d = dk;
    }
    return d < 0 ? 0 : d;
}

// Partial derivative in an even coordinate, coefficientwise.
inline FormElement form_deriv_x(const FormElement& a, int i) {
    FormElement r;
    for (const auto& [k, c] : a) {
        int e = k.x[i];
        if (!e) continue;
        r.add(FKey{k.x - Exp::unit(i), k.S}, c * Scalar(e));
    }
    return r;
}

// Left derivative d/dxi^a.
inline FormElement form_deriv_xi(const FormElement& a, int i) {
    FormElement r;
    for (const auto& [k, c] : a) {
        if (!(k.S >> i & 1)) continue;
        Scalar v = below_parity(k.S, i) ? -c : c;
        r.add(FKey{k.x, k.S & ~(1u << i)}, v);
    }
    return r;
}

// Sign of the permutation sorting the sequence of homogeneous factors with the
// given degrees into order perm[0], perm[1], ... (Koszul rule).
inline Scalar koszul_sign(const std::vector<int>& perm, const std::vector<int>& degrees) {
    int n = int(perm.size());
    if (int(degrees.size()) != n) throw std::invalid_argument("koszul_sign: size mismatch");
    std::vector<bool> seen(n, false);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[p]) throw std::invalid_argument("koszul_sign: not a permutation");
        seen[p] = true;
    }
    int parity = 0;
    // result arrangement lists factor perm[0] first; count inversions of odd pairs
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (perm[i] > perm[j] && (degrees[perm[i]] & 1) && (degrees[perm[j]] & 1)) parity ^= 1;
    return sign_scalar(parity);
}

inline int perm_parity(const std::vector<int>& perm) {
    int parity = 0;
    for (size_t i = 0; i < perm.size(); ++i)
        for (size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) parity ^= 1;
    return parity;
}

// Key shared by operator-like objects: coefficient x^x xi^S, then a "symbol part"
// (y, T) whose meaning depends on the tag (derivatives, generators, ...).
struct WKey {
    Exp y;
    uint32_t T = 0;
    Exp x;
    uint32_t S = 0;
    auto operator<=>(const WKey&) const = default;
    FKey coef() const { return FKey{x, S}; }
};

} // namespace hcdg
