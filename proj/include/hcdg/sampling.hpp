#pragma once

#include "polyop.hpp"

#include <random>

namespace hcdg {

struct Rng {
    std::mt19937_64 g;
    explicit Rng(uint64_t seed = 7) : g(seed) {}
    int uni(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
    Scalar scalar(bool complex = false) {
        int num = uni(-3, 2);
        Scalar re(num >= 0 ? num + 1 : num, uni(1, 2));
        if (!complex) return re;
        return re + Scalar(uni(-2, 2)) * Scalar::imag_unit();
    }
    Exp exp(int n, int maxdeg) {
        Exp e;
        int d = uni(0, maxdeg);
        for (int t = 0; t < d; ++t) e = e.inc(uni(0, n - 1));
        return e;
    }
    uint32_t mask(int r) { return r ? uint32_t(uni(0, (1 << r) - 1)) : 0u; }
};

inline FormElement random_form(Rng& R, const Names& nm, int terms = 3, int deg = 2) {
    FormElement w;
    for (int t = 0; t < terms; ++t) w.add(FKey{R.exp(nm.n(), deg), R.mask(nm.r)}, R.scalar());
    return w;
}

// random element of a WKey space: coefficient degree <= deg, symbol degree <= ord
template <class L>
L random_wkey(Rng& R, const Names& nm, int terms, int deg, int ord, int ysize, int tbits) {
    L d;
    for (int t = 0; t < terms; ++t)
        d.add(WKey{R.exp(ysize, ord), R.mask(tbits), R.exp(nm.n(), deg), R.mask(nm.r)}, R.scalar());
    return d;
}

inline DiffOpF1 random_op(Rng& R, const Names& nm, int terms = 3, int deg = 2, int ord = 2) {
    DiffOpF1 d;
    for (int t = 0; t < terms; ++t) {
        uint32_t T = R.mask(nm.r);
        while (popcount(T) > ord) T &= T - 1;
        d.add(WKey{R.exp(nm.n(), ord - popcount(T)), T, R.exp(nm.n(), deg), R.mask(nm.r)}, R.scalar());
    }
    return d;
}

inline PolyOpF1 random_polyop(Rng& R, const Names& nm, int arity, int terms = 3, int deg = 1, int ord = 1) {
    PolyOpF1 p;
    for (int t = 0; t < terms; ++t) {
        PKey k{R.exp(nm.n(), deg), R.mask(nm.r), {}};
        for (int i = 0; i < arity; ++i) {
            uint32_t T = R.mask(nm.r);
            while (popcount(T) > ord) T &= T - 1;
            k.slots.push_back(Slot{R.exp(nm.n(), ord - popcount(T)), T});
        }
        p.add(std::move(k), R.scalar());
    }
    return p;
}

inline PolyOpB random_polyop_b(Rng& R, const ChartModel& m, int arity, int terms = 3, int deg = 1, int ord = 2) {
    PolyOpB p;
    for (int t = 0; t < terms; ++t) {
        PKey k{R.exp(m.n(), deg), R.mask(m.r()), {}};
        for (int i = 0; i < arity; ++i) k.slots.push_back(Slot{R.exp(m.nB(), ord), 0});
        p.add(std::move(k), R.scalar(m.complex));
    }
    return p;
}

inline std::vector<Exp> exps_upto(int vars, int deg) {
    std::vector<Exp> out{Exp{}};
    for (size_t i = 0; i < out.size(); ++i) {
        if (out[i].degree() == deg) continue;
        int lo = 0;
        for (int v = 0; v < vars; ++v)
            if (out[i][v]) lo = v;
        for (int v = lo; v < vars; ++v) out.push_back(out[i].inc(v));
    }
    return out;
}

// every monomial with coefficient degree <= deg and order (symbol degree plus odd symbols) <= ord
template <class L>
std::vector<L> monomial_basis(const Names& nm, int deg, int ord, int ysize, int tbits) {
    std::vector<L> out;
    auto coef = exps_upto(nm.n(), deg);
    auto sym = exps_upto(ysize, ord);
    for (auto& x : coef)
        for (uint32_t S = 0; S < (1u << nm.r); ++S)
            for (auto& y : sym)
                for (uint32_t T = 0; T < (1u << tbits); ++T)
                    if (y.degree() + popcount(T) <= ord) out.push_back(L(WKey{y, T, x, S}, Scalar(1)));
    return out;
}

} // namespace hcdg
