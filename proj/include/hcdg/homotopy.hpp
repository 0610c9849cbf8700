#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcdg {

struct termination_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct contract_violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class X>
using Endo = std::function<X(const X&)>;

// (phi, psi, h) between (A, dA) and (B, dB); phi: A -> B, psi: B -> A.
template <class A, class B>
struct Contraction {
    std::string label;
    std::function<B(const A&)> phi;
    std::function<A(const B&)> psi;
    Endo<A> h;
    Endo<A> dA;
    Endo<B> dB;
};

// x + s(x) + s(s(x)) + ... until a term vanishes.
template <class X, class Describe>
X neumann(const X& x, const Endo<X>& step, int cap, Describe&& describe, const std::function<int(const X&)>& weight = {}) {
    X total = x, cur = x;
    for (int k = 0;; ++k) {
        if (cur.is_zero()) return total;
        if (k >= cap)
            throw termination_error("perturbation series did not terminate within " + std::to_string(cap) +
                                    " steps on element " + describe(x));
        X nx = step(cur);
        if (weight && !nx.is_zero() && weight(nx) >= weight(cur))
            throw contract_violation("perturbation does not lower the filtration on element " + describe(cur));
        cur = std::move(nx);
        total += cur;
    }
}

template <class A, class B, class DescA, class DescB>
Contraction<A, B> perturb(const Contraction<A, B>& c, const Endo<A>& rho, DescA descA, DescB descB, int cap = 64,
                          std::function<int(const A&)> weight = {}) {
    Contraction<A, B> p;
    p.label = c.label + "+perturbed";
    Endo<A> rh = [c, rho](const A& x) { return rho(c.h(x)); };
    Endo<A> hr = [c, rho](const A& x) { return c.h(rho(x)); };
    p.phi = [c, rh, cap, descA, weight](const A& x) { return c.phi(neumann<A>(x, rh, cap, descA, weight)); };
    p.psi = [c, hr, cap, descB](const B& y) {
        A s = c.psi(y);
        return neumann<A>(s, hr, cap, [&](const A&) { return descB(y); });
    };
    p.h = [c, rh, cap, descA, weight](const A& x) { return c.h(neumann<A>(x, rh, cap, descA, weight)); };
    p.dA = [c, rho](const A& x) { return c.dA(x) + rho(x); };
    p.dB = [c, rho, rh, cap, descB](const B& y) {
        A s = rho(c.psi(y));
        return c.dB(y) + c.phi(neumann<A>(s, rh, cap, [&](const A&) { return descB(y); }));
    };
    return p;
}

struct Check {
    std::string identity;
    int sample = 0;
    bool pass = true;
    std::string detail;
};

// the five identities plus both chain-map conditions on the given samples
template <class A, class B, class DescA, class DescB>
std::vector<Check> verify_contraction(const Contraction<A, B>& c, const std::vector<A>& as, const std::vector<B>& bs,
                                      DescA descA, DescB descB) {
    std::vector<Check> out;
    auto rec = [&](const std::string& id, int i, bool ok, const std::string& what) {
        out.push_back(Check{id, i, ok, ok ? std::string() : what});
    };
    for (size_t i = 0; i < as.size(); ++i) {
        const A& x = as[i];
        A hx = c.h(x);
        A lhs = c.psi(c.phi(x)) - x;
        A rhs = c.dA(hx) + c.h(c.dA(x));
        rec("psi.phi-id=dh+hd", int(i), lhs == rhs, descA(x));
        rec("phi.h=0", int(i), c.phi(hx).is_zero(), descA(x));
        rec("h.h=0", int(i), c.h(hx).is_zero(), descA(x));
        rec("phi.d=d.phi", int(i), c.phi(c.dA(x)) == c.dB(c.phi(x)), descA(x));
    }
    for (size_t i = 0; i < bs.size(); ++i) {
        const B& y = bs[i];
        A py = c.psi(y);
        rec("phi.psi=id", int(i), c.phi(py) == y, descB(y));
        rec("h.psi=0", int(i), c.h(py).is_zero(), descB(y));
        rec("psi.d=d.psi", int(i), c.dA(py) == c.psi(c.dB(y)), descB(y));
    }
    return out;
}

inline bool all_pass(const std::vector<Check>& cs) {
    for (auto& c : cs)
        if (!c.pass) return false;
    return true;
}

} // namespace hcdg
