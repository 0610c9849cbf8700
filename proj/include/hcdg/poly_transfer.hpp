#pragma once

#include "hochschild.hpp"

namespace hcdg {

// Apply slot maps f(j, slot) of parity par(j) to every term of p. Koszul signs
// are taken over the coefficient and the shifted input slots to the left.
template <class Pout, class Pin, class F, class Par>
Pout tensor_map(const Pin& p, F&& f, Par&& par) {
    using Op = typename slot_op_of<Pout>::type;
    Pout out;
    for (auto& [k, c] : p) {
        int a = k.arity();
        std::vector<const Op*> ptr(a);
        int passed = popcount(k.S), sgn = 0;
        bool zero = false;
        for (int j = 0; j < a && !zero; ++j) {
            ptr[j] = &f(j, k.slots[j]);
            zero = ptr[j]->is_zero();
            if (par(j, a) & 1) sgn += passed;
            passed += slot_degree(k.slots[j]);
        }
        if (zero) continue;
        tensor_accumulate(out, FormElement(k.coef(), Scalar(1)), ptr, (sgn & 1) ? -c : c);
    }
    return out;
}

// Coproduct of a single operator, written in the shifted arity-two normal form
// (D1 (x) D2 |-> (-1)^{|D2|} D1 s (x) D2 s).
template <class P>
P coproduct_op(const typename slot_op_of<P>::type& d, int n) {
    using Op = typename slot_op_of<P>::type;
    P out;
    for (auto& [k, c] : d) {
        FormElement w(k.coef(), c);
        for (auto& [cc, s1, s2] : coproduct_pure(Slot{k.y, k.T}, n)) {
            Op a = slot_as_op<Op>(s1), b = slot_as_op<Op>(s2);
            tensor_accumulate(out, w, std::vector<const Op*>{&a, &b}, (popcount(s2.T) & 1) ? -cc : cc);
        }
    }
    return out;
}

template <class L>
int poly_weight(const L& p) {
    int w = std::numeric_limits<int>::min();
    for (auto& [k, c] : p) w = std::max(w, pkey_order(k) - k.arity());
    return w;
}

// Tensor trick on the operator contraction, then perturbation by d_H.
class PolyTransfer {
public:
    explicit PolyTransfer(const Hochschild& h) : h_(&h), t_(&h.transfer()) {}
    PolyTransfer(const PolyTransfer&) = delete;

    const Hochschild& hochschild() const { return *h_; }
    std::string show(const PolyOpF1& p) const { return to_string(p, t_->names()); }
    std::string show(const PolyOpB& p) const { return to_string(p, t_->names()); }

    PolyOpB TPhi(const PolyOpF1& p) const {
        return tensor_map<PolyOpB>(p, [&](int, const Slot& s) -> const OmB& { return phi_slot(s); },
                                   [](int, int) { return 0; });
    }
    PolyOpF1 TPsi(const PolyOpB& p) const {
        return tensor_map<PolyOpF1>(p, [&](int, const Slot& s) -> const DiffOpF1& { return psi_slot(s); },
                                    [](int, int) { return 0; });
    }
    // sum_i (Psi Phi)^{(x) i-1} (x) H (x) id
    PolyOpF1 TH(const PolyOpF1& p) const {
        PolyOpF1 out;
        int amax = max_arity(p);
        for (int i = 0; i < amax; ++i) {
            out += tensor_map<PolyOpF1>(
                p.filter([i](const PKey& k) { return k.arity() > i; }),
                [&](int j, const Slot& s) -> const DiffOpF1& {
                    if (j < i) return pp_slot(s);
                    if (j == i) return h_slot(s);
                    return id_slot(s);
                },
                [i](int j, int) { return j == i ? 1 : 0; });
        }
        return out;
    }

    Contraction<PolyOpF1, PolyOpB> tensor_contraction() const {
        Contraction<PolyOpF1, PolyOpB> c;
        c.label = "tensor trick";
        c.phi = [this](const PolyOpF1& p) { return TPhi(p); };
        c.psi = [this](const PolyOpB& p) { return TPsi(p); };
        c.h = [this](const PolyOpF1& p) { return TH(p); };
        c.dA = [this](const PolyOpF1& p) { return h_->dF_poly(p); };
        c.dB = [this](const PolyOpB& p) { return h_->dFU_poly(p); };
        return c;
    }

    Contraction<PolyOpF1, PolyOpB> perturbed(int cap = 64) const {
        return perturb<PolyOpF1, PolyOpB>(
            tensor_contraction(), [this](const PolyOpF1& p) { return h_->dH(p); },
            [this](const PolyOpF1& p) { return show(p); }, [this](const PolyOpB& p) { return show(p); }, cap,
            [](const PolyOpF1& p) { return poly_weight(p); });
    }

    PolyOpB total_B(const PolyOpB& p) const { return h_->dFU_poly(p) + h_->dH(p); }
    PolyOpF1 total_F1(const PolyOpF1& p) const { return h_->dF_poly(p) + h_->dH(p); }

private:
    template <class Op, class F>
    const Op& cached(std::map<Slot, Op>& store, const Slot& s, F&& make) const {
        auto it = store.find(s);
        if (it != store.end()) return it->second;
        Op v = make();
        return store.emplace(s, std::move(v)).first->second;
    }
    const OmB& phi_slot(const Slot& s) const {
        return cached(phi_, s, [&] { return t_->phi_nat(slot_as_op<DiffOpF1>(s)); });
    }
    const DiffOpF1& psi_slot(const Slot& s) const {
        return cached(psi_, s, [&] { return t_->psi_nat(slot_as_op<OmB>(s)); });
    }
    const DiffOpF1& pp_slot(const Slot& s) const {
        return cached(pp_, s, [&] { return t_->psi_nat(phi_slot(s)); });
    }
    const DiffOpF1& h_slot(const Slot& s) const {
        return cached(h_s_, s, [&] { return t_->h_nat(slot_as_op<DiffOpF1>(s)); });
    }
    const DiffOpF1& id_slot(const Slot& s) const {
        return cached(id_, s, [&] { return slot_as_op<DiffOpF1>(s); });
    }

    const Hochschild* h_;
    const Transfer* t_;
    mutable std::map<Slot, OmB> phi_;
    mutable std::map<Slot, DiffOpF1> psi_, pp_, h_s_, id_;
};

} // namespace hcdg
