#pragma once

#include "homotopy.hpp"
#include "pbw.hpp"
#include "text.hpp"

namespace hcdg {

using PureMemo = std::map<std::pair<uint64_t, uint32_t>, DiffOpF1>;

// Contraction of (D(F[1]), [[d_F,-]]) onto (Omega_F (x) D(B), d_F^U) for one model and
// connection triple, built by perturbing the symmetric-tensor contraction.
class Transfer {
public:
    Transfer(const ChartModel& m, const ConnectionData& cd)
        : m_(&m), name_(cd.name), g_(m, cd), sc_(g_), tr_(m), pb_(sc_, tr_), Q_(build_dF(m)) {}
    Transfer(const Transfer&) = delete;

    const ChartModel& model() const { return *m_; }
    const std::string& name() const { return name_; }
    const Names& names() const { return m_->names; }
    const Geometry& geometry() const { return g_; }
    const SymCalculus& sym() const { return sc_; }
    const Transversal& transversal() const { return tr_; }
    const PBW& pbw() const { return pb_; }
    const DiffOpF1& dF() const { return Q_; }

    std::string show(const DiffOpF1& d) const { return to_string(d, names()); }
    std::string show(const OmB& d) const { return to_string(d, names()); }

    // [[d_F, -]] through d(w P) = d_F(w) P + (-1)^|w| w [[d_F, P]]
    DiffOpF1 dA(const DiffOpF1& d) const {
        DiffOpF1 out;
        for (auto& [k, c] : d) {
            FormElement w(k.coef(), c);
            FormElement dw = apply(Q_, w, names());
            if (!dw.is_zero()) out += lmul_form(dw, DiffOpF1(WKey{k.y, k.T, Exp{}, 0}, Scalar(1)));
            const DiffOpF1& cp = memo(comm_, k, [&] {
                return commutator(Q_, DiffOpF1(pure_key(k), Scalar(1)), names());
            });
            if (!cp.is_zero()) out += lmul_form((popcount(k.S) & 1) ? -w : w, cp);
        }
        return out;
    }
    OmB dB(const OmB& t) const { return tr_.dFU(t, Q_); }

    OmB Phi0(const DiffOpF1& d) const { return pb_.pbw_bar(sc_.Phi(pb_.pbw_inv(d))); }
    DiffOpF1 Psi0(const OmB& t) const { return pb_.pbw(sc_.Psi(pb_.pbw_bar_inv(t))); }
    DiffOpF1 H0(const DiffOpF1& d) const {
        return omega_linear<DiffOpF1>(d, 1, [&](const WKey& k) -> const DiffOpF1& {
            return memo(h0_, k, [&] { return pb_.pbw(sc_.H(pb_.pbw_inv_pure(k))); });
        });
    }
    DiffOpF1 d0(const DiffOpF1& d) const { return pb_.pbw(sc_.D(pb_.pbw_inv(d))); }
    OmB dB0(const OmB& t) const { return pb_.pbw_bar(sc_.dSB(pb_.pbw_bar_inv(t))); }
    // Omega_F-linear of degree one
    DiffOpF1 Theta(const DiffOpF1& d) const {
        return omega_linear<DiffOpF1>(d, 1, [&](const WKey& k) -> const DiffOpF1& {
            return memo(theta_, k, [&] {
                DiffOpF1 p(pure_key(k), Scalar(1));
                return dA(p) - d0(p);
            });
        });
    }

    Contraction<DiffOpF1, OmB> base() const {
        Contraction<DiffOpF1, OmB> c;
        c.label = "pbw-conjugated symmetric contraction";
        c.phi = [this](const DiffOpF1& d) { return Phi0(d); };
        c.psi = [this](const OmB& t) { return Psi0(t); };
        c.h = [this](const DiffOpF1& d) { return H0(d); };
        c.dA = [this](const DiffOpF1& d) { return d0(d); };
        c.dB = [this](const OmB& t) { return dB0(t); };
        return c;
    }

    // the perturbed datum, series evaluated per element
    Contraction<DiffOpF1, OmB> perturbed(int cap = 64) const {
        auto dA_ = [this](const DiffOpF1& d) { return show(d); };
        auto dB_ = [this](const OmB& t) { return show(t); };
        return perturb<DiffOpF1, OmB>(base(), [this](const DiffOpF1& d) { return Theta(d); }, dA_, dB_, cap,
                                      [](const DiffOpF1& d) { return max_order(d); });
    }

    OmB phi_nat(const DiffOpF1& d) const { return tr_.reduce(pushforward(d)); }
    DiffOpF1 psi_nat(const OmB& t) const {
        return omega_linear<DiffOpF1>(t, 0, [&](const WKey& k) -> const DiffOpF1& {
            return memo(psi_, k, [&] { return flat_.psi(OmB(pure_key(k), Scalar(1))); });
        });
    }
    DiffOpF1 h_nat(const DiffOpF1& d) const {
        return omega_linear<DiffOpF1>(d, 1, [&](const WKey& k) -> const DiffOpF1& {
            return memo(hn_, k, [&] { return flat_.h(DiffOpF1(pure_key(k), Scalar(1))); });
        });
    }
    OmB phi_flat(const DiffOpF1& d) const { return flat_.phi(d); }
    OmB dB_flat(const OmB& t) const { return flat_.dB(t); }

    Contraction<DiffOpF1, OmB> natural() const {
        Contraction<DiffOpF1, OmB> c;
        c.label = "natural contraction";
        c.phi = [this](const DiffOpF1& d) { return phi_nat(d); };
        c.psi = [this](const OmB& t) { return psi_nat(t); };
        c.h = [this](const DiffOpF1& d) { return h_nat(d); };
        c.dA = [this](const DiffOpF1& d) { return dA(d); };
        c.dB = [this](const OmB& t) { return dB(t); };
        return c;
    }

    // perfect case: mu(w (x) J^beta) = w * (ordered composition of lifted letters)
    DiffOpF1 mu(const OmB& t) const {
        if (!m_->perfect) throw model_error("mu needs a perfect model");
        return omega_linear<DiffOpF1>(t, 0, [&](const WKey& k) -> const DiffOpF1& {
            return memo(mu_, k, [&] {
                DiffOpF1 acc = dop_one();
                int r = m_->r();
                for (int b = m_->nB() - 1; b >= 0; --b)
                    for (int s = 0; s < k.y[b]; ++s) acc = compose(hat_frame(g_, r + b), acc, names());
                return acc;
            });
        });
    }
    // action of a word on Omega_F through the lifted letters
    FormElement act_word(Exp beta, const FormElement& w) const {
        FormElement cur = w;
        int r = m_->r();
        for (int b = m_->nB() - 1; b >= 0; --b)
            for (int s = 0; s < beta[b]; ++s) cur = apply(hat_frame(g_, r + b), cur, names());
        return cur;
    }
    // J^beta o (R-combination of words)
    OmB word_times(Exp beta, const OmB& u) const {
        OmB cur = u;
        int r = m_->r();
        for (int b = m_->nB() - 1; b >= 0; --b)
            for (int s = 0; s < beta[b]; ++s) cur = tr_.lmul_frame(r + b, cur);
        return cur;
    }
    // Hopf product on Omega_F (x) U(B)
    OmB hopf_product(const OmB& x, const OmB& y) const {
        OmB out;
        int nb = m_->nB();
        for (auto& [kx, cx] : x) {
            FormElement xi(kx.coef(), cx);
            for (auto& [c, s1, s2] : coproduct_pure(Slot{kx.y, 0}, nb)) {
                for (auto& [ky, cy] : y) {
                    FormElement eta = act_word(s1.y, FormElement(ky.coef(), cy));
                    if (eta.is_zero()) continue;
                    OmB w = word_times(s2.y, omb_word(ky.y));
                    out += lmul_form(wedge(xi, eta) * c, w);
                }
            }
        }
        return out;
    }
    // slot product for the transversal star product
    OmB hopf_slot(const Slot& s, const OmB& y) const { return hopf_product(omb_word(s.y), y); }

private:
    template <class Out, class F>
    const Out& memo(std::map<std::pair<uint64_t, uint32_t>, Out>& store, const WKey& k, F&& make) const {
        auto id = pure_id(k);
        auto it = store.find(id);
        if (it != store.end()) return it->second;
        Out v = make();
        return store.emplace(id, std::move(v)).first->second;
    }

    const ChartModel* m_;
    std::string name_;
    Geometry g_;
    SymCalculus sc_;
    Transversal tr_;
    PBW pb_;
    DiffOpF1 Q_;
    Contraction<DiffOpF1, OmB> flat_ = perturbed();
    mutable PureMemo comm_, h0_, theta_, psi_, hn_, mu_;
};

} // namespace hcdg
