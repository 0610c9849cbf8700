#pragma once

#include "symtensor.hpp"
#include "transversal.hpp"

namespace hcdg {

// Symmetrisation maps Omega_F(S(F[1]+TM)) -> D(F[1]) and Omega_F(SB) -> Omega_F (x) D(B)
// built by the connection recursion, with inverses by symbol triangularity.
class PBW {
public:
    PBW(const SymCalculus& sc, const Transversal& tr) : sc_(&sc), tr_(&tr) {}

    const SymCalculus& sym() const { return *sc_; }
    const Names& names() const { return sc_->model().names; }

    // nabla_X Y on generators (pullback connection)
    SymT nabla_gen(const Gen& X, const Gen& Y) const {
        const Geometry& g = sc_->geometry();
        SymT out;
        if (X.odd) return out;
        if (Y.odd) {
            for (int b = 0; b < sc_->r(); ++b)
                out += lmul_poly(g.A(X.idx, b, Y.idx), pure_elem<SymT>(Exp{}, 1u << b));
        } else {
            for (int m = 0; m < sc_->n(); ++m)
                out += lmul_poly(g.T(X.idx, Y.idx, m), pure_elem<SymT>(Exp::unit(m), 0));
        }
        return out;
    }

    DiffOpF1 pbw(const SymT& t) const {
        return omega_linear<DiffOpF1>(t, 0, [&](const WKey& k) -> const DiffOpF1& { return pbw_pure(k); });
    }

    const DiffOpF1& pbw_pure(const WKey& k) const {
        auto id = pure_id(k);
        auto it = pbw_.find(id);
        if (it != pbw_.end()) return it->second;
        int n = sc_->n(), r = sc_->r();
        auto g = gens_of(k, n, r);
        DiffOpF1 out;
        if (g.empty()) {
            out = dop_one();
        } else {
            int passed_before = 0;
            for (size_t i = 0; i < g.size(); ++i) {
                // bring X_i to the front: sign from the odd generators before it
                int eps = g[i].odd ? passed_before : 0;
                std::vector<Gen> rest(g.begin(), g.end());
                rest.erase(rest.begin() + long(i));
                SymT mrest = gens_product<SymT>(rest, 0, rest.size());
                DiffOpF1 term = compose(sc_->gen_op(g[i]), pbw(mrest), names());
                // nabla_{X_i} of the remaining monomial, as a derivation
                SymT nab;
                int odd_passed = 0;
                for (size_t j = 0; j < rest.size(); ++j) {
                    SymT nj = nabla_gen(g[i], rest[j]);
                    if (!nj.is_zero()) {
                        SymT t = sym_mul(sym_mul(gens_product<SymT>(rest, 0, j), nj), gens_product<SymT>(rest, j + 1, rest.size()));
                        if ((g[i].odd ? odd_passed : 0) & 1) nab -= t;
                        else nab += t;
                    }
                    odd_passed += rest[j].odd ? 1 : 0;
                }
                term -= pbw(nab);
                // mrest was built as a signed pure element: account for its sign
                out.add_scaled(term, sign_scalar(eps));
                passed_before += g[i].odd ? 1 : 0;
            }
            out *= Scalar(1) / Scalar(int(g.size()));
            // the monomial in canonical order is +1 times the product of its generators
        }
        return pbw_.emplace(id, std::move(out)).first->second;
    }

    SymT pbw_inv(const DiffOpF1& d) const {
        return omega_linear<SymT>(d, 0, [&](const WKey& k) -> const SymT& { return pbw_inv_pure(k); });
    }

    const SymT& pbw_inv_pure(const WKey& k) const {
        auto id = pure_id(k);
        auto it = inv_.find(id);
        if (it != inv_.end()) return it->second;
        int n = sc_->n(), r = sc_->r();
        // symbol: d_x^y d_xi^T in generators
        SymT s = pure_elem<SymT>(Exp{}, 0);
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < k.y[i]; ++t) s = sym_mul(s, sc_->coordinate_fields()[i]);
        for (int a = 0; a < r; ++a)
            if (k.T >> a & 1) s = sym_mul(s, pure_elem<SymT>(Exp{}, 1u << a));
        DiffOpF1 rem = DiffOpF1(WKey{k.y, k.T, Exp{}, 0}, Scalar(1)) - pbw(s);
        if (max_order(rem) >= key_order(k)) throw std::logic_error("pbw_inv: symbol did not cancel");
        SymT out = s + pbw_inv(rem);
        return inv_.emplace(id, std::move(out)).first->second;
    }

    // transversal side
    OmB pbw_bar(const SymB& t) const {
        return omega_linear<OmB>(t, 0, [&](const WKey& k) -> const OmB& { return pbwb_pure(k); });
    }
    const OmB& pbwb_pure(const WKey& k) const {
        auto it = pbwb_.find(k.y.bits);
        if (it != pbwb_.end()) return it->second;
        int r = sc_->r(), nb = sc_->n() - r;
        const Geometry& g = sc_->geometry();
        std::vector<int> gs;
        for (int be = 0; be < nb; ++be)
            for (int t = 0; t < k.y[be]; ++t) gs.push_back(be);
        OmB out;
        if (gs.empty()) {
            out = omb_word(Exp{});
        } else {
            for (size_t i = 0; i < gs.size(); ++i) {
                Exp rest = k.y - Exp::unit(gs[i]);
                OmB term = tr_->lmul_frame(r + gs[i], pbwb_pure(WKey{rest, 0, Exp{}, 0}));
                SymB nab;
                for (int be = 0; be < nb; ++be) {
                    if (rest[be] == 0) continue;
                    Exp r2 = rest - Exp::unit(be);
                    for (int ga = 0; ga < nb; ++ga) {
                        const MultiPoly& G = g.G(r + gs[i], be, ga);
                        if (!G.is_zero()) nab += lmul_poly(G * Scalar(rest[be]), pure_elem<SymB>(r2.inc(ga), 0));
                    }
                }
                term -= pbw_bar(nab);
                out += term;
            }
            out *= Scalar(1) / Scalar(int(gs.size()));
        }
        return pbwb_.emplace(k.y.bits, std::move(out)).first->second;
    }

    SymB pbw_bar_inv(const OmB& d) const {
        SymB out;
        OmB cur = d;
        while (!cur.is_zero()) {
            int top = max_order(cur);
            OmB lead = order_part(cur, top);
            SymB s;
            for (auto& [k, c] : lead) s.add(k, c);
            out += s;
            cur -= pbw_bar(s);
            if (max_order(cur) >= top && !cur.is_zero()) throw std::logic_error("pbw_bar_inv: symbol did not cancel");
        }
        return out;
    }

private:
    const SymCalculus* sc_;
    const Transversal* tr_;
    mutable std::map<std::pair<uint64_t, uint32_t>, DiffOpF1> pbw_;
    mutable std::map<std::pair<uint64_t, uint32_t>, SymT> inv_;
    mutable std::map<uint64_t, OmB> pbwb_;
};

} // namespace hcdg
