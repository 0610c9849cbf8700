#pragma once

#include "atiyah.hpp"
#include "cohomology.hpp"
#include "poly_transfer.hpp"
#include "sampling.hpp"

#include <memory>
#include <tuple>

namespace hcdg {

struct SuiteConfig {
    std::string model_path, suite = "all";
    uint64_t seed = 7;
    int poly_deg = 2, order = 3, arity = 3, samples = 32;
    WeightVec w_lo, w_hi;  // empty: per-complex defaults
    std::string weights_text;
};

const std::vector<std::string>& suite_names();

// Pass counts keyed by (suite, connection, identity); iteration order is the report order.
class Report {
public:
    using Key = std::tuple<std::string, std::string, std::string>;
    struct Tally {
        int samples = 0, failed = 0;
        std::string first_failure;
    };

    void check(const std::string& suite, const std::string& conn, const std::string& id, bool ok,
               const std::function<std::string()>& what = {}) {
        Tally& t = checks_[{suite, conn, id}];
        ++t.samples;
        if (ok) return;
        if (!t.failed++ && what) t.first_failure = what();
    }
    void merge(const std::string& suite, const std::string& conn, const std::string& prefix,
               const std::vector<Check>& cs) {
        for (auto& c : cs) check(suite, conn, prefix + c.identity, c.pass, [&] { return c.detail; });
    }
    // informational values that are not pass/fail
    void note(const std::string& suite, const std::string& conn, const std::string& id, const std::string& v) {
        notes_[{suite, conn, id}] = v;
    }
    bool pass() const {
        for (auto& [k, t] : checks_)
            if (t.failed) return false;
        return true;
    }
    // true iff the identity was checked at least once and never failed
    bool passed(const std::string& suite, const std::string& id_prefix) const {
        int seen = 0;
        for (auto& [k, t] : checks_) {
            if (std::get<0>(k) != suite || std::get<2>(k).rfind(id_prefix, 0) != 0) continue;
            if (t.failed) return false;
            seen += t.samples;
        }
        return seen > 0;
    }
    const std::map<Key, Tally>& checks() const { return checks_; }
    const std::map<Key, std::string>& notes() const { return notes_; }

private:
    std::map<Key, Tally> checks_;
    std::map<Key, std::string> notes_;
};

// FNV-1a over the tag, mixed with the user seed: one stream per check family.
inline uint64_t stream_seed(uint64_t seed, const std::string& tag) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : tag) h = (h ^ c) * 1099511628211ull;
    return h ^ (seed * 0x9e3779b97f4a7c15ull);
}

// The algebra stack for one connection.
struct Stack {
    const ChartModel* m;
    ConnectionData cd;
    std::unique_ptr<Transfer> t;
    std::unique_ptr<Hochschild> h;
    std::unique_ptr<PolyTransfer> pt;
    Stack(const ChartModel& model, ConnectionData c) : m(&model), cd(std::move(c)) {
        t = std::make_unique<Transfer>(*m, cd);
        h = std::make_unique<Hochschild>(*t);
        pt = std::make_unique<PolyTransfer>(*h);
    }
    const std::string& name() const { return cd.name; }
};

namespace suites {

inline std::string show_pair(const std::string& a, const std::string& b) { return a + " ; " + b; }

// sym --------------------------------------------------------------------------

inline void contraction_sym(const Stack& s, const SuiteConfig& cfg, Report& rep) {
    const std::string S = "contraction-sym";
    const ChartModel& m = *s.m;
    const Names& nm = m.names;
    const SymCalculus& sc = s.t->sym();
    Rng R(stream_seed(cfg.seed, S + s.name()));
    auto xs = monomial_basis<SymT>(nm, cfg.poly_deg, cfg.order, m.n(), m.r());
    for (int i = 0; i < cfg.samples; ++i)
        xs.push_back(random_wkey<SymT>(R, nm, 3, cfg.poly_deg, cfg.order, m.n(), m.r()));
    auto sh = [&](const SymT& x) { return to_string(x, nm); };
    for (auto& x : xs) {
        auto what = [&] { return sh(x); };
        SymT hx = sc.H(x), dx = sc.D(x), ex = sc.delta(x);
        SymT lhs = sc.Psi(sc.Phi(x)) - x;
        rep.check(S, s.name(), "D.D=0", sc.D(dx).is_zero(), what);
        rep.check(S, s.name(), "delta.delta=0", sc.delta(ex).is_zero(), what);
        rep.check(S, s.name(), "psi.phi-id=DH+HD", lhs == sc.D(hx) + sc.H(dx), what);
        rep.check(S, s.name(), "psi.phi-id=delta.H+H.delta", lhs == sc.delta(hx) + sc.H(ex), what);
        rep.check(S, s.name(), "h.h=0", sc.H(hx).is_zero(), what);
        rep.check(S, s.name(), "phi.h=0", sc.Phi(hx).is_zero(), what);
        rep.check(S, s.name(), "phi.D=dB.phi", sc.Phi(dx) == sc.dSB(sc.Phi(x)), what);
    }
    auto ys = monomial_basis<SymB>(nm, cfg.poly_deg, cfg.order, m.nB(), 0);
    for (int i = 0; i < cfg.samples; ++i) ys.push_back(random_wkey<SymB>(R, nm, 3, cfg.poly_deg, cfg.order, m.nB(), 0));
    for (auto& y : ys) {
        auto what = [&] { return to_string(y, nm); };
        SymT py = sc.Psi(y);
        rep.check(S, s.name(), "phi.psi=id", sc.Phi(py) == y, what);
        rep.check(S, s.name(), "h.psi=0", sc.H(py).is_zero(), what);
        rep.check(S, s.name(), "D.psi=psi.dB", sc.D(py) == sc.Psi(sc.dSB(y)), what);
    }
    for (int a = 0; a < m.r(); ++a) {
        Gen g{true, a};
        rep.check(S, s.name(), "D=[dF,-] on generators",
                  sc.decompose(commutator(sc.dF(), sc.gen_op(g), nm)) == sc.D_gen(g), [&] { return nm.xi(a); });
    }
    for (int k = 0; k < m.n(); ++k) {
        Gen g{false, k};
        rep.check(S, s.name(), "D=[dF,-] on generators",
                  sc.decompose(commutator(sc.dF(), sc.gen_op(g), nm)) == sc.D_gen(g),
                  [&] { return "e" + std::to_string(k + 1); });
    }
}

// operators --------------------------------------------------------------------

inline std::vector<DiffOpF1> op_samples(const ChartModel& m, const SuiteConfig& cfg, Rng& R, bool exhaustive) {
    std::vector<DiffOpF1> v;
    if (exhaustive) v = monomial_basis<DiffOpF1>(m.names, cfg.poly_deg, cfg.order, m.n(), m.r());
    for (int i = 0; i < cfg.samples; ++i) v.push_back(random_op(R, m.names, 3, cfg.poly_deg, cfg.order));
    return v;
}
inline std::vector<OmB> omb_samples(const ChartModel& m, const SuiteConfig& cfg, Rng& R, bool exhaustive) {
    std::vector<OmB> v;
    if (exhaustive) v = monomial_basis<OmB>(m.names, cfg.poly_deg, cfg.order, m.nB(), 0);
    for (int i = 0; i < cfg.samples; ++i)
        v.push_back(random_wkey<OmB>(R, m.names, 3, cfg.poly_deg, cfg.order, m.nB(), 0));
    return v;
}

inline void thm_2_1(const Stack& s, const SuiteConfig& cfg, Report& rep) {
    const std::string S = "thm-2.1";
    const ChartModel& m = *s.m;
    const Names& nm = m.names;
    const Transfer& tf = *s.t;
    auto sa = [&](const DiffOpF1& d) { return tf.show(d); };
    auto sb = [&](const OmB& d) { return tf.show(d); };
    Rng R(stream_seed(cfg.seed, S + s.name()));
    auto as = op_samples(m, cfg, R, true);
    auto bs = omb_samples(m, cfg, R, true);
    rep.merge(S, s.name(), "natural.", verify_contraction(tf.natural(), as, bs, sa, sb));
    int nb = m.nB();
    for (auto& d : as)
        rep.check(S, s.name(), "natural.coalgebra", coproduct_op<PolyOpB>(tf.phi_nat(d), nb) ==
                                                        s.pt->TPhi(coproduct_op<PolyOpF1>(d, m.n())),
                  [&] { return sa(d); });

    Rng Rr(stream_seed(cfg.seed, S + "/random" + s.name()));
    auto ar = op_samples(m, cfg, Rr, false);
    auto br = omb_samples(m, cfg, Rr, false);
    rep.merge(S, s.name(), "base.", verify_contraction(tf.base(), ar, br, sa, sb));
    for (auto& d : ar) {
        rep.check(S, s.name(), "perturbed.phi=phi-nat", tf.phi_flat(d) == tf.phi_nat(d), [&] { return sa(d); });
        DiffOpF1 th = tf.Theta(d);
        rep.check(S, s.name(), "theta.lowers-order", th.is_zero() || max_order(th) < max_order(d), [&] { return sa(d); });
    }
    for (auto& t : br) rep.check(S, s.name(), "perturbed.dB=dFU", tf.dB_flat(t) == tf.dB(t), [&] { return sb(t); });

    // pbw-bar = phi-nat . pbw . Psi on words of length <= 3
    for (auto& w : exps_upto(nb, 3)) {
        SymB t = lmul_form(random_form(Rr, nm, 2, 2), pure_elem<SymB>(w, 0));
        rep.check(S, s.name(), "pbw-bar=phi-nat.pbw.psi", tf.pbw().pbw_bar(t) == tf.phi_nat(tf.pbw().pbw(tf.sym().Psi(t))),
                  [&] { return to_string(t, nm); });
    }
    // pi_* pbw vanishes once an iota is present
    for (uint32_t T = 1; T < (1u << m.r()); ++T)
        for (auto& y : exps_upto(m.n(), 3 - popcount(T))) {
            if (popcount(T) > 3) continue;
            for (bool unit : {true, false}) {
                FormElement c = unit ? form_const(Scalar(1)) : random_form(Rr, nm, 2, 2);
                SymT e = lmul_form(c, pure_elem<SymT>(y, T));
                rep.check(S, s.name(), "projectability", pushforward(tf.pbw().pbw(e)).is_zero(),
                          [&] { return to_string(e, nm); });
            }
        }
}

inline void thm_2_2(const Stack& s, const SuiteConfig& cfg, Report& rep) {
    const std::string S = "thm-2.2";
    const ChartModel& m = *s.m;
    const Transfer& tf = *s.t;
    if (!m.perfect) {
        rep.note(S, s.name(), "skipped", "model is not perfect");
        return;
    }
    auto sb = [&](const OmB& d) { return tf.show(d); };
    Rng R(stream_seed(cfg.seed, S + s.name()));
    SuiteConfig c3 = cfg;
    c3.order = std::min(cfg.order, 3);
    for (auto& t : omb_samples(m, c3, R, true))
        rep.check(S, s.name(), "psi-nat=mu", tf.mu(t) == tf.psi_nat(t), [&] { return sb(t); });
    std::map<Slot, DiffOpF1> mu_slot;
    for (int i = 0; i < cfg.samples; ++i) {
        OmB a = random_wkey<OmB>(R, m.names, 3, cfg.poly_deg, c3.order, m.nB(), 0);
        OmB b = random_wkey<OmB>(R, m.names, 3, cfg.poly_deg, c3.order, m.nB(), 0);
        auto what = [&] { return show_pair(sb(a), sb(b)); };
        rep.check(S, s.name(), "mu.hopf-product", tf.mu(tf.hopf_product(a, b)) == compose(tf.mu(a), tf.mu(b), m.names), what);
        PolyOpF1 lhs = coproduct_op<PolyOpF1>(tf.mu(a), m.n());
        PolyOpF1 rhs = tensor_map<PolyOpF1>(
            coproduct_op<PolyOpB>(a, m.nB()),
            [&](int, const Slot& sl) -> const DiffOpF1& {
                auto it = mu_slot.find(sl);
                if (it == mu_slot.end()) it = mu_slot.emplace(sl, tf.mu(slot_as_op<OmB>(sl))).first;
                return it->second;
            },
            [](int, int) { return 0; });
        rep.check(S, s.name(), "mu.coproduct", lhs == rhs, [&] { return sb(a); });
        rep.check(S, s.name(), "H0.Theta.Psi0=0", tf.H0(tf.Theta(tf.Psi0(a))).is_zero() && tf.H0(tf.Theta(tf.Psi0(b))).is_zero(),
                  what);
    }
}

// polydifferential -------------------------------------------------------------

inline void thm_3_4(const Stack& s, const SuiteConfig& cfg, Report& rep) {
    const std::string S = "thm-3.4";
    const ChartModel& m = *s.m;
    const PolyTransfer& pt = *s.pt;
    auto sa = [&](const PolyOpF1& p) { return pt.show(p); };
    auto sb = [&](const PolyOpB& p) { return pt.show(p); };
    Rng R(stream_seed(cfg.seed, S + s.name()));
    int ord = std::min(cfg.order, 2), ar = std::max(cfg.arity, 1);
    std::vector<PolyOpF1> as;
    std::vector<PolyOpB> bs;
    for (int i = 0; i < cfg.samples; ++i) {
        as.push_back(random_polyop(R, m.names, 1 + i % ar, 2, 1, ord));
        bs.push_back(random_polyop_b(R, m, 1 + i % ar, 2, 1, ord));
    }
    auto c = pt.perturbed();
    rep.merge(S, s.name(), "tensor.", verify_contraction(pt.tensor_contraction(), as, bs, sa, sb));
    rep.merge(S, s.name(), "perturbed.", verify_contraction(c, as, bs, sa, sb));
    for (auto& a : as) {
        auto what = [&] { return sa(a); };
        rep.check(S, s.name(), "perturbed.phi=TPhi", c.phi(a) == pt.TPhi(a), what);
        rep.check(S, s.name(), "TPhi.chain-map", pt.TPhi(pt.total_F1(a)) == pt.total_B(pt.TPhi(a)), what);
    }
    for (auto& b : bs) rep.check(S, s.name(), "perturbed.dB=dFU+dH", c.dB(b) == pt.total_B(b), [&] { return sb(b); });
    for (int i = 0; i < cfg.samples; ++i) {
        PolyOpF1 p = random_polyop(R, m.names, 1 + i % 2, 2, 1, ord);
        PolyOpF1 q = random_polyop(R, m.names, 1 + (i / 2) % 2, 2, 1, ord);
        rep.check(S, s.name(), "TPhi.cup", pt.TPhi(cup(p, q)) == cup(pt.TPhi(p), pt.TPhi(q)),
                  [&] { return show_pair(sa(p), sa(q)); });
    }
}

inline void thm_3_5(const Stack& s, const SuiteConfig& cfg, Report& rep) {
    const std::string S = "thm-3.5";
    const ChartModel& m = *s.m;
    if (!m.perfect) {
        rep.note(S, s.name(), "skipped", "model is not perfect");
        return;
    }
    const PolyTransfer& pt = *s.pt;
    const Hochschild& hh = *s.h;
    Rng R(stream_seed(cfg.seed, S + s.name()));
    int ord = std::min(cfg.order, 2);
    for (int i = 0; i < cfg.samples; ++i) {
        PolyOpB a = random_polyop_b(R, m, 1 + i % 2, 2, 1, ord);
        PolyOpB b = random_polyop_b(R, m, 1 + (i / 2) % 2, 2, 1, ord);
        rep.check(S, s.name(), "psi-nat.bracket", pt.TPsi(hh.bracket(a, b)) == hh.bracket(pt.TPsi(a), pt.TPsi(b)),
                  [&] { return show_pair(pt.show(a), pt.show(b)); });
    }
}

// Gerstenhaber -----------------------------------------------------------------

inline PolyOpF1 homogeneous_part(const PolyOpF1& p) {
    if (p.is_zero()) return p;
    int d = pkey_degree(p.begin()->first);
    return p.filter([d](const PKey& k) { return pkey_degree(k) == d; });
}
inline int degree_of(const PolyOpF1& p) { return pkey_degree(p.begin()->first); }
// nonzero homogeneous sample; redraws on cancellation
inline PolyOpF1 draw_homogeneous(Rng& R, const Names& nm, int arity, int terms, int ord) {
    for (;;) {
        PolyOpF1 p = homogeneous_part(random_polyop(R, nm, arity, terms, 1, ord));
        if (!p.is_zero()) return p;
    }
}

// [P, Q u R] - [P,Q] u R - (-1)^{(|P|-1)|Q|} Q u [P,R]
inline PolyOpF1 leibniz_defect(const Hochschild& hh, const PolyOpF1& p, const PolyOpF1& q, const PolyOpF1& r) {
    PolyOpF1 rhs = cup(hh.bracket(p, q), r);
    PolyOpF1 t2 = cup(q, hh.bracket(p, r));
    if (((degree_of(p) - 1) * degree_of(q)) & 1) rhs -= t2;
    else rhs += t2;
    return hh.bracket(p, cup(q, r)) - rhs;
}

// Closed normalized cochains of arity <= 2 from the kernels of the weight pieces.
inline std::vector<PolyOpF1> closed_samples(const Stack& s, const WeightSystem& ws, const WeightVec& hi, int arity) {
    std::vector<PolyOpF1> out;
    Diff<PolyOpF1> d = [&](const PolyOpF1& p) { return s.pt->total_F1(p); };
    Shower<PolyOpF1> sh = [&](const PolyOpF1& p) { return s.pt->show(p); };
    for (auto& w : weight_window(ws.zero(), hi))
        for (auto& [deg, b] : poly_pieces<PolyOpF1>(ws, s.m->names, w, arity)) {
            Basis<PolyOpF1> tgt;
            for (size_t j = 0; j < b.size(); ++j)
                for (auto& [k, c] : d(b.element(int(j)))) tgt.push(k);
            for (auto& kv : rank_and_kernel(matrix_of_map(b, tgt, d, sh)).kernel) out.push_back(b.combine(kv));
        }
    return out;
}

inline void gerstenhaber(const Stack& s, const SuiteConfig& cfg, Report& rep) {
    const std::string S = "gerstenhaber";
    const ChartModel& m = *s.m;
    const Names& nm = m.names;
    const Hochschild& hh = *s.h;
    auto sh = [&](const PolyOpF1& p) { return to_string(p, nm); };
    Rng R(stream_seed(cfg.seed, S + s.name()));
    int nontrivial = 0;
    for (int t = 0; t < cfg.samples; ++t) {
        PolyOpF1 a = draw_homogeneous(R, nm, R.uni(0, 2), 2, 1);
        PolyOpF1 b = draw_homogeneous(R, nm, R.uni(0, 2), 2, 1);
        PolyOpF1 c = draw_homogeneous(R, nm, R.uni(0, 2), 2, 1);
        auto what = [&] { return sh(a) + " ; " + sh(b) + " ; " + sh(c); };
        int sg = ((degree_of(a) - 1) * (degree_of(b) - 1)) & 1;
        PolyOpF1 ab = hh.bracket(a, b), ba = hh.bracket(b, a);
        rep.check(S, s.name(), "antisymmetry", ab == (sg ? ba : -ba), what);
        PolyOpF1 lhs = hh.bracket(a, hh.bracket(b, c));
        PolyOpF1 rhs = hh.bracket(ab, c);
        PolyOpF1 t3 = hh.bracket(b, hh.bracket(a, c));
        if (sg) rhs -= t3;
        else rhs += t3;
        rep.check(S, s.name(), "jacobi", lhs == rhs, what);
        nontrivial += !lhs.is_zero();
    }
    rep.check(S, s.name(), "jacobi.nontrivial-samples", nontrivial > 0);

    // cochain-level Leibniz for a vector field in the first slot
    nontrivial = 0;
    for (int t = 0; t < cfg.samples; ++t) {
        PolyOpF1 p = random_polyop(R, nm, 1, 3, 1, 1).filter([](const PKey& k) { return pkey_order(k) == 1; });
        if (p.is_zero()) p = parse_polyop("[" + nm.d(0) + "]", nm);
        p = homogeneous_part(p);
        PolyOpF1 q = draw_homogeneous(R, nm, R.uni(0, 1), 2, 2);
        PolyOpF1 r = random_polyop(R, nm, R.uni(1, 2 - q.begin()->first.arity()), 2, 1, 2);
        PolyOpF1 def = leibniz_defect(hh, p, q, r);
        rep.check(S, s.name(), "leibniz.vector-field", def.is_zero(), [&] { return sh(p) + " ; " + sh(q) + " ; " + sh(r); });
        nontrivial += !hh.bracket(p, cup(q, r)).is_zero();
    }
    rep.check(S, s.name(), "leibniz.vector-field.nontrivial-samples", nontrivial > 0);

    // general arity <= 2 triples: chain level is recorded, exactness of the defect on cocycles is checked
    int exact = 0, total = 0;
    for (int t = 0; t < cfg.samples; ++t) {
        PolyOpF1 p = draw_homogeneous(R, nm, R.uni(1, 2), 2, 2);
        PolyOpF1 q = draw_homogeneous(R, nm, R.uni(0, 1), 2, 2);
        PolyOpF1 r = random_polyop(R, nm, R.uni(0, 2 - q.begin()->first.arity()), 2, 1, 2);
        ++total;
        exact += leibniz_defect(hh, p, q, r).is_zero();
    }
    rep.note(S, s.name(), "leibniz.general.chain-level-exact", std::to_string(exact) + "/" + std::to_string(total));

    WeightSystem ws(m);
    if (!ws.empty()) {
        Diff<PolyOpF1> d = [&](const PolyOpF1& x) { return s.pt->total_F1(x); };
        Shower<PolyOpF1> shw = [&](const PolyOpF1& x) { return s.pt->show(x); };
        WeightVec hi = ws.zero();
        for (auto& v : hi) v = 1;
        hi.back() = 2;
        auto closed = closed_samples(s, ws, hi, 2);
        int tried = 0;
        for (int t = 0; t < 8 * cfg.samples && tried < cfg.samples && !closed.empty(); ++t) {
            const PolyOpF1& p = closed[R.uni(0, int(closed.size()) - 1)];
            const PolyOpF1& q = closed[R.uni(0, int(closed.size()) - 1)];
            const PolyOpF1& r = closed[R.uni(0, int(closed.size()) - 1)];
            if (max_arity(q) + max_arity(r) > 2) continue;
            ++tried;
            PolyOpF1 def = leibniz_defect(hh, p, q, r);
            std::string why;
            bool ok = d(def).is_zero() && exact_by_weight(def, ws, d, shw, &why);
            rep.check(S, s.name(), "leibniz.cocycles-up-to-coboundary", ok,
                      [&] { return sh(p) + " ; " + sh(q) + " ; " + sh(r) + " : " + why; });
        }
    }

    // the differentials are brackets
    PolyOpF1 Q = tensor<PolyOpF1>(form_const(Scalar(1)), std::vector<DiffOpF1>{s.t->dF()});
    PolyOpF1 mu = parse_polyop("[1|1]", nm);
    for (int t = 0; t < cfg.samples; ++t) {
        PolyOpF1 p = random_polyop(R, nm, t % 3, 3, 1, 2);
        auto what = [&] { return sh(p); };
        rep.check(S, s.name(), "[dF,-]=dF", hh.bracket(Q, p) == hh.dF_poly(p), what);
        PolyOpF1 bh = hh.bracket(mu, p);
        rep.check(S, s.name(), "[m,-]=dH", bh == hh.dH(p) || bh == -hh.dH(p), what);
        PolyOpF1 dp = hh.dF_poly(p) + hh.dH(p);
        rep.check(S, s.name(), "total-d^2=0", (hh.dF_poly(dp) + hh.dH(dp)).is_zero(), what);
        PolyOpB b = random_polyop_b(R, m, t % 3);
        PolyOpB db = hh.dFU_poly(b) + hh.dH(b);
        rep.check(S, s.name(), "total-d^2=0.B", (hh.dFU_poly(db) + hh.dH(db)).is_zero(), [&] { return s.pt->show(b); });
    }
}

// HKR ----------------------------------------------------------------------------

inline void hkr(const Stack& s, const SuiteConfig& cfg, Report& rep) {
    const std::string S = "hkr";
    const ChartModel& m = *s.m;
    const Names& nm = m.names;
    const Hochschild& hh = *s.h;
    Rng R(stream_seed(cfg.seed, S + s.name()));
    for (int t = 0; t < cfg.samples; ++t) {
        PolyVecF1 v = random_wkey<PolyVecF1>(R, nm, 2, 1, 2, m.r(), m.n());
        v = v.filter([](const WKey& k) { return k.y.degree() + popcount(k.T) <= 3; });
        auto what = [&] { return to_string(v, nm); };
        PolyOpF1 hv = hh.hkr(v);
        rep.check(S, s.name(), "F1.dH.hkr=0", hh.dH(hv).is_zero(), what);
        rep.check(S, s.name(), "F1.chain-map", hh.dF_poly(hv) == hh.hkr(hh.LQ(v)), what);
        rep.check(S, s.name(), "F1.LQ^2=0", hh.LQ(hh.LQ(v)).is_zero(), what);
        PolyVecB w = random_wkey<PolyVecB>(R, nm, 2, 1, 0, 1, m.nB());
        auto wt = [&] { return to_string(w, nm); };
        PolyOpB hw = hh.hkr(w);
        rep.check(S, s.name(), "B.dH.hkr=0", hh.dH(hw).is_zero(), wt);
        rep.check(S, s.name(), "B.chain-map", hh.dFU_poly(hw) == hh.hkr(hh.dBott(w)), wt);
        rep.check(S, s.name(), "B.dBott^2=0", hh.dBott(hh.dBott(w)).is_zero(), wt);
    }
}

// Dimension oracle: H(D_poly(B)) per weight against H(Omega_F (x) wedge B) and hkr images.
inline void hkr_oracle(const Stack& s, const WeightVec& hi, Report& rep, const std::string& S = "hkr") {
    const ChartModel& m = *s.m;
    const Names& nm = m.names;
    WeightSystem ws(m);
    if (ws.empty()) {
        rep.note(S, s.name(), "oracle", "model has no weight grading");
        return;
    }
    Diff<PolyOpB> dB = [&](const PolyOpB& p) { return s.pt->total_B(p); };
    Shower<PolyOpB> sB = [&](const PolyOpB& p) { return s.pt->show(p); };
    Diff<PolyVecB> dV = [&](const PolyVecB& v) { return s.h->dBott(v); };
    Shower<PolyVecB> sV = [&](const PolyVecB& v) { return to_string(v, nm); };
    size_t total = 0;
    for (auto& w : weight_window(ws.zero(), hi)) {
        int arity = 0;
        for (int v : w) arity += v;
        auto cb = poly_pieces<PolyOpB>(ws, nm, w, arity + 1);
        auto cv = polyvec_b_pieces(ws, nm, w);
        std::map<int, size_t> hb, hv;
        for (auto& p : cohomology(cb, w, dB, sB)) hb[p.degree] = p.h;
        bool independent = true;
        for (auto& p : cohomology(cv, w, dV, sV)) {
            hv[p.degree] = p.h;
            total += p.h;
            if (!p.h) continue;
            static const Basis<PolyOpB> empty;
            auto it = cb.find(p.degree - 1);
            const Basis<PolyOpB>& prev = it == cb.end() ? empty : it->second;
            Echelon e;
            for (auto& c : matrix_of_map(prev, cb.at(p.degree), dB, sB)) e.insert(c);
            size_t before = e.rank();
            for (auto& rep_v : p.reps) {
                PolyOpB img = s.h->hkr(rep_v);
                independent &= dB(img).is_zero();
                e.insert(cb.at(p.degree).coords(img, sB));
            }
            independent &= e.rank() - before == p.h;
        }
        bool same = true;
        for (auto& [k, v] : hb) same &= hv[k] == v;
        for (auto& [k, v] : hv) same &= hb[k] == v;
        rep.check(S, s.name(), "oracle.dimensions", same, [&] { return "weight " + to_string(w); });
        rep.check(S, s.name(), "oracle.hkr-classes-independent", independent, [&] { return "weight " + to_string(w); });
    }
    rep.check(S, s.name(), "oracle.nontrivial", total > 0);
}

// Atiyah / Todd ------------------------------------------------------------------

inline SuperMatrix random_supermatrix(Rng& R) {
    auto part = [&](int parity, bool constant) {
        FormElement w;
        if (constant) w.add(FKey{}, Scalar(R.uni(-3, 3)));
        for (int t = 0; t < 2; ++t) {
            uint32_t S;
            do S = R.mask(4);
            while ((popcount(S) & 1) != parity || S == 0);
            w.add(FKey{Exp{}, S}, R.scalar());
        }
        return w;
    };
    SuperMatrix m({0, 0, 1, 1});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            bool odd = (i < 2) != (j < 2);
            m.e[i][j] = part(odd ? 1 : 0, !odd && !(i >= 2 && j >= 2));
        }
    Scalar a(R.uni(1, 3)), b(R.uni(-2, 2)), c(R.uni(-2, 2));
    m.e[2][2] += form_const(a);
    m.e[2][3] += form_const(b);
    m.e[3][2] += form_const(c);
    m.e[3][3] += form_const((b * c + Scalar(1)) / a);
    return m;
}

inline void atiyah_one(const Stack& s, Report& rep, const std::string& S) {
    Atiyah at(*s.t);
    const ChartModel& m = *s.m;
    int N = at.n() + at.r();
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            rep.check(S, s.name(), "At.LQ-closed", at.LQ_At(at.coord_field(i), at.coord_field(j)).is_zero(),
                      [&] { return std::to_string(i) + "," + std::to_string(j); });
    int r = m.r(), nb = m.nB();
    bool r11 = true;
    for (int a1 = 0; a1 < r; ++a1)
        for (int a2 = 0; a2 < r; ++a2)
            for (int be = 0; be < nb; ++be)
                for (int de = 0; de < nb; ++de)
                    for (auto& p : at.dR11(a1, a2, be, de)) r11 &= p.is_zero();
    rep.check(S, s.name(), "R11.CE-closed", r11);
    const CoordForms& cf = at.forms();
    for (int K : {2, 4}) {
        FormElement td = at.todd_dg(K);
        rep.check(S, s.name(), "todd.dg=berezinian-oracle", td == at.todd_dg_oracle(K));
        rep.check(S, s.name(), "todd.dg.closed", cf.LQ(td).is_zero());
        FormElement h = at.todd_dg(K, Scalar(1, 2));
        rep.check(S, s.name(), "todd.dg.half-squared", cf.truncate(wedge(h, h), K) == td);
    }
    FormElement tp = at.todd_pair();
    rep.check(S, s.name(), "todd.pair=traces", tp == at.todd_pair_traces());
    rep.check(S, s.name(), "todd.pair.closed", at.pair_forms().d(tp).is_zero());
    FormElement hp = at.todd_half_pair();
    rep.check(S, s.name(), "todd.pair.half-squared", wedge(hp, hp) * Scalar((nb & 1) ? -1 : 1) == tp);
}

inline std::vector<ConnectionData> connections_with_random(const ChartModel& m, uint64_t seed, int extra) {
    auto out = m.connections;
    for (int k = 1; k <= extra; ++k) out.push_back(random_connection(m, stream_seed(seed, "connection") + uint64_t(k), 2));
    return out;
}

inline void atiyah_todd(const ChartModel& m, const SuiteConfig& cfg, Report& rep) {
    const std::string S = "atiyah-todd";
    std::vector<std::unique_ptr<Stack>> st;
    for (auto& cd : connections_with_random(m, cfg.seed, 2)) st.push_back(std::make_unique<Stack>(m, cd));
    for (auto& s : st) atiyah_one(*s, rep, S);
    std::vector<std::unique_ptr<Atiyah>> as;
    for (auto& s : st) as.push_back(std::make_unique<Atiyah>(*s->t));
    for (size_t i = 0; i < as.size(); ++i)
        for (size_t j = i + 1; j < as.size(); ++j) {
            auto c = compare_todd(*as[i], *as[j]);
            std::string pair = c.conn_a + "|" + c.conn_b;
            for (auto& it : c.items) {
                rep.check(S, pair, "compare-todd.primitive", it.closed && it.found && it.window <= 4,
                          [&] { return it.side + " " + it.cocycle; });
            }
        }
    Rng R(stream_seed(cfg.seed, S + "/berezinian"));
    for (int i = 0; i < 16; ++i) {
        SuperMatrix a = random_supermatrix(R), b = random_supermatrix(R);
        rep.check(S, "*", "berezinian.multiplicative", berezinian(mat_mul(a, b)) == wedge(berezinian(a), berezinian(b)),
                  [&] { return "pair " + std::to_string(i); });
    }
}

// cohomology -----------------------------------------------------------------------

inline void cohomology_suite(const Stack& s, const SuiteConfig& cfg, Report& rep) {
    const std::string S = "cohomology";
    WeightSystem ws(*s.m);
    if (ws.empty()) {
        rep.note(S, s.name(), "skipped", "model has no weight grading");
        return;
    }
    const Transfer& tf = *s.t;
    const Names& nm = s.m->names;
    WeightVec lo = cfg.w_lo.empty() ? ws.zero() : cfg.w_lo;
    auto hi_or = [&](WeightVec d) { return cfg.w_hi.empty() ? d : cfg.w_hi; };
    Diff<DiffOpF1> dA = [&](const DiffOpF1& d) { return tf.dA(d); };
    Diff<OmB> dB = [&](const OmB& d) { return tf.dB(d); };
    Shower<DiffOpF1> sA = [&](const DiffOpF1& d) { return tf.show(d); };
    Shower<OmB> sB = [&](const OmB& d) { return tf.show(d); };
    std::function<OmB(const DiffOpF1&)> f = [&](const DiffOpF1& d) { return tf.phi_nat(d); };
    std::function<DiffOpF1(const OmB&)> g = [&](const OmB& d) { return tf.psi_nat(d); };
    WeightVec dflt(ws.size(), 2);
    if (ws.size() > 2) dflt[2] = 1;
    for (auto& w : weight_window(lo, hi_or(dflt))) {
        auto ca = op_pieces(ws, nm, w);
        auto cb = omb_pieces(ws, nm, w);
        auto r = check_induced_iso<DiffOpF1, OmB>(ca, cb, w, dA, dB, f, g, sA, sB);
        rep.check(S, s.name(), "operators.phi-psi-inverse", r.pass(), [&] { return to_string(w) + " " + r.detail; });
        for (auto& p : cohomology(cb, w, dB, sB))
            for (auto& x : p.reps) rep.check(S, s.name(), "representatives-closed", dB(x).is_zero(), [&] { return sB(x); });
    }
    auto c = s.pt->perturbed();
    Diff<PolyOpF1> pA = [&](const PolyOpF1& p) { return s.pt->total_F1(p); };
    Diff<PolyOpB> pB = [&](const PolyOpB& p) { return s.pt->total_B(p); };
    Shower<PolyOpF1> qA = [&](const PolyOpF1& p) { return s.pt->show(p); };
    Shower<PolyOpB> qB = [&](const PolyOpB& p) { return s.pt->show(p); };
    std::function<PolyOpB(const PolyOpF1&)> pf = [&](const PolyOpF1& p) { return c.phi(p); };
    std::function<PolyOpF1(const PolyOpB&)> pg = [&](const PolyOpB& p) { return c.psi(p); };
    WeightVec pd(ws.size(), 1);
    pd.back() = 2;
    for (auto& w : weight_window(lo, hi_or(pd))) {
        auto ca = poly_pieces<PolyOpF1>(ws, nm, w, cfg.arity);
        auto cb = poly_pieces<PolyOpB>(ws, nm, w, cfg.arity);
        auto r = check_induced_iso<PolyOpF1, PolyOpB>(ca, cb, w, pA, pB, pf, pg, qA, qB);
        rep.check(S, s.name(), "polydifferential.phi-psi-inverse", r.pass(), [&] { return to_string(w) + " " + r.detail; });
    }
}

} // namespace suites

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> v{"contraction-sym", "thm-2.1", "thm-2.2", "thm-3.4", "thm-3.5",
                                            "gerstenhaber", "hkr", "atiyah-todd", "cohomology", "all"};
    return v;
}

// Runs one named suite (or all) over every connection of the model.
inline Report run_suite(const ChartModel& m, const SuiteConfig& cfg) {
    const std::string& n = cfg.suite;
    if (std::find(suite_names().begin(), suite_names().end(), n) == suite_names().end())
        throw std::invalid_argument("unknown suite '" + n + "'");
    auto want = [&](const char* s) { return n == "all" || n == s; };
    Report rep;
    for (auto& cd : m.connections) {
        Stack s(m, cd);
        if (want("contraction-sym")) suites::contraction_sym(s, cfg, rep);
        if (want("thm-2.1")) suites::thm_2_1(s, cfg, rep);
        if (want("thm-2.2")) suites::thm_2_2(s, cfg, rep);
        if (want("thm-3.4")) suites::thm_3_4(s, cfg, rep);
        if (want("thm-3.5")) suites::thm_3_5(s, cfg, rep);
        if (want("gerstenhaber")) suites::gerstenhaber(s, cfg, rep);
        if (want("hkr")) {
            suites::hkr(s, cfg, rep);
            WeightSystem ws(m);
            WeightVec hi(ws.size(), 2);
            if (ws.size() == 4) hi = {3, 0, 2, 3};
            suites::hkr_oracle(s, hi, rep);
        }
        if (want("cohomology")) suites::cohomology_suite(s, cfg, rep);
    }
    if (want("atiyah-todd")) suites::atiyah_todd(m, cfg, rep);
    return rep;
}

} // namespace hcdg
