#include "support.hpp"

#include <hcdg/cohomology.hpp>
#include <hcdg/poly_transfer.hpp>

#include <gtest/gtest.h>

using namespace hcdg;
using namespace hcdg::test;

namespace {

struct Env {
    ChartModel m;
    std::unique_ptr<Transfer> t;
    std::unique_ptr<Hochschild> h;
    std::unique_ptr<PolyTransfer> pt;
    Env(const std::string& name, const std::string& conn) : m(model(name)) {
        t = std::make_unique<Transfer>(m, m.connection(conn));
        h = std::make_unique<Hochschild>(*t);
        pt = std::make_unique<PolyTransfer>(*h);
    }
    Diff<FormElement> dF() const {
        return [this](const FormElement& w) { return apply(t->dF(), w, m.names); };
    }
    Shower<FormElement> sF() const {
        return [this](const FormElement& w) { return to_string(w, m.names); };
    }
};

} // namespace

TEST(Cohomology, ZeroDifferentialKeepsEverything) {
    ChartModel m = model("m1");
    WeightSystem ws(m, {"W1", "Y"});
    Diff<FormElement> zero = [](const FormElement&) { return FormElement(); };
    Shower<FormElement> show = [&](const FormElement& w) { return to_string(w, m.names); };
    for (auto& w : weight_window({0, 0}, {3, 2})) {
        auto pieces = form_pieces(ws, 2, 1, w);
        for (auto& p : cohomology(pieces, w, zero, show)) EXPECT_EQ(p.h, p.dim);
    }
}

TEST(Cohomology, MatrixOfDFIsDx) {
    Env s("m1", "flat");
    WeightSystem ws(s.m, {"W1", "Y"});
    for (auto& w : weight_window({1, 0}, {4, 2})) {
        auto pieces = form_pieces(ws, 2, 1, w);
        auto cols = matrix_of_map(pieces[0], pieces[1], s.dF(), s.sF());
        for (size_t j = 0; j < cols.size(); ++j) {
            const FKey& src = pieces[0].keys[j];
            FKey img{src.x - Exp::unit(0), 1};
            ASSERT_EQ(cols[j].size(), 1u);
            EXPECT_EQ(pieces[1].keys[cols[j].begin()->first], img);
            EXPECT_EQ(cols[j].begin()->second, Scalar(src.x[0]));
        }
    }
}

// polynomial Poincare lemma: every polynomial in x has an x-antiderivative
TEST(Cohomology, M1FormsPoincareOracle) {
    Env s("m1", "flat");
    WeightSystem ws(s.m, {"W1", "Y"});
    for (int D = 0; D <= 3; ++D) {
        size_t h0 = 0, h1 = 0;
        for (auto& w : weight_window({0, 0}, {5, D}))
            for (auto& p : cohomology(form_pieces(ws, 2, 1, w), w, s.dF(), s.sF())) {
                (p.degree == 0 ? h0 : h1) += p.h;
                for (auto& rep : p.reps) EXPECT_TRUE(s.dF()(rep).is_zero());
                if (p.degree == 0 && p.h) {
                    ASSERT_EQ(p.reps.size(), 1u);
                    EXPECT_EQ(p.reps[0].begin()->first.x[0], 0);  // a power of y
                }
            }
        EXPECT_EQ(h0, size_t(D + 1));
        EXPECT_EQ(h1, 0u);
    }
}

TEST(Cohomology, SolvePrimitive) {
    Env s("m1", "twist");
    WeightSystem ws(s.m, {"W1", "Y"});
    Rng R(41);
    auto pieces = form_pieces(ws, 2, 1, {3, 1});
    auto eta = solve_primitive(FormElement(), pieces[0], pieces[1], s.dF(), s.sF());
    ASSERT_TRUE(eta.has_value());
    EXPECT_TRUE(eta->is_zero());
    for (int i = 0; i < 5; ++i) {
        FormElement e0;
        for (auto& k : pieces[0].keys) e0.add(k, R.scalar());
        FormElement target = s.dF()(e0);
        auto p = solve_primitive(target, pieces[0], pieces[1], s.dF(), s.sF());
        ASSERT_TRUE(p.has_value());
        EXPECT_EQ(s.dF()(*p), target);
    }
}

TEST(Cohomology, RejectsInhomogeneousMaps) {
    Env s("m1", "flat");
    WeightSystem ws(s.m, {"W1", "Y"});
    auto pieces = form_pieces(ws, 2, 1, {2, 0});
    Diff<FormElement> bad = [](const FormElement& w) { return wedge(form_from_poly(poly_var(0)), w); };
    EXPECT_THROW(matrix_of_map(pieces[0], pieces[0], bad, s.sF()), spec_rejection);
    ChartModel m2 = model("m2");
    WeightSystem none(m2);
    EXPECT_TRUE(none.empty());
    EXPECT_THROW(form_pieces(none, 3, 2, {}), spec_rejection);
}

// B-side Hochschild cohomology against polyvector fields per weight
TEST(Cohomology, HkrDimensionOracleM1) {
    for (std::string conn : {"flat", "twist"}) {
        Env s("m1", conn);
        WeightSystem ws(s.m);
        const Names& nm = s.m.names;
        Diff<PolyOpB> dB = [&](const PolyOpB& p) { return s.pt->total_B(p); };
        Shower<PolyOpB> sB = [&](const PolyOpB& p) { return s.pt->show(p); };
        Diff<PolyVecB> dV = [&](const PolyVecB& v) { return s.h->dBott(v); };
        Shower<PolyVecB> sV = [&](const PolyVecB& v) { return to_string(v, nm); };
        size_t total = 0;
        for (auto& w : weight_window({0, 0, 0, 0}, {3, 0, 2, 3})) {
            auto cb = poly_pieces<PolyOpB>(ws, nm, w, 8);
            auto cv = polyvec_b_pieces(ws, nm, w);
            std::map<int, size_t> hb, hv;
            for (auto& p : cohomology(cb, w, dB, sB)) hb[p.degree] = p.h;
            for (auto& p : cohomology(cv, w, dV, sV)) {
                hv[p.degree] = p.h;
                total += p.h;
                // hkr of representatives stays independent modulo exact terms
                if (!p.h) continue;
                static const Basis<PolyOpB> empty;
                auto it = cb.find(p.degree - 1);
                const Basis<PolyOpB>& prev = it == cb.end() ? empty : it->second;
                Echelon e;
                for (auto& c : matrix_of_map(prev, cb.at(p.degree), dB, sB)) e.insert(c);
                size_t before = e.rank();
                for (auto& rep : p.reps) {
                    PolyOpB img = s.h->hkr(rep);
                    EXPECT_TRUE(dB(img).is_zero());
                    e.insert(cb.at(p.degree).coords(img, sB));
                }
                EXPECT_EQ(e.rank() - before, p.h) << to_string(w);
            }
            for (auto& [k, v] : hb)
                if (v) EXPECT_EQ(hv[k], v) << to_string(w) << " degree " << k;
            for (auto& [k, v] : hv)
                if (v) EXPECT_EQ(hb[k], v) << to_string(w) << " degree " << k;
        }
        EXPECT_GT(total, 0u);
    }
}

class TransferCohomology : public ::testing::TestWithParam<std::pair<std::string, std::string>> {};

TEST_P(TransferCohomology, OperatorMapsAreInverse) {
    Env s(GetParam().first, GetParam().second);
    WeightSystem ws(s.m);
    Diff<DiffOpF1> dA = [&](const DiffOpF1& d) { return s.t->dA(d); };
    Diff<OmB> dB = [&](const OmB& d) { return s.t->dB(d); };
    Shower<DiffOpF1> sA = [&](const DiffOpF1& d) { return s.t->show(d); };
    Shower<OmB> sB = [&](const OmB& d) { return s.t->show(d); };
    std::function<OmB(const DiffOpF1&)> f = [&](const DiffOpF1& d) { return s.t->phi_nat(d); };
    std::function<DiffOpF1(const OmB&)> g = [&](const OmB& d) { return s.t->psi_nat(d); };
    std::function<DiffOpF1(const OmB&)> zero = [](const OmB&) { return DiffOpF1(); };
    size_t classes = 0;
    bool control_failed = false;
    for (auto& w : weight_window({0, 0, 0, 0}, {2, 2, 1, 2})) {
        auto ca = op_pieces(ws, s.m.names, w);
        auto cb = omb_pieces(ws, s.m.names, w);
        auto r = check_induced_iso<DiffOpF1, OmB>(ca, cb, w, dA, dB, f, g, sA, sB);
        EXPECT_TRUE(r.pass()) << to_string(w) << " " << r.detail;
        for (auto& p : cohomology(cb, w, dB, sB)) classes += p.h;
        control_failed |= !check_induced_iso<DiffOpF1, OmB>(ca, cb, w, dA, dB, f, zero, sA, sB).pass();
    }
    EXPECT_GT(classes, 0u);
    EXPECT_TRUE(control_failed);
}

TEST_P(TransferCohomology, PolydifferentialMapsAreInverse) {
    Env s(GetParam().first, GetParam().second);
    WeightSystem ws(s.m);
    auto c = s.pt->perturbed();
    Diff<PolyOpF1> dA = [&](const PolyOpF1& p) { return s.pt->total_F1(p); };
    Diff<PolyOpB> dB = [&](const PolyOpB& p) { return s.pt->total_B(p); };
    Shower<PolyOpF1> sA = [&](const PolyOpF1& p) { return s.pt->show(p); };
    Shower<PolyOpB> sB = [&](const PolyOpB& p) { return s.pt->show(p); };
    std::function<PolyOpB(const PolyOpF1&)> f = [&](const PolyOpF1& p) { return c.phi(p); };
    std::function<PolyOpF1(const PolyOpB&)> g = [&](const PolyOpB& p) { return c.psi(p); };
    size_t classes = 0;
    for (auto& w : weight_window({0, 0, 0, 0}, {1, 1, 1, 2})) {
        auto ca = poly_pieces<PolyOpF1>(ws, s.m.names, w, 3);
        auto cb = poly_pieces<PolyOpB>(ws, s.m.names, w, 3);
        auto r = check_induced_iso<PolyOpF1, PolyOpB>(ca, cb, w, dA, dB, f, g, sA, sB);
        EXPECT_TRUE(r.pass()) << to_string(w) << " " << r.detail;
        for (auto& p : cohomology(cb, w, dB, sB)) classes += p.h;
    }
    EXPECT_GT(classes, 0u);
}

INSTANTIATE_TEST_SUITE_P(Models, TransferCohomology,
                         ::testing::Values(std::pair<std::string, std::string>{"m1", "flat"},
                                           std::pair<std::string, std::string>{"m1", "twist"},
                                           std::pair<std::string, std::string>{"m3", "twist"}),
                         [](const auto& info) { return info.param.first + "_" + info.param.second; });
