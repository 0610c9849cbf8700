#include "support.hpp"

#include <hcdg/poly_transfer.hpp>

#include <gtest/gtest.h>

using namespace hcdg;
using namespace hcdg::test;

namespace {
struct Case {
    std::string model, conn;
};
const std::vector<Case> kCases{{"m1", "twist"}, {"m2", "alt"}, {"m3", "twist"}};
} // namespace

class PolyCase : public ::testing::TestWithParam<Case> {
protected:
    void SetUp() override {
        m = model(GetParam().model);
        tf = std::make_unique<Transfer>(m, m.connection(GetParam().conn));
        hh = std::make_unique<Hochschild>(*tf);
        pt = std::make_unique<PolyTransfer>(*hh);
    }
    std::vector<PolyOpF1> a_samples(Rng& R, int count) {
        std::vector<PolyOpF1> v;
        for (int i = 0; i < count; ++i) v.push_back(random_polyop(R, m.names, 1 + i % 3, 2, 1, 2));
        return v;
    }
    std::vector<PolyOpB> b_samples(Rng& R, int count) {
        std::vector<PolyOpB> v;
        for (int i = 0; i < count; ++i) v.push_back(random_polyop_b(R, m, 1 + i % 3, 2, 1, 2));
        return v;
    }
    ChartModel m;
    std::unique_ptr<Transfer> tf;
    std::unique_ptr<Hochschild> hh;
    std::unique_ptr<PolyTransfer> pt;
};

TEST_P(PolyCase, ArityOneSliceIsOperatorContraction) {
    Rng R(20);
    for (int i = 0; i < 6; ++i) {
        DiffOpF1 d = random_op(R, m.names, 3, 1, 2);
        PolyOpF1 p = tensor<PolyOpF1>(form_const(Scalar(1)), std::vector<DiffOpF1>{d});
        EXPECT_EQ(pt->TPhi(p), tensor<PolyOpB>(form_const(Scalar(1)), std::vector<OmB>{tf->phi_nat(d)}));
        EXPECT_EQ(pt->TH(p), tensor<PolyOpF1>(form_const(Scalar(1)), std::vector<DiffOpF1>{tf->h_nat(d)}));
    }
}

TEST_P(PolyCase, TensorTrickContraction) {
    Rng R(21);
    auto checks = verify_contraction(pt->tensor_contraction(), a_samples(R, 9), b_samples(R, 9),
                                     [&](const PolyOpF1& p) { return pt->show(p); }, [&](const PolyOpB& p) { return pt->show(p); });
    for (auto& ch : checks) EXPECT_TRUE(ch.pass) << ch.identity << " on " << ch.detail;
}

TEST_P(PolyCase, PerturbedContractionAndCollapses) {
    Rng R(22);
    auto c = pt->perturbed();
    auto as = a_samples(R, 9);
    auto bs = b_samples(R, 9);
    auto checks = verify_contraction(c, as, bs, [&](const PolyOpF1& p) { return pt->show(p); },
                                     [&](const PolyOpB& p) { return pt->show(p); });
    for (auto& ch : checks) EXPECT_TRUE(ch.pass) << ch.identity << " on " << ch.detail;
    for (auto& a : as) {
        EXPECT_EQ(c.phi(a), pt->TPhi(a)) << pt->show(a);
        EXPECT_EQ(pt->TPhi(pt->total_F1(a)), pt->total_B(pt->TPhi(a))) << pt->show(a);
    }
    for (auto& b : bs) EXPECT_EQ(c.dB(b), pt->total_B(b)) << pt->show(b);
}

TEST_P(PolyCase, ProjectionIntertwinesCup) {
    Rng R(23);
    for (int i = 0; i < 8; ++i) {
        PolyOpF1 p = random_polyop(R, m.names, 1 + i % 2, 2, 1, 2);
        PolyOpF1 q = random_polyop(R, m.names, 1 + (i / 2) % 2, 2, 1, 2);
        EXPECT_EQ(pt->TPhi(cup(p, q)), cup(pt->TPhi(p), pt->TPhi(q)));
    }
}

TEST_P(PolyCase, ProjectionIsCoalgebraMorphism) {
    Rng R(24);
    int nb = m.nB();
    for (int i = 0; i < 8; ++i) {
        DiffOpF1 d = random_op(R, m.names, 3, 2, 3);
        EXPECT_EQ(coproduct_op<PolyOpB>(tf->phi_nat(d), nb), pt->TPhi(coproduct_op<PolyOpF1>(d, m.n()))) << tf->show(d);
    }
}

TEST_P(PolyCase, MuIsCoalgebraMorphism) {
    Rng R(25);
    std::map<Slot, DiffOpF1> mu_slot;
    for (int i = 0; i < 8; ++i) {
        OmB u = random_wkey<OmB>(R, m.names, 3, 2, 3, m.nB(), 0);
        PolyOpF1 lhs = coproduct_op<PolyOpF1>(tf->mu(u), m.n());
        PolyOpF1 rhs = tensor_map<PolyOpF1>(
            coproduct_op<PolyOpB>(u, m.nB()),
            [&](int, const Slot& s) -> const DiffOpF1& {
                auto it = mu_slot.find(s);
                if (it == mu_slot.end()) it = mu_slot.emplace(s, tf->mu(slot_as_op<OmB>(s))).first;
                return it->second;
            },
            [](int, int) { return 0; });
        EXPECT_EQ(lhs, rhs) << tf->show(u);
    }
}

// in the perfect case Psi_nat is the tensor power of mu, so brackets are preserved
TEST_P(PolyCase, PsiPreservesBrackets) {
    Rng R(26);
    for (int i = 0; i < 8; ++i) {
        PolyOpB a = random_polyop_b(R, m, 1 + i % 2, 2, 1, 2);
        PolyOpB b = random_polyop_b(R, m, 1 + (i / 2) % 2, 2, 1, 2);
        EXPECT_EQ(pt->TPsi(hh->bracket(a, b)), hh->bracket(pt->TPsi(a), pt->TPsi(b))) << pt->show(a) << " , " << pt->show(b);
    }
}

INSTANTIATE_TEST_SUITE_P(Models, PolyCase, ::testing::ValuesIn(kCases),
                         [](const auto& info) { return info.param.model + "_" + info.param.conn; });
