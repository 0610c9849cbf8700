#include "support.hpp"

#include <hcdg/symtensor.hpp>

#include <gtest/gtest.h>

using namespace hcdg;
using namespace hcdg::test;

namespace {

struct Case {
    std::string model, conn;
};
const std::vector<Case> kCases{{"m1", "flat"}, {"m1", "twist"}, {"m2", "default"}, {"m2", "alt"}, {"m3", "twist"}};

SymT random_sym(Rng& R, const ChartModel& m, int terms = 4) {
    return random_wkey<SymT>(R, m.names, terms, 2, 2, m.n(), m.r());
}

} // namespace

class SymCase : public ::testing::TestWithParam<Case> {};

// the splitting differential agrees with the commutator with d_F on generators
TEST_P(SymCase, DifferentialMatchesCommutatorOnGenerators) {
    ChartModel m = model(GetParam().model);
    Geometry g(m, m.connection(GetParam().conn));
    SymCalculus sc(g);
    for (int a = 0; a < m.r(); ++a) {
        Gen gen{true, a};
        EXPECT_EQ(sc.decompose(commutator(sc.dF(), sc.gen_op(gen), m.names)), sc.D_gen(gen)) << "iota" << a + 1;
    }
    for (int k = 0; k < m.n(); ++k) {
        Gen gen{false, k};
        EXPECT_EQ(sc.decompose(commutator(sc.dF(), sc.gen_op(gen), m.names)), sc.D_gen(gen)) << "eh" << k + 1;
    }
}

TEST_P(SymCase, DecomposeInvertsToField) {
    ChartModel m = model(GetParam().model);
    SymCalculus sc(Geometry(m, m.connection(GetParam().conn)));
    for (int i = 0; i < m.n(); ++i) EXPECT_EQ(sc.to_field(sc.coordinate_fields()[i]), dop_dx(i));
}

TEST_P(SymCase, ContractionIdentities) {
    ChartModel m = model(GetParam().model);
    SymCalculus sc(Geometry(m, m.connection(GetParam().conn)));
    Rng R(21);
    for (int t = 0; t < 20; ++t) {
        SymT x = random_sym(R, m);
        EXPECT_TRUE(sc.D(sc.D(x)).is_zero());
        EXPECT_TRUE(sc.delta(sc.delta(x)).is_zero());
        SymT lhs = sc.Psi(sc.Phi(x)) - x;
        EXPECT_EQ(lhs, sc.D(sc.H(x)) + sc.H(sc.D(x)));
        EXPECT_EQ(lhs, sc.delta(sc.H(x)) + sc.H(sc.delta(x)));
        EXPECT_TRUE(sc.H(sc.H(x)).is_zero());
        EXPECT_TRUE(sc.Phi(sc.H(x)).is_zero());
        EXPECT_EQ(sc.Phi(sc.D(x)), sc.dSB(sc.Phi(x)));
        SymB y = sc.Phi(x);
        EXPECT_EQ(sc.Phi(sc.Psi(y)), y);
        EXPECT_TRUE(sc.H(sc.Psi(y)).is_zero());
        EXPECT_EQ(sc.D(sc.Psi(y)), sc.Psi(sc.dSB(y)));
    }
}

INSTANTIATE_TEST_SUITE_P(Models, SymCase, ::testing::ValuesIn(kCases),
                         [](const auto& info) { return info.param.model + "_" + info.param.conn; });
