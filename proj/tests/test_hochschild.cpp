#include "support.hpp"

#include <hcdg/hochschild.hpp>

#include <gtest/gtest.h>

using namespace hcdg;
using namespace hcdg::test;

namespace {
struct Case {
    std::string model, conn;
};
const std::vector<Case> kCases{{"m1", "twist"}, {"m2", "alt"}, {"m3", "twist"}};

} // namespace

class HochCase : public ::testing::TestWithParam<Case> {
protected:
    void SetUp() override {
        m = model(GetParam().model);
        tf = std::make_unique<Transfer>(m, m.connection(GetParam().conn));
        hh = std::make_unique<Hochschild>(*tf);
    }
    ChartModel m;
    std::unique_ptr<Transfer> tf;
    std::unique_ptr<Hochschild> hh;
};

TEST_P(HochCase, TotalDifferentialsSquareToZero) {
    Rng R(8);
    for (int ar = 0; ar <= 2; ++ar) {
        PolyOpF1 p = random_polyop(R, m.names, ar, 3, 1, 2);
        EXPECT_TRUE(hh->dF_poly(hh->dF_poly(p)).is_zero()) << ar;
        PolyOpF1 d = hh->dF_poly(p) + hh->dH(p);
        EXPECT_TRUE((hh->dF_poly(d) + hh->dH(d)).is_zero()) << ar;
        PolyOpB b = random_polyop_b(R, m, ar);
        EXPECT_TRUE(hh->dH(hh->dH(b)).is_zero()) << ar;
        EXPECT_TRUE(hh->dFU_poly(hh->dFU_poly(b)).is_zero()) << ar;
        PolyOpB db = hh->dFU_poly(b) + hh->dH(b);
        EXPECT_TRUE((hh->dFU_poly(db) + hh->dH(db)).is_zero()) << ar;
    }
}

TEST_P(HochCase, BracketWithDFIsTheDifferential) {
    Rng R(9);
    PolyOpF1 Q = tensor<PolyOpF1>(form_const(Scalar(1)), std::vector<DiffOpF1>{tf->dF()});
    PolyOpF1 one11 = parse_polyop("[1|1]", m.names);
    for (int ar = 0; ar <= 2; ++ar) {
        PolyOpF1 p = random_polyop(R, m.names, ar, 3, 1, 2);
        PolyOpF1 br = hh->bracket(Q, p);
        EXPECT_EQ(br, hh->dF_poly(p)) << ar;
        PolyOpF1 bh = hh->bracket(one11, p);
        EXPECT_TRUE(bh == hh->dH(p) || bh == -hh->dH(p)) << ar;
    }
}

TEST_P(HochCase, GerstenhaberAxiomsF1) {
    Rng R(10);
    int nontrivial = 0;
    for (int t = 0; t < 16; ++t) {
        PolyOpF1 a = random_polyop(R, m.names, R.uni(0, 2), 2, 1, 1);
        PolyOpF1 b = random_polyop(R, m.names, R.uni(0, 2), 2, 1, 1);
        PolyOpF1 c = random_polyop(R, m.names, R.uni(0, 2), 2, 1, 1);
        // homogeneous parts
        auto hom = [](const PolyOpF1& p) {
            int d = pkey_degree(p.begin()->first);
            return p.filter([d](const PKey& k) { return pkey_degree(k) == d; });
        };
        a = hom(a);
        b = hom(b);
        c = hom(c);
        int da = pkey_degree(a.begin()->first), db = pkey_degree(b.begin()->first), dc = pkey_degree(c.begin()->first);
        PolyOpF1 ab = hh->bracket(a, b), ba = hh->bracket(b, a);
        EXPECT_EQ(ab, (((da - 1) * (db - 1)) & 1) ? ba : -ba);
        // [a,[b,c]] = [[a,b],c] + (-1)^{(da-1)(db-1)} [b,[a,c]]
        PolyOpF1 lhs = hh->bracket(a, hh->bracket(b, c));
        PolyOpF1 rhs = hh->bracket(ab, c);
        PolyOpF1 t3 = hh->bracket(b, hh->bracket(a, c));
        if (((da - 1) * (db - 1)) & 1) rhs -= t3;
        else rhs += t3;
        EXPECT_EQ(lhs, rhs);
        nontrivial += !lhs.is_zero();
        (void)dc;
    }
    EXPECT_GT(nontrivial, 0);
}

// exact on cochains when the first argument is a vector field (primitive slot)
TEST_P(HochCase, LeibnizOverCupForVectorFields) {
    Rng R(11);
    int nontrivial = 0;
    for (int t = 0; t < 8; ++t) {
        PolyOpF1 p = random_polyop(R, m.names, 1, 3, 1, 1).filter([](const PKey& k) { return pkey_order(k) == 1; });
        if (p.is_zero()) continue;
        int dp = pkey_degree(p.begin()->first);
        p = p.filter([dp](const PKey& k) { return pkey_degree(k) == dp; });
        PolyOpF1 q = random_polyop(R, m.names, R.uni(0, 1), 2, 1, 2);
        int dq = pkey_degree(q.begin()->first);
        q = q.filter([dq](const PKey& k) { return pkey_degree(k) == dq; });
        PolyOpF1 r = random_polyop(R, m.names, R.uni(1, 2 - q.begin()->first.arity()), 2, 1, 2);
        PolyOpF1 lhs = hh->bracket(p, cup(q, r));
        PolyOpF1 rhs = cup(hh->bracket(p, q), r);
        PolyOpF1 t2 = cup(q, hh->bracket(p, r));
        if (((dp - 1) * dq) & 1) rhs -= t2;
        else rhs += t2;
        EXPECT_EQ(lhs, rhs) << hh->transfer().show(DiffOpF1()) << to_string(p, m.names) << " ; " << to_string(q, m.names)
                            << " ; " << to_string(r, m.names);
        nontrivial += !lhs.is_zero();
    }
    EXPECT_GT(nontrivial, 0);
}

TEST_P(HochCase, HkrClosedAndChainMap) {
    Rng R(12);
    int nontrivial = 0;
    for (int t = 0; t < 8; ++t) {
        PolyVecF1 v = random_wkey<PolyVecF1>(R, m.names, 2, 1, 2, m.r(), m.n());
        v = v.filter([](const WKey& k) { return k.y.degree() + popcount(k.T) <= 3; });
        PolyOpF1 hv = hh->hkr(v);
        EXPECT_TRUE(hh->dH(hv).is_zero());
        EXPECT_EQ(hh->dF_poly(hv), hh->hkr(hh->LQ(v)));
        EXPECT_TRUE(hh->LQ(hh->LQ(v)).is_zero());
        PolyVecB w = random_wkey<PolyVecB>(R, m.names, 2, 1, 0, 1, m.nB());
        PolyOpB hw = hh->hkr(w);
        EXPECT_TRUE(hh->dH(hw).is_zero());
        EXPECT_EQ(hh->dFU_poly(hw), hh->hkr(hh->dBott(w)));
        nontrivial += !hh->dF_poly(hv).is_zero() || !hh->dFU_poly(hw).is_zero();
    }
    EXPECT_GT(nontrivial, 0);
}

INSTANTIATE_TEST_SUITE_P(Models, HochCase, ::testing::ValuesIn(kCases),
                         [](const auto& info) { return info.param.model + "_" + info.param.conn; });
