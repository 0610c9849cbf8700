#include "support.hpp"

#include <hcdg/transfer.hpp>

#include <gtest/gtest.h>

using namespace hcdg;
using namespace hcdg::test;

namespace {
struct Case {
    std::string model, conn;
};
const std::vector<Case> kCases{{"m1", "flat"}, {"m1", "twist"}, {"m2", "default"}, {"m2", "alt"}, {"m3", "twist"}};

std::vector<DiffOpF1> op_samples(Rng& R, const Names& nm, int count) {
    std::vector<DiffOpF1> v;
    for (int i = 0; i < count; ++i) v.push_back(random_op(R, nm, 3, 2, 3));
    return v;
}
std::vector<OmB> omb_samples(Rng& R, const ChartModel& m, int count) {
    std::vector<OmB> v;
    for (int i = 0; i < count; ++i) v.push_back(random_wkey<OmB>(R, m.names, 3, 2, 3, m.nB(), 0));
    return v;
}
} // namespace

class TransferCase : public ::testing::TestWithParam<Case> {
protected:
    void SetUp() override {
        m = model(GetParam().model);
        tf = std::make_unique<Transfer>(m, m.connection(GetParam().conn));
    }
    ChartModel m;
    std::unique_ptr<Transfer> tf;
};

TEST_P(TransferCase, ThetaLowersOrder) {
    Rng R(1);
    for (auto& d : op_samples(R, m.names, 12)) {
        DiffOpF1 t = tf->Theta(d);
        if (!t.is_zero()) EXPECT_LT(max_order(t), max_order(d));
    }
}

TEST_P(TransferCase, BaseContraction) {
    Rng R(2);
    auto c = tf->base();
    auto checks = verify_contraction(c, op_samples(R, m.names, 8), omb_samples(R, m, 8),
                                     [&](const DiffOpF1& d) { return tf->show(d); }, [&](const OmB& d) { return tf->show(d); });
    for (auto& ch : checks) EXPECT_TRUE(ch.pass) << ch.identity << " on " << ch.detail;
}

TEST_P(TransferCase, PerturbedCollapses) {
    Rng R(3);
    for (auto& d : op_samples(R, m.names, 8)) EXPECT_EQ(tf->phi_flat(d), tf->phi_nat(d)) << tf->show(d);
    for (auto& t : omb_samples(R, m, 8)) EXPECT_EQ(tf->dB_flat(t), tf->dB(t)) << tf->show(t);
}

TEST_P(TransferCase, NaturalContraction) {
    Rng R(4);
    auto checks = verify_contraction(tf->natural(), op_samples(R, m.names, 8), omb_samples(R, m, 8),
                                     [&](const DiffOpF1& d) { return tf->show(d); }, [&](const OmB& d) { return tf->show(d); });
    for (auto& ch : checks) EXPECT_TRUE(ch.pass) << ch.identity << " on " << ch.detail;
}

TEST_P(TransferCase, MuIsPsiNatural) {
    Rng R(5);
    for (auto& t : omb_samples(R, m, 8)) {
        EXPECT_EQ(tf->mu(t), tf->psi_nat(t)) << tf->show(t);
        EXPECT_TRUE(tf->H0(tf->Theta(tf->Psi0(t))).is_zero());
    }
    for (int i = 0; i < 8; ++i) {
        auto ts = omb_samples(R, m, 2);
        EXPECT_EQ(tf->mu(tf->hopf_product(ts[0], ts[1])), compose(tf->mu(ts[0]), tf->mu(ts[1]), m.names));
    }
}

TEST_P(TransferCase, PbwBarFactorsThroughPhiNatural) {
    Rng R(6);
    int nb = m.nB();
    std::vector<Exp> words{Exp{}};
    for (int d = 0; d < 3; ++d) {
        std::vector<Exp> nx;
        for (auto& w : words)
            for (int b = 0; b < nb; ++b) nx.push_back(w.inc(b));
        for (auto& w : nx) words.push_back(w);
    }
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    for (auto& w : words) {
        SymB t = lmul_form(random_form(R, m.names, 2, 2), pure_elem<SymB>(w, 0));
        EXPECT_EQ(tf->pbw().pbw_bar(t), tf->phi_nat(tf->pbw().pbw(tf->sym().Psi(t)))) << w.degree();
    }
}

// pi_* kills pbw of everything with a positive number of iotas
TEST_P(TransferCase, ProjectabilityOfIotaClasses) {
    Rng R(7);
    int n = m.n(), r = m.r();
    for (uint32_t T = 1; T < (1u << r); ++T)
        for (int t = 0; t < 6; ++t) {
            Exp y = R.exp(n, 3 - popcount(T));
            if (y.degree() + popcount(T) > 3) continue;
            SymT e = lmul_form(random_form(R, m.names, 2, 2), pure_elem<SymT>(y, T));
            EXPECT_TRUE(pushforward(tf->pbw().pbw(e)).is_zero());
        }
}

INSTANTIATE_TEST_SUITE_P(Models, TransferCase, ::testing::ValuesIn(kCases),
                         [](const auto& info) { return info.param.model + "_" + info.param.conn; });
