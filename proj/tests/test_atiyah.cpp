#include "support.hpp"

#include <hcdg/atiyah.hpp>

#include <gtest/gtest.h>

using namespace hcdg;
using namespace hcdg::test;

namespace {

FormElement random_coordform(Rng& R, const CoordForms& cf, int terms = 4) {
    FormElement w;
    int n = cf.n(), r = cf.r();
    for (int t = 0; t < terms; ++t) {
        FKey k{R.exp(n, 2), R.mask(r + n)};
        for (int a = 0; a < r; ++a) k.x.set(n + a, R.uni(0, 1));
        w.add(k, R.scalar());
    }
    return w;
}

struct Loaded {
    ChartModel m;
    std::vector<ConnectionData> conns;
};

Loaded load_with_random(const std::string& name, int extra = 3) {
    Loaded l{model(name), {}};
    l.conns = l.m.connections;
    for (int s = 1; s <= extra; ++s) l.conns.push_back(random_connection(l.m, uint64_t(s), 2));
    return l;
}

} // namespace

class AtiyahModel : public ::testing::TestWithParam<std::string> {};

TEST_P(AtiyahModel, FormDifferentials) {
    Loaded l = load_with_random(GetParam(), 1);
    for (auto& cd : l.conns) {
        Transfer t(l.m, cd);
        Atiyah at(t);
        const CoordForms& cf = at.forms();
        Rng R(31);
        for (int i = 0; i < 12; ++i) {
            FormElement w = random_coordform(R, cf);
            EXPECT_TRUE(cf.d(cf.d(w)).is_zero()) << cf.show(w);
            EXPECT_TRUE(cf.LQ(cf.LQ(w)).is_zero()) << cf.show(w);
            EXPECT_TRUE((cf.LQ(cf.d(w)) + cf.d(cf.LQ(w))).is_zero()) << cf.show(w);
        }
        // on functions of the base L_Q is d_F
        for (int i = 0; i < 4; ++i) {
            FormElement f = random_form(R, l.m.names);
            EXPECT_EQ(cf.LQ(f), apply(t.dF(), f, l.m.names));
        }
        const PairForms& pf = at.pair_forms();
        for (int i = 0; i < 8; ++i) {
            FormElement w;
            for (int s = 0; s < 3; ++s) w.add(FKey{R.exp(l.m.n(), 2), R.mask(l.m.r() + l.m.nB())}, R.scalar());
            EXPECT_TRUE(pf.d(pf.d(w)).is_zero()) << pf.show(w);
        }
    }
}

TEST_P(AtiyahModel, ConnectionIsLinearAndDerivation) {
    ChartModel m = model(GetParam());
    Transfer t(m, m.connections.back());
    Atiyah at(t);
    const SymCalculus& sc = t.sym();
    Rng R(32);
    int N = m.n() + m.r();
    auto gen = [&](int p) { return p < m.r() ? Gen{true, p} : Gen{false, p - m.r()}; };
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            FormElement f = random_form(R, m.names, 2, 1);
            SymT X = gen_elem<SymT>(gen(i)), Y = gen_elem<SymT>(gen(j));
            EXPECT_EQ(at.nabla(lmul_form(f, X), Y), lmul_form(f, at.nabla(X, Y)));
            // nabla_X (f Y) = X(f) Y + (-1)^{|X||f|} f nabla_X Y
            FormElement Xf = apply(sc.gen_op(gen(i)), f, m.names);
            SymT rhs = lmul_form(Xf, Y);
            FormElement fs;
            for (auto& [k, c] : f) fs.add(k, (gen(i).odd && (popcount(k.S) & 1)) ? -c : c);
            rhs += lmul_form(fs, at.nabla(X, Y));
            EXPECT_EQ(at.nabla(X, lmul_form(f, Y)), rhs);
        }
    // table: iota inputs differentiate nothing
    for (int a = 0; a < m.r(); ++a)
        for (int j = 0; j < N; ++j) EXPECT_TRUE(at.nabla(gen_elem<SymT>(Gen{true, a}), gen_elem<SymT>(gen(j))).is_zero());
}

TEST_P(AtiyahModel, AtiyahCocycleClosedAndTensorial) {
    Loaded l = load_with_random(GetParam());
    int nonzero = 0;
    for (auto& cd : l.conns) {
        Transfer t(l.m, cd);
        Atiyah at(t);
        int N = at.n() + at.r();
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                DiffOpF1 X = at.coord_field(i), Y = at.coord_field(j);
                EXPECT_TRUE(at.LQ_At(X, Y).is_zero()) << cd.name << " " << i << "," << j;
                nonzero += !at.At(X, Y).is_zero();
            }
        Rng R(33);
        for (int s = 0; s < 6; ++s) {
            int i = R.uni(0, N - 1), j = R.uni(0, N - 1);
            FormElement f = random_form(R, l.m.names, 2, 1);
            DiffOpF1 X = at.coord_field(i), Y = at.coord_field(j);
            DiffOpF1 base = at.At(X, Y);
            DiffOpF1 lhs1 = at.At(lmul_form(f, X), Y), lhs2 = at.At(X, lmul_form(f, Y));
            DiffOpF1 r1, r2;
            int dX = i < at.n() ? 0 : -1;
            for (auto& [k, c] : f) {
                FormElement fk(k, c);
                int df = popcount(k.S);
                r1 += lmul_form((df & 1) ? -fk : fk, base);
                r2 += lmul_form(((df * (dX + 1)) & 1) ? -fk : fk, base);
            }
            EXPECT_EQ(lhs1, r1) << cd.name;
            EXPECT_EQ(lhs2, r2) << cd.name;
        }
    }
    if (GetParam() != "m1") EXPECT_GT(nonzero, 0);
}

TEST_P(AtiyahModel, R11IsChevalleyEilenbergClosed) {
    Loaded l = load_with_random(GetParam());
    int nonzero = 0;
    for (auto& cd : l.conns) {
        Transfer t(l.m, cd);
        Atiyah at(t);
        int r = l.m.r(), nb = l.m.nB();
        for (int a1 = 0; a1 < r; ++a1)
            for (int a2 = 0; a2 < r; ++a2)
                for (int be = 0; be < nb; ++be)
                    for (int de = 0; de < nb; ++de)
                        for (auto& p : at.dR11(a1, a2, be, de)) EXPECT_TRUE(p.is_zero()) << cd.name;
        SuperMatrix R = at.r11_matrix();
        if (nb == 1) EXPECT_TRUE(at.pair_forms().d(R.e[0][0]).is_zero()) << cd.name;
        nonzero += !mat_is_zero(R);
    }
    EXPECT_GT(nonzero, 0);
}

TEST_P(AtiyahModel, ToddSeriesMatchesBerezinianOracle) {
    Loaded l = load_with_random(GetParam(), 2);
    for (auto& cd : l.conns) {
        Transfer t(l.m, cd);
        Atiyah at(t);
        const CoordForms& cf = at.forms();
        for (int K : {2, 4}) {
            FormElement td = at.todd_dg(K);
            EXPECT_EQ(td, at.todd_dg_oracle(K)) << cd.name;
            EXPECT_TRUE(cf.LQ(td).is_zero());
            FormElement h = at.todd_dg(K, Scalar(1, 2));
            EXPECT_TRUE(cf.LQ(h).is_zero());
            EXPECT_EQ(cf.truncate(wedge(h, h), K), td);
        }
        FormElement tp = at.todd_pair();
        EXPECT_EQ(tp, at.todd_pair_traces()) << cd.name;
        EXPECT_TRUE(at.pair_forms().d(tp).is_zero());
        FormElement hp = at.todd_half_pair();
        EXPECT_TRUE(at.pair_forms().d(hp).is_zero());
        int nb = l.m.nB();
        EXPECT_EQ(wedge(hp, hp) * Scalar((nb & 1) ? -1 : 1), tp);
    }
}

TEST_P(AtiyahModel, CompareToddFindsPrimitives) {
    Loaded l = load_with_random(GetParam(), 2);
    std::vector<std::unique_ptr<Transfer>> ts;
    std::vector<std::unique_ptr<Atiyah>> as;
    for (auto& cd : l.conns) {
        ts.push_back(std::make_unique<Transfer>(l.m, cd));
        as.push_back(std::make_unique<Atiyah>(*ts.back()));
    }
    int nontrivial = 0;
    for (size_t i = 0; i < as.size(); ++i)
        for (size_t j = 0; j < as.size(); ++j) {
            auto c = compare_todd(*as[i], *as[j]);
            EXPECT_TRUE(c.pass()) << c.conn_a << " vs " << c.conn_b;
            for (auto& it : c.items) {
                EXPECT_LE(it.window, 4);
                if (i == j) {
                    EXPECT_TRUE(it.delta.is_zero());
                    EXPECT_TRUE(it.primitive.is_zero());
                }
                nontrivial += !it.delta.is_zero();
            }
        }
    EXPECT_GT(nontrivial, 0);
}

INSTANTIATE_TEST_SUITE_P(Models, AtiyahModel, ::testing::Values("m1", "m2", "m3"));

TEST(Atiyah, M1Values) {
    ChartModel m = model("m1");
    Transfer flat(m, m.connection("flat")), tw(m, m.connection("twist"));
    Atiyah af(flat), at(tw);
    int N = m.n() + m.r();
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) EXPECT_TRUE(af.At(af.coord_field(i), af.coord_field(j)).is_zero());
    EXPECT_TRUE(mat_is_zero(af.r11_matrix()));
    // gamma_B = x along the transversal direction: R11 = xi (x) (b^dual (x) b)
    const PairForms& pf = at.pair_forms();
    FormElement xb = wedge(form_xi(0), pf.beta(0));
    EXPECT_EQ(at.r11_matrix().e[0][0], xb);
    EXPECT_EQ(af.todd_pair(), form_const(Scalar(-1)));
    EXPECT_EQ(at.todd_pair(), form_const(Scalar(-1)) + xb * Scalar(1, 2));
    EXPECT_EQ(at.todd_half_pair(), form_const(Scalar(1)) - xb * Scalar(1, 4));
    // the primitive of the R11 change is x beta
    auto c = compare_todd(at, af);
    bool seen = false;
    for (auto& it : c.items)
        if (it.side == "pair" && it.cocycle == "R11") {
            seen = true;
            EXPECT_EQ(pf.d(it.primitive), xb);
        }
    EXPECT_TRUE(seen);
}

TEST(Todd, SeriesCoefficients) {
    Series dg = todd_series(-1, 4), pr = todd_series(1, 4);
    Series want_dg{Scalar(1), Scalar(1, 2), Scalar(1, 12), Scalar(0), Scalar(-1, 720)};
    Series want_pr{Scalar(-1), Scalar(1, 2), Scalar(-1, 12), Scalar(0), Scalar(1, 720)};
    EXPECT_EQ(dg, want_dg);
    EXPECT_EQ(pr, want_pr);
    Series l = series_log(want_dg, 4);
    EXPECT_EQ(l[1], Scalar(1, 2));
    EXPECT_EQ(l[2], Scalar(-1, 24));
}

namespace {

// entries in a ring with four odd generators
FormElement rand_part(Rng& R, int parity, bool constant) {
    FormElement w;
    if (constant) w.add(FKey{}, Scalar(R.uni(-3, 3)));
    for (int t = 0; t < 2; ++t) {
        uint32_t S;
        do S = R.mask(4);
        while ((popcount(S) & 1) != parity || S == 0);
        w.add(FKey{Exp{}, S}, R.scalar());
    }
    return w;
}

SuperMatrix rand_super(Rng& R) {
    SuperMatrix m({0, 0, 1, 1});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            bool odd = (i < 2) != (j < 2);
            m.e[i][j] = rand_part(R, odd ? 1 : 0, !odd && !(i >= 2 && j >= 2));
        }
    // invertible constant odd-odd block
    Scalar a(R.uni(1, 3)), b(R.uni(-2, 2)), c(R.uni(-2, 2));
    m.e[2][2] += form_const(a);
    m.e[2][3] += form_const(b);
    m.e[3][2] += form_const(c);
    m.e[3][3] += form_const((b * c + Scalar(1)) / a);
    return m;
}

} // namespace

TEST(Berezinian, BasicCases) {
    SuperMatrix I = SuperMatrix::identity({0, 0, 1});
    EXPECT_EQ(berezinian(I), form_const(Scalar(1)));
    SuperMatrix d = SuperMatrix::identity({0, 1});
    FormElement omega(FKey{Exp{}, 0b11}, Scalar(3));
    d.e[0][0] += omega;
    EXPECT_EQ(berezinian(d), form_const(Scalar(1)) + omega);
    SuperMatrix s = SuperMatrix::identity({0, 1});
    s.e[1][1] = form_const(Scalar(2));
    EXPECT_EQ(berezinian(s), form_const(Scalar(1, 2)));
    SuperMatrix bad = SuperMatrix::identity({0, 1});
    bad.e[1][1] = FormElement(FKey{Exp{}, 0b11}, Scalar(1));
    EXPECT_THROW(berezinian(bad), berezinian_error);
}

TEST(Berezinian, Multiplicative) {
    Rng R(34);
    for (int i = 0; i < 16; ++i) {
        SuperMatrix a = rand_super(R), b = rand_super(R);
        EXPECT_EQ(berezinian(mat_mul(a, b)), wedge(berezinian(a), berezinian(b))) << i;
    }
}

TEST(Berezinian, InverseIsTwoSided) {
    Rng R(35);
    for (int i = 0; i < 4; ++i) {
        SuperMatrix a = rand_super(R);
        SuperMatrix D(std::vector<int>{1, 1});
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) D.e[p][q] = a.e[2 + p][2 + q];
        SuperMatrix Di = mat_inverse(D);
        EXPECT_EQ(mat_mul(D, Di), SuperMatrix::identity({1, 1}));
        EXPECT_EQ(mat_mul(Di, D), SuperMatrix::identity({1, 1}));
    }
}

TEST(Duflo, FlatIsHkrAndClosedPreserved) {
    for (std::string name : {"m1", "m3"}) {
        ChartModel m = model(name);
        WeightSystem ws(m);
        for (auto& cd : m.connections) {
            Transfer t(m, cd);
            Hochschild h(t);
            Atiyah at(t);
            FormElement half = at.todd_half_pair();
            bool unit = half == form_const(Scalar(1));
            Diff<PolyVecB> dv = [&](const PolyVecB& v) { return h.dBott(v); };
            Shower<PolyVecB> sv = [&](const PolyVecB& v) { return to_string(v, m.names); };
            int samples = 0, differs = 0;
            for (auto& w : weight_window({0, 0, 0, 0}, {3, 0, 2, 1})) {
                auto pieces = polyvec_b_pieces(ws, m.names, w);
                for (auto& [deg, b] : pieces) {
                    Basis<PolyVecB> all;
                    for (size_t j = 0; j < b.size(); ++j)
                        for (auto& [k, c] : dv(b.element(int(j)))) all.push(k);
                    for (auto& kv : rank_and_kernel(matrix_of_map(b, all, dv, sv)).kernel) {
                        PolyVecB v = b.combine(kv);
                        PolyOpB D = duflo_chain(h, half, v);
                        EXPECT_TRUE((h.dFU_poly(D) + h.dH(D)).is_zero()) << name << " " << sv(v);
                        if (unit) EXPECT_EQ(D, h.hkr(v));
                        differs += D != h.hkr(v);
                        ++samples;
                    }
                }
            }
            EXPECT_GT(samples, 10);
            if (!unit) EXPECT_GT(differs, 0);
        }
    }
}
