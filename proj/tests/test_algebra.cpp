#include "support.hpp"

#include <gtest/gtest.h>

using namespace hcdg;
using namespace hcdg::test;

TEST(Scalar, GaussianArithmetic) {
    Scalar i = Scalar::imag_unit();
    EXPECT_EQ(i * i, Scalar(-1));
    EXPECT_EQ((Scalar(1, 2) + i).conj(), Scalar(1, 2) - i);
    EXPECT_EQ(Scalar(Scalar::parse_rational("-3/6")), Scalar(-1, 2));
}

TEST(Grammar, PolyRoundTrip) {
    ChartModel m = model("m2");
    for (std::string s : {"x*y^2", "1/2*x - w^3", "x*y*w + 2"}) {
        MultiPoly p = parse_poly(s, m.names);
        EXPECT_EQ(parse_poly(to_string(p, m.names), m.names), p) << s;
    }
    FormElement w = parse_form("xi2*xi1*x", m.names);
    EXPECT_EQ(w, -parse_form("x*xi1*xi2", m.names));
}

TEST(Grammar, KoszulSign) {
    EXPECT_EQ(koszul_sign({1, 0}, {1, 1}), Scalar(-1));
    EXPECT_EQ(koszul_sign({1, 0}, {1, 2}), Scalar(1));
    EXPECT_EQ(perm_parity({2, 0, 1}), 0);
}

TEST(Model, LoadsShippedModels) {
    for (auto nm : {"m1", "m2", "m3"}) {
        ChartModel m = model(nm);
        EXPECT_TRUE(m.perfect);
        EXPECT_FALSE(m.connections.empty());
    }
    EXPECT_TRUE(model("m3").complex);
}

TEST(Model, RejectsNonInvolutive) {
    std::string txt = R"({"coords":["x","y","z"],"F_frame":[["1","0","0"],["0","1","x"]],"B_lift":[["0","0","1"]]})";
    try {
        parse_model_text(txt);
        FAIL();
    } catch (const model_error& e) {
        EXPECT_NE(std::string(e.what()).find("non-involutive"), std::string::npos);
    }
}

TEST(Model, RejectsDegenerateAndBadConnection) {
    EXPECT_THROW(parse_model_text(R"({"coords":["x","y"],"F_frame":[["1","0"]],"B_lift":[["0","x"]]})"), model_error);
    EXPECT_THROW(parse_model_text(R"({"coords":["x","y"],"F_frame":[["1","0"]],"B_lift":[["0","1+x"]]})"), model_error);
    EXPECT_THROW(parse_model_text(R"({"coords":["x","y"],"F_frame":[["1","0"]],"B_lift":[["0","I"]]})"), model_error);
    // Bott part of nabla^B is fixed
    EXPECT_THROW(parse_model_text(R"({"coords":["x","y"],"F_frame":[["1","0"]],"B_lift":[["0","1"]],
        "connections":{"c":{"gamma_B":{"1,1,1":"1"}}}})"),
                 model_error);
    EXPECT_THROW(parse_model_text("{not json"), model_error);
}

TEST(Model, StructureFunctionsOfM2) {
    ChartModel m = model("m2");
    // [d_x, x d_x + d_y] = d_x
    EXPECT_EQ(m.C[0][1][0], poly_const(Scalar(1)));
    Sec c = m.frame_coeffs(bracket(m.E[0], m.E[2]));
    for (int k = 0; k < 3; ++k) EXPECT_EQ(c[k], m.C[0][2][k]);
}

TEST(Operators, dFSquaresToZeroAndActs) {
    for (auto nm : {"m1", "m2", "m3"}) {
        ChartModel m = model(nm);
        DiffOpF1 q = build_dF(m);
        EXPECT_TRUE(compose(q, q, m.names).is_zero()) << nm;
    }
    ChartModel m1 = model("m1");
    FormElement out = apply(build_dF(m1), parse_form("x*y^2", m1.names), m1.names);
    EXPECT_EQ(out, parse_form("y^2*xi1", m1.names));
}

TEST(Operators, CompositionIsAssociativeAndActsAsComposite) {
    ChartModel m = model("m2");
    Rng R(11);
    for (int t = 0; t < 20; ++t) {
        DiffOpF1 a = random_op(R, m.names), b = random_op(R, m.names), c = random_op(R, m.names);
        EXPECT_EQ(compose(compose(a, b, m.names), c, m.names), compose(a, compose(b, c, m.names), m.names));
        FormElement w = random_form(R, m.names);
        EXPECT_EQ(apply(compose(a, b, m.names), w, m.names), apply(a, apply(b, w, m.names), m.names));
    }
}

TEST(Operators, CoproductMatchesLeibniz) {
    ChartModel m = model("m2");
    Rng R(5);
    for (int t = 0; t < 40; ++t) {
        uint32_t T = R.mask(2);
        Slot s{R.exp(3, 3 - popcount(T)), T};
        DiffOpF1 D = slot_as_op<DiffOpF1>(s);
        FormElement a(FKey{R.exp(3, 2), R.mask(2)}, R.scalar()), b = random_form(R, m.names);
        int da = popcount(a.begin()->first.S);
        FormElement lhs = apply(D, wedge(a, b), m.names), rhs;
        for (auto& [c, s1, s2] : coproduct_pure(s, 3)) {
            FormElement t1 = wedge(apply(slot_as_op<DiffOpF1>(s1), a, m.names), apply(slot_as_op<DiffOpF1>(s2), b, m.names));
            rhs.add_scaled(t1, ((popcount(s2.T) * da) & 1) ? -c : c);
        }
        EXPECT_EQ(lhs, rhs);
    }
}

TEST(Operators, HorizontalLiftsAreDerivations) {
    ChartModel m = model("m2");
    Geometry g(m, m.connection("alt"));
    Rng R(3);
    for (int k = 0; k < m.n(); ++k) {
        DiffOpF1 e = hat_frame(g, k);
        EXPECT_EQ(max_order(e), 1);
        FormElement a = random_form(R, m.names), b = random_form(R, m.names);
        EXPECT_EQ(apply(e, wedge(a, b), m.names),
                  wedge(apply(e, a, m.names), b) + wedge(a, apply(e, b, m.names)));
    }
}

TEST(Hochschild, SquaresToZero) {
    ChartModel m = model("m2");
    Rng R(9);
    for (int ar = 0; ar <= 2; ++ar) {
        PolyOpF1 p = random_polyop(R, m.names, ar, 4, 1, 2);
        EXPECT_TRUE(hochschild_dH(hochschild_dH(p, 3), 3).is_zero()) << "arity " << ar;
    }
}

TEST(Hochschild, VectorFieldsAreCocycles) {
    ChartModel m = model("m2");
    DiffOpF1 q = build_dF(m);
    std::vector<DiffOpF1> v{q, dop_dxi(0), hat_frame(Geometry(m, m.connections[0]), 2)};
    for (auto& X : v) {
        PolyOpF1 p = tensor<PolyOpF1>(form_const(Scalar(1)), std::vector<DiffOpF1>{X});
        EXPECT_TRUE(hochschild_dH(p, 3).is_zero());
    }
}
