#include "pcorr/constants.hpp"

#include <gtest/gtest.h>

using namespace pcorr;

namespace {

double uniform(std::span<const double>) { return 0.25; }

// Slope-normalized MC volume V(lambda) / lambda at a single threshold.
double mc_normalized(const VolumeCurve& c) { return c.estimate[0] / c.lambda[0]; }

} // namespace

TEST(Quadrature, GaussLegendreIsExactOnPolynomials) {
    for (unsigned order : {2u, 5u, 64u, 128u}) {
        const auto& [x, w] = gauss_legendre(order);
        ASSERT_EQ(x.size(), order);
        double s = 0, s2 = 0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            s += w[k];
            s2 += w[k] * x[k] * x[k];
        }
        EXPECT_NEAR(s, 2.0, 1e-13);
        EXPECT_NEAR(s2, 2.0 / 3, 1e-13);
    }
    EXPECT_THROW(gauss_legendre(1), InputError);
}

TEST(Quadrature, BoxRulesByDimension) {
    auto f = [](std::span<const double> x) {
        double s = 1;
        for (double v : x) s *= std::exp(v);
        return s;
    };
    const double e1 = std::exp(1.0) - 1;
    for (std::size_t d = 0; d <= 6; ++d) {
        QuadratureSpec spec;
        spec.mc_n = 200000;
        auto r = integrate_box(f, std::vector<double>(d, 0.0), std::vector<double>(d, 1.0), spec);
        const double exact = std::pow(e1, static_cast<double>(d));
        if (d <= 4)
            EXPECT_NEAR(r.value, exact, 1e-8) << r.method;
        else
            EXPECT_NEAR(r.value, exact, 4 * r.error) << r.method;
    }
    EXPECT_EQ(integrate_box(f, {0, 0}, {1, 1}).method, "gauss-legendre-64");
    EXPECT_EQ(integrate_box(f, {0, 0, 0}, {1, 1, 1}).method, "gauss-kronrod-15");
    EXPECT_THROW(integrate_box(f, {0}, {0}), InputError);
}

TEST(Quadrature, RootSolver) {
    auto h = [](double t) { return t * t * t - 0.2; };
    auto dh = [](double t) { return 3 * t * t; };
    EXPECT_NEAR(*solve_on_interval(h, dh, -1, 1), std::cbrt(0.2), 1e-14);
    EXPECT_FALSE(solve_on_interval(h, dh, -1, 0.5).has_value());
    // Newton leaves the bracket from a flat midpoint; bisection recovers.
    auto s = [](double t) { return std::tanh(20 * (t - 0.9)); };
    auto ds = [](double t) { return 20 / std::pow(std::cosh(20 * (t - 0.9)), 2); };
    EXPECT_NEAR(*solve_on_interval(s, ds, -1, 1), 0.9, 1e-12);
}

TEST(Constants, BallClosedForm) {
    EXPECT_NEAR(ball_constant(2), std::numbers::pi / 4, 1e-15);
    EXPECT_NEAR(ball_constant(1), 1.0, 1e-15);
    EXPECT_NEAR(ball_constant(4), std::numbers::pi * std::numbers::pi / 32, 1e-15);
    EXPECT_THROW(ball_constant(0), InputError);
    // Independent oracle: MC volume of the d-ball tube at small lambda.
    auto c = poly_volume(parse_poly("x^2 + y^2 + z^2"), ParamSpace::cube(3), [] {
        VolumeOptions o;
        o.grid = {1e-2};
        o.seed = 4;
        return o;
    }());
    EXPECT_NEAR(c.estimate[0] / std::pow(1e-2, 1.5), ball_constant(3), 3 * c.std_err[0] / std::pow(1e-2, 1.5));
}

TEST(Constants, TreeClosedForms) {
    EXPECT_EQ(tree_constant_exact(TreeKind::Chain, 6), Rational(1, 24));
    EXPECT_DOUBLE_EQ(tree_constants(TreeKind::Chain, 6), 1.0 / 24);
    EXPECT_DOUBLE_EQ(tree_constants(TreeKind::Star, 6), 20.0);
    EXPECT_DOUBLE_EQ(tree_constants(TreeKind::Star, 10), 120.0);
    EXPECT_DOUBLE_EQ(tree_constants(TreeKind::Chain, 3), 1.0);
    EXPECT_THROW(tree_constants(TreeKind::Star, 2), InputError);
}

TEST(Constants, SmoothLinear) {
    const auto ring = make_ring({"x", "y"});
    auto one = [](std::span<const double>) { return 1.0; };
    for (double c : {0.0, 0.3, -0.7}) {
        // x - c on [-1,1]^2 is x on the shifted box.
        auto r = smooth_constant(parse_poly("x", ring), one, uniform, {-1 - c, -1}, {1 - c, 1}, 0);
        EXPECT_NEAR(r.value, 1.0, 1e-13) << c;
    }
    // Nodes whose slice misses the hypersurface contribute zero: x = y on [0,1] x [-1,1].
    auto half = smooth_constant(parse_poly("x - y"), one, [](std::span<const double>) { return 0.5; }, {0, -1}, {1, 1},
                                0, [] {
                                    QuadratureSpec s;
                                    s.order = 200;
                                    return s;
                                }());
    // Exact: 2 * 0.5 * |W| with W = [0,1].
    EXPECT_NEAR(half.value, 1.0, 1e-2);
}

TEST(Constants, K3TransversalIntegral) {
    auto r = k3_transversal_integral();
    EXPECT_NEAR(r.value, 5.4829790759, 1e-6);
    // Midpoint-rule oracle on a fine grid.
    const int n = 2000;
    double s = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const double x = -1 + (a + 0.5) * 2.0 / n, y = -1 + (b + 0.5) * 2.0 / n;
            s += std::sqrt(1 + y * y) * std::sqrt(1 + x * x + x * x * y * y);
        }
    EXPECT_NEAR(r.value, s * 4.0 / n / n, 1e-5);
    // The tube constant is 2 * (1/8) times the integral.
    auto c = named_constant("k3-1.2g3-tube");
    EXPECT_NEAR(c.value, 2 * 0.125 * r.value, 1e-9);
}

TEST(Constants, SmoothAgainstMonteCarlo) {
    Dag k3 = Dag::make_family(Family::Complete, 3);
    const Triple t(1, 2, {3});
    auto c = smooth_tube_constant(k3, t, ParamSpace::cube(3), k3.ring()->var("a12").index);
    VolumeOptions o;
    o.grid = {1e-3};
    o.seed = 12;
    auto v = tube_volume(k3, t, ParamSpace::cube(3), o);
    const double se = v.std_err[0] / 1e-3;
    EXPECT_NEAR(mc_normalized(v), c.value, 0.05 * c.value);
    EXPECT_NEAR(mc_normalized(v), c.value, 3 * se);
}

TEST(Constants, MonomialPlanarTubes) {
    auto one = [](std::span<const double>) { return 1.0; };
    EXPECT_NEAR(monomial_constant({1, 0}, one, uniform, {-1, -1}, {1, 1}, RlctPair(1, 1, 1)).value, 1.0, 1e-13);
    EXPECT_NEAR(monomial_constant({1, 1}, one, uniform, {-1, -1}, {1, 1}, RlctPair(1, 1, 2)).value, 1.0, 1e-13);
    EXPECT_NEAR(named_constant("x2y3").value, 3.0, 1e-10);
    EXPECT_NEAR(named_constant("xy").value, 1.0, 1e-13);
    // Inconsistent pair: the second coordinate exponent reaches 1.
    EXPECT_THROW(monomial_constant({1, 2}, one, uniform, {-1, -1}, {1, 1}, RlctPair(1, 1, 1)), NumericalError);
    EXPECT_THROW(monomial_constant({1, 1}, one, uniform, {-1, -1}, {1, 1}, RlctPair(1, 1, 3)), InputError);
    EXPECT_THROW(monomial_constant({1, 1}, one, uniform, {0, -1}, {1, 1}, RlctPair(1, 1, 2)), InputError);
}

TEST(Constants, MonomialWithPositiveCofactor) {
    // f = x^2 * (1 + y^2) on [-1,1]^2: C = (2 ell) / ell * (1/4) * int (1+y^2)^(-1/2) dy, ell = 1/2.
    auto g = [](std::span<const double> x) { return 1 + x[1] * x[1]; };
    auto r = monomial_constant({2, 0}, g, uniform, {-1, -1}, {1, 1}, RlctPair(1, 2, 1));
    EXPECT_NEAR(r.value, 2 * 0.25 * 2 * std::asinh(1.0), 1e-12);
    VolumeOptions o;
    o.grid = {1e-4};
    o.seed = 21;
    auto v = poly_volume(parse_poly("x^2 + x^2*y^2"), ParamSpace::cube(2), o);
    EXPECT_NEAR(v.estimate[0] / 1e-2, r.value, 3 * v.std_err[0] / 1e-2 + 1e-3);
}

TEST(Constants, ChainAndStarFromMinors) {
    for (int p = 3; p <= 6; ++p) {
        Dag c = Dag::make_family(Family::Chain, p);
        auto r = monomial_tube_constant(c, Triple(1, p, {}), ParamSpace::cube(p - 1), RlctPair(1, 1, p - 1));
        EXPECT_NEAR(r.value, tree_constants(TreeKind::Chain, p), 1e-12) << p;
    }
    for (int p : {5, 6}) {
        auto s = named_constant("star-tube", p);
        EXPECT_NEAR(s.value, p / 3.0, 1e-7) << p;
        // Union assembly over the C(p-1,2) leaf pairs.
        EXPECT_NEAR((p - 1) * (p - 2) / 2 * s.value, tree_constants(TreeKind::Star, p), 1e-6);
    }
}

TEST(Constants, TripartBallRadialPath) {
    auto r = tripart_ball_constant(6);
    EXPECT_NEAR(r.value, 4.0, 1e-12);
    for (int p = 7; p <= 10; ++p) EXPECT_NEAR(tripart_ball_constant(p).value, 2 + 2.0 / (p - 5), 1e-12);
    EXPECT_THROW(tripart_ball_constant(5), InputError);
    // Shell-by-shell oracle: the uniform ball law of |x|^2 has density (k/2) g^(k/2 - 1).
    double acc = 0;
    const int n = 2000000;
    for (int a = 0; a < n; ++a) {
        const double g = (a + 0.5) / n;
        acc += (1 + g) / g * 1.5 * std::sqrt(g) / n;
    }
    EXPECT_NEAR(acc, 4.0, 1e-3);
}

TEST(Constants, DoublingOrderConverges) {
    QuadratureSpec a, b;
    b.order = 128;
    EXPECT_LT(std::abs(k3_transversal_integral(a).value - k3_transversal_integral(b).value), a.tol);
    EXPECT_LT(std::abs(named_constant("x2y3", 6, a).value - named_constant("x2y3", 6, b).value), a.tol);
    QuadratureSpec c;
    c.tol = 1e-10;
    EXPECT_LT(std::abs(named_constant("star-tube", 6, a).value - named_constant("star-tube", 6, c).value), 1e-7);
}

TEST(Constants, NamedReportJson) {
    auto c = named_constant("chain", 6);
    EXPECT_EQ(c.name, "chain6");
    auto j = c.to_json();
    EXPECT_DOUBLE_EQ(j["value"].get<double>(), 1.0 / 24);
    EXPECT_EQ(j["method"], "closed-form");
    EXPECT_TRUE(j.contains("tol_or_stderr"));
    EXPECT_NEAR(named_constant("k3-1.2g3").value, 5.4829790759, 1e-6);
    EXPECT_NEAR(named_constant("tripart-ball", 6).value, 4.0, 1e-12);
    EXPECT_NEAR(named_constant("ball", 2).value, std::numbers::pi / 4, 1e-15);
    EXPECT_THROW(named_constant("nope"), InputError);
}
