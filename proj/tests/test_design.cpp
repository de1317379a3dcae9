#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "learnrk/design.hpp"
#include "learnrk/stability.hpp"

using namespace learnrk;

TEST_CASE("shifted chebyshev polynomials expand exactly") {
    auto t1 = chebyshev_stability(1);
    REQUIRE(t1 == RationalPolynomial({Rational(1), Rational(1)}));

    auto t2 = chebyshev_stability(2);
    REQUIRE(t2 == RationalPolynomial({Rational(1), Rational(1), Rational(1, 8)}));

    // T3(x) = 4x^3 - 3x at x = 1 + z/9.
    auto t3 = chebyshev_stability(3);
    REQUIRE(t3 == RationalPolynomial(
                      {Rational(1), Rational(1), Rational(4, 27), Rational(4, 729)}));

    REQUIRE_THROWS_AS(chebyshev_stability(0), InvalidArgumentError);
}

TEST_CASE("chebyshev schemes are consistent at every stage count") {
    for (int s = 1; s <= 8; ++s) {
        auto poly = chebyshev_stability(s);
        REQUIRE(poly.degree() == s);
        REQUIRE(poly.coefficient(0) == 1);
        REQUIRE(poly.coefficient(1) == 1);
    }
}

TEST_CASE("chebyshev magnitude stays bounded on the stability interval") {
    for (int s : {1, 2, 3, 5}) {
        auto coeffs = to_complex_coefficients(chebyshev_stability(s));
        const double left = -2.0 * s * s;
        for (int k = 0; k < 10000; ++k) {
            double z = left * static_cast<double>(k) / 9999.0;
            REQUIRE(std::abs(horner(coeffs, Complex(z, 0.0))) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("two stage realization reproduces the quadratic exactly") {
    ButcherTableau t = realize_two_stage();
    auto R = stability_function(t);
    REQUIRE(R.numerator == chebyshev_stability(2));
    REQUIRE(R.denominator == RationalPolynomial::constant(Rational(1)));

    ValidationReport v = validate(t);
    REQUIRE(v.consistent);
    REQUIRE(v.is_explicit);
    REQUIRE(v.detected_order == 1);  // b.c = 1/8, so the order-2 condition fails
}

TEST_CASE("damping reach scan behavior") {
    ButcherTableau mid = builtin("explicit_midpoint");
    ButcherTableau cheb = builtin("cheb2");

    SECTION("huge tolerance hits the cap") {
        REQUIRE(damping_reach(builtin("explicit_euler"), 1e6) == 50.0);
    }
    SECTION("tolerance violated at the first node returns zero") {
        REQUIRE(damping_reach(mid, 1e-9) == 0.0);
    }
    SECTION("nondecreasing in the tolerance") {
        for (const ButcherTableau& t : {mid, cheb}) {
            double prev = 0.0;
            for (double tol : {0.05, 0.1, 0.2, 0.5}) {
                double reach = damping_reach(t, tol);
                REQUIRE(reach >= prev);
                prev = reach;
            }
        }
    }
    SECTION("pinned scan values") {
        REQUIRE(damping_reach(mid, 0.2) == Catch::Approx(0.6016).margin(5e-3));
        REQUIRE(damping_reach(cheb, 0.2) == Catch::Approx(0.5515).margin(5e-3));
        REQUIRE(damping_reach(cheb, 0.3) == Catch::Approx(0.9519).margin(5e-3));
        REQUIRE(damping_reach(mid, 0.3) == Catch::Approx(0.6516).margin(5e-3));
    }
    SECTION("chebyshev scheme wins once the tolerance passes the crossover") {
        // Near z = 0 the order-2 midpoint is more accurate, so for tight
        // tolerances its reach is longer; the chebyshev reach overtakes it
        // between tol = 0.2 and tol = 0.3 and stays ahead after that.
        REQUIRE(damping_reach(cheb, 0.3) > damping_reach(mid, 0.3));
        REQUIRE(damping_reach(cheb, 0.5) > damping_reach(mid, 0.5));
    }
    SECTION("invalid tolerance") {
        REQUIRE_THROWS_AS(damping_reach(mid, 0.0), InvalidArgumentError);
        REQUIRE_THROWS_AS(damping_reach(mid, -0.1), InvalidArgumentError);
    }
}

TEST_CASE("pointwise accuracy deep in the damping region favors cheb2") {
    auto mid = stability_function(builtin("explicit_midpoint"));
    auto cheb = stability_function(builtin("cheb2"));
    for (double z : {-2.0, -5.0, -10.0}) {
        auto lm = node_metric(mid, Complex(z, 0.0), 1.0, RootPolicy::closest(), Metric::LAlpha);
        auto lc = node_metric(cheb, Complex(z, 0.0), 1.0, RootPolicy::closest(), Metric::LAlpha);
        REQUIRE(*lc < *lm);
    }
}

TEST_CASE("polynomial only path matches the realized tableau") {
    REQUIRE(damping_reach(chebyshev_stability(2), 0.3) ==
            damping_reach(builtin("cheb2"), 0.3));
    // Higher stage counts have no tableau; the reach still scales up with s.
    double r3 = damping_reach(chebyshev_stability(3), 0.3);
    REQUIRE(r3 > 0.0);
}

TEST_CASE("designed scheme bundles") {
    DesignedScheme d2 = design_scheme(2, 0.3);
    REQUIRE(d2.stages == 2);
    REQUIRE(d2.realized_tableau.has_value());
    REQUIRE(d2.reach == Catch::Approx(0.9519).margin(5e-3));

    DesignedScheme d4 = design_scheme(4, 0.3);
    REQUIRE_FALSE(d4.realized_tableau.has_value());
    REQUIRE(d4.stability_poly.degree() == 4);
    REQUIRE(d4.reach > 0.0);
}
