#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "learnrk/rng.hpp"
#include "learnrk/stability.hpp"

using namespace learnrk;

namespace {

RationalPolynomial poly(std::initializer_list<Rational> coeffs) {
    return RationalPolynomial(std::vector<Rational>(coeffs));
}

// 1 + z*b^T (I - zA)^{-1} 1 by a dense complex solve; the reference the
// rational construction must agree with.
Complex direct_eval(const ButcherTableau& t, Complex z) {
    const int p = t.p;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) M(i, j) -= z * to_double(t.A[i][j]);
    }
    Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(p);
    Eigen::VectorXcd k = M.partialPivLu().solve(ones);
    Complex acc(0.0, 0.0);
    for (int i = 0; i < p; ++i) acc += to_double(t.b[i]) * k(i);
    return Complex(1.0, 0.0) + z * acc;
}

}  // namespace

TEST_CASE("stability polynomials of the built-ins are exact") {
    auto R = stability_function(builtin("explicit_euler"));
    REQUIRE(R.numerator == poly({1, 1}));
    REQUIRE(R.denominator == poly({1}));

    R = stability_function(builtin("explicit_midpoint"));
    REQUIRE(R.numerator == poly({1, 1, Rational(1, 2)}));
    REQUIRE(R.denominator == poly({1}));

    R = stability_function(builtin("heun2"));
    REQUIRE(R.numerator == poly({1, 1, Rational(1, 2)}));

    R = stability_function(builtin("rk4"));
    REQUIRE(R.numerator ==
            poly({1, 1, Rational(1, 2), Rational(1, 6), Rational(1, 24)}));
    REQUIRE(R.denominator == poly({1}));

    R = stability_function(builtin("cheb2"));
    REQUIRE(R.numerator == poly({1, 1, Rational(1, 8)}));
    REQUIRE(R.denominator == poly({1}));

    R = stability_function(builtin("implicit_euler"));
    REQUIRE(R.numerator == poly({1}));
    REQUIRE(R.denominator == poly({1, -1}));

    R = stability_function(builtin("implicit_midpoint"));
    REQUIRE(R.numerator == poly({1, Rational(1, 2)}));
    REQUIRE(R.denominator == poly({1, Rational(-1, 2)}));
}

TEST_CASE("numerator and denominator are normalized at zero") {
    for (const auto& name : builtin_names()) {
        auto R = stability_function(builtin(name));
        REQUIRE(R.numerator.coefficient(0) == 1);
        REQUIRE(R.denominator.coefficient(0) == 1);
        ButcherTableau t = builtin(name);
        REQUIRE(R.numerator.degree() <= t.p);
        REQUIRE(R.denominator.degree() <= t.p);
        if (t.is_explicit) REQUIRE(R.denominator == poly({1}));
    }
}

TEST_CASE("evaluation matches exact rational horner") {
    auto R = stability_function(builtin("rk4"));
    // 1 - 4 + 8 - 32/3 + 32/3 at z = -4, summed exactly.
    Rational exact = R.numerator.evaluate(Rational(-4));
    REQUIRE(exact == Rational(5));
    REQUIRE(eval_stability(R, Complex(-4.0, 0.0)).real() == Catch::Approx(5.0).epsilon(1e-14));
    REQUIRE(eval_stability(R, Complex(0.0, 0.0)) == Complex(1.0, 0.0));
}

TEST_CASE("implicit euler pole is reported") {
    auto R = stability_function(builtin("implicit_euler"));
    REQUIRE_THROWS_AS(eval_stability(R, Complex(1.0, 0.0)), PoleError);
    REQUIRE(std::abs(eval_stability(R, Complex(-1.0, 0.0)) - Complex(0.5, 0.0)) < 1e-15);
}

TEST_CASE("evaluation agrees with a direct complex linear solve") {
    Rng rng(20260814);
    for (const auto& name : builtin_names()) {
        ButcherTableau t = builtin(name);
        auto R = stability_function(t);
        int checked = 0;
        while (checked < 200) {
            Complex z(rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0));
            if (std::abs(horner(R.den_coeffs, z)) <= 1e-6) continue;
            ++checked;
            Complex via_poly = eval_stability(R, z);
            Complex via_solve = direct_eval(t, z);
            REQUIRE(std::abs(via_poly - via_solve) < 1e-10 * (1.0 + std::abs(via_poly)));
        }
    }
}

TEST_CASE("taylor series starts as the exponential up to the classical order") {
    for (const auto& name : builtin_names()) {
        ButcherTableau t = builtin(name);
        int q = validate(t).detected_order;
        auto R = stability_function(t);
        auto coeffs = taylor_coefficients(R, static_cast<std::size_t>(q) + 1);
        Rational factorial(1);
        for (int k = 0; k <= q; ++k) {
            if (k > 0) factorial *= k;
            REQUIRE(coeffs[static_cast<std::size_t>(k)] == Rational(1) / factorial);
        }
    }
}

TEST_CASE("implicit midpoint taylor expansion is the pade 1/1 series") {
    auto R = stability_function(builtin("implicit_midpoint"));
    auto c = taylor_coefficients(R, 4);
    REQUIRE(c[0] == 1);
    REQUIRE(c[1] == 1);
    REQUIRE(c[2] == Rational(1, 2));
    REQUIRE(c[3] == Rational(1, 4));  // diverges from 1/6 beyond the order
}
