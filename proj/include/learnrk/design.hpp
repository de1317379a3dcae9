#pragma once

#include <cmath>
#include <optional>

#include "learnrk/learnability.hpp"
#include "learnrk/polynomial.hpp"

namespace learnrk {

/// T_s(1 + z/s^2) expanded in monomials, exactly. The shift maps the
/// Chebyshev equioscillation interval [-1, 1] onto z in [-2s^2, 0].
inline RationalPolynomial chebyshev_stability(int s) {
    if (s < 1) throw InvalidArgumentError("stage count must be at least 1");
    const Rational inv_s2 = Rational(1) / Rational(static_cast<long long>(s) * s);
    RationalPolynomial x({Rational(1), inv_s2});

    RationalPolynomial prev = RationalPolynomial::constant(Rational(1));
    RationalPolynomial cur = x;
    for (int k = 2; k <= s; ++k) {
        RationalPolynomial next = Rational(2) * (x * cur) - prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// Explicit 2-stage scheme with stability polynomial 1 + z + z^2/8. Any
/// (a21, b2) with b2*a21 = 1/8 works; a21 = 1/2 keeps the midpoint stage
/// structure, leaving b = (3/4, 1/4).
inline ButcherTableau realize_two_stage() {
    ButcherTableau t = builtin("cheb2");
    return t;
}

/// Largest |z| reach r0 (capped at 50) such that the closest-root l_alpha
/// stays at or below tol on the scan grid over [-r0, -1e-3]. The grid is the
/// fixed 1000-point uniform sampling of [-50, -1e-3]; the scan walks from the
/// node nearest 0 leftward and stops at the first violation.
inline double damping_reach(const RationalStabilityFunction& R, double tol) {
    if (!(tol > 0.0)) throw InvalidArgumentError("tolerance must be positive");
    constexpr int kNodes = 1000;
    constexpr double kNear = -1e-3;
    constexpr double kFar = -50.0;

    double reach = 0.0;
    for (int k = 0; k < kNodes; ++k) {
        const double z = kNear + (kFar - kNear) * static_cast<double>(k) /
                                     static_cast<double>(kNodes - 1);
        std::optional<double> l =
            node_metric(R, Complex(z, 0.0), 1.0, RootPolicy::closest(), Metric::LAlpha);
        if (!l || *l > tol) return reach;
        reach = -z;
    }
    return 50.0;
}

inline double damping_reach(const ButcherTableau& tableau, double tol) {
    return damping_reach(stability_function(tableau), tol);
}

/// Polynomial-only path: treats `poly` itself as R(z) with denominator 1, for
/// stage counts that have no realized tableau.
inline double damping_reach(const RationalPolynomial& poly, double tol) {
    RationalStabilityFunction R;
    R.numerator = poly;
    R.denominator = RationalPolynomial::constant(Rational(1));
    R.num_coeffs = to_complex_coefficients(R.numerator);
    R.den_coeffs = to_complex_coefficients(R.denominator);
    R.pole_tolerance = 1e-12;
    return damping_reach(R, tol);
}

struct DesignedScheme {
    int stages = 0;
    RationalPolynomial stability_poly;
    std::optional<ButcherTableau> realized_tableau;
    double tol = 0.0;
    double reach = 0.0;
};

inline DesignedScheme design_scheme(int s, double tol) {
    DesignedScheme d;
    d.stages = s;
    d.stability_poly = chebyshev_stability(s);
    d.tol = tol;
    if (s == 2) {
        d.realized_tableau = realize_two_stage();
        d.reach = damping_reach(*d.realized_tableau, tol);
    } else {
        d.reach = damping_reach(d.stability_poly, tol);
    }
    return d;
}

}  // namespace learnrk
