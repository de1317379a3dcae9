#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "learnrk/butcher.hpp"
#include "learnrk/errors.hpp"
#include "learnrk/polynomial.hpp"
#include "learnrk/rational.hpp"

namespace learnrk {

/// R(z) = N(z)/D(z) with exact rational coefficients. Common factors are kept
/// as constructed; callers that care about shared roots filter them explicitly.
struct RationalStabilityFunction {
    RationalPolynomial numerator;
    RationalPolynomial denominator;
    // Double images of the coefficients, cached for evaluation.
    std::vector<Complex> num_coeffs;
    std::vector<Complex> den_coeffs;
    double pole_tolerance = 1e-12;
};

namespace detail {

using RationalMatrix = std::vector<std::vector<Rational>>;

inline RationalMatrix matmul(const RationalMatrix& X, const RationalMatrix& Y) {
    const std::size_t p = X.size();
    RationalMatrix Z(p, std::vector<Rational>(p, Rational(0)));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t k = 0; k < p; ++k) {
            if (X[i][k] == 0) continue;
            for (std::size_t j = 0; j < p; ++j) Z[i][j] += X[i][k] * Y[k][j];
        }
    }
    return Z;
}

inline Rational trace(const RationalMatrix& X) {
    Rational t(0);
    for (std::size_t i = 0; i < X.size(); ++i) t += X[i][i];
    return t;
}

/// Coefficients a_0..a_p of det(tI - B) = sum_k a_k t^{p-k}, a_0 = 1,
/// by the Faddeev-LeVerrier recurrence.
inline std::vector<Rational> char_poly(const RationalMatrix& B) {
    const std::size_t p = B.size();
    std::vector<Rational> a(p + 1, Rational(0));
    a[0] = 1;
    RationalMatrix M(p, std::vector<Rational>(p, Rational(0)));
    for (std::size_t i = 0; i < p; ++i) M[i][i] = 1;
    for (std::size_t k = 1; k <= p; ++k) {
        RationalMatrix BM = matmul(B, M);
        a[k] = -trace(BM) / Rational(static_cast<long long>(k));
        M = std::move(BM);
        for (std::size_t i = 0; i < p; ++i) M[i][i] += a[k];
    }
    return a;
}

/// det(I + zB) as a polynomial in z: sum_k (-1)^k a_k z^k.
inline RationalPolynomial det_identity_plus(const RationalMatrix& B) {
    std::vector<Rational> a = char_poly(B);
    std::vector<Rational> coeffs(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        coeffs[k] = (k % 2 == 0) ? a[k] : -a[k];
    }
    return RationalPolynomial(std::move(coeffs));
}

}  // namespace detail

inline RationalStabilityFunction stability_function(const ButcherTableau& t) {
    const std::size_t p = static_cast<std::size_t>(t.p);

    // N uses B = ones*b^T - A, D uses B = -A.
    detail::RationalMatrix Bn(p, std::vector<Rational>(p, Rational(0)));
    detail::RationalMatrix Bd(p, std::vector<Rational>(p, Rational(0)));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            Bn[i][j] = t.b[j] - t.A[i][j];
            Bd[i][j] = -t.A[i][j];
        }
    }

    RationalStabilityFunction R;
    R.numerator = detail::det_identity_plus(Bn);
    R.denominator = detail::det_identity_plus(Bd);
    R.num_coeffs = to_complex_coefficients(R.numerator);
    R.den_coeffs = to_complex_coefficients(R.denominator);

    double scale = 1.0;
    for (const auto& c : R.den_coeffs) scale = std::max(scale, std::abs(c.real()));
    R.pole_tolerance = 1e-12 * scale;
    return R;
}

inline Complex eval_stability(const RationalStabilityFunction& R, Complex z) {
    Complex den = horner(R.den_coeffs, z);
    if (std::abs(den) < R.pole_tolerance) {
        throw PoleError("stability function pole near z = " + std::to_string(z.real()) + "+" +
                        std::to_string(z.imag()) + "i");
    }
    return horner(R.num_coeffs, z) / den;
}

/// First `count` Taylor coefficients of N/D about 0, exact (D(0) = 1).
inline std::vector<Rational> taylor_coefficients(const RationalStabilityFunction& R,
                                                 std::size_t count) {
    std::vector<Rational> t(count, Rational(0));
    const Rational d0 = R.denominator.coefficient(0);
    for (std::size_t k = 0; k < count; ++k) {
        Rational s = R.numerator.coefficient(k);
        for (std::size_t j = 1; j <= k; ++j) {
            s -= R.denominator.coefficient(j) * t[k - j];
        }
        t[k] = s / d0;
    }
    return t;
}

}  // namespace learnrk
