#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "learnrk/butcher.hpp"
#include "learnrk/errors.hpp"
#include "learnrk/roots.hpp"
#include "learnrk/stability.hpp"

namespace learnrk {

struct ProblemSpec {
    Complex lambda;
    double h = 1.0;

    Complex z() const { return lambda * h; }
};

inline void check_problem(const ProblemSpec& spec) {
    if (!(spec.h > 0.0) || !std::isfinite(spec.h)) {
        throw InvalidArgumentError("step size h must be positive and finite");
    }
    if (!std::isfinite(spec.lambda.real()) || !std::isfinite(spec.lambda.imag())) {
        throw NonFiniteError("lambda must be finite");
    }
}

enum class RootPolicyKind { ClosestToLambda, All, Index };

struct RootPolicy {
    RootPolicyKind kind = RootPolicyKind::ClosestToLambda;
    int index = 0;

    static RootPolicy closest() { return {RootPolicyKind::ClosestToLambda, 0}; }
    static RootPolicy all() { return {RootPolicyKind::All, 0}; }
    static RootPolicy at(int k) { return {RootPolicyKind::Index, k}; }
};

struct LearnabilityRoot {
    Complex alpha;
    double residual = 0.0;
    int multiplicity = 1;
};

struct Coefficients {
    std::optional<double> l_alpha;
    std::optional<double> l_real;
    std::optional<double> l_imag;
    std::optional<Complex> mu;
};

struct LearnabilityResult {
    std::vector<LearnabilityRoot> roots;  // sorted: |alpha - lambda| asc, then arg in [0, 2pi)
    std::vector<Complex> rejected;
    int formal_degree = 0;
    int deficiency = 0;
    std::optional<Complex> selected;
    Coefficients coeffs;
};

namespace detail {

inline double arg_in_02pi(Complex v) {
    constexpr double kTau = 6.283185307179586;
    double a = std::arg(v);
    if (a < 0.0) a += kTau;
    return a;
}

inline bool root_order(const Complex& lambda, const Complex& x, const Complex& y) {
    const double dx = std::abs(x - lambda);
    const double dy = std::abs(y - lambda);
    if (dx != dy) return dx < dy;
    const double ax = arg_in_02pi(x);
    const double ay = arg_in_02pi(y);
    if (ax != ay) return ax < ay;
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
}

}  // namespace detail

inline Complex growth_factor(const ProblemSpec& spec) {
    const Complex z = spec.z();
    if (std::abs(z.real()) > 700.0) {
        throw ExpOverflowError("|Re(h*lambda)| exceeds the double exponential range");
    }
    return std::exp(z);
}

/// Roots of P(w) = N(w) - rhs*D(w), reported as alpha = w/h. Roots landing on
/// D's zero set are rejected rather than returned; the degree bookkeeping
/// (formal degree, cancellation deficiency) is kept for the caller.
inline LearnabilityResult equation_roots(const RationalStabilityFunction& R, Complex rhs,
                                         double h) {
    LearnabilityResult out;

    const std::size_t n_terms =
        std::max(R.num_coeffs.size(), R.den_coeffs.size());
    std::vector<Complex> pcoeffs(n_terms, Complex(0.0, 0.0));
    for (std::size_t k = 0; k < n_terms; ++k) {
        Complex nk = k < R.num_coeffs.size() ? R.num_coeffs[k] : Complex(0.0, 0.0);
        Complex dk = k < R.den_coeffs.size() ? R.den_coeffs[k] : Complex(0.0, 0.0);
        pcoeffs[k] = nk - rhs * dk;
    }
    out.formal_degree = static_cast<int>(n_terms) - 1;

    // Leading coefficients that are pure cancellation noise (n_d - rhs*d_d
    // with both parts nonzero but nearly equal) drop the effective degree.
    constexpr double kEps = 2.220446049250313e-16;
    while (pcoeffs.size() > 1) {
        const std::size_t dtop = pcoeffs.size() - 1;
        const double n_mag =
            dtop < R.num_coeffs.size() ? std::abs(R.num_coeffs[dtop]) : 0.0;
        const double d_mag =
            dtop < R.den_coeffs.size() ? std::abs(R.den_coeffs[dtop]) : 0.0;
        const double scale = n_mag + std::abs(rhs) * d_mag;
        if (std::abs(pcoeffs.back()) <= 32.0 * kEps * scale) {
            pcoeffs.pop_back();
            out.deficiency += 1;
        } else {
            break;
        }
    }
    if (pcoeffs.size() <= 1) {
        throw NoRootsError("equation degenerates to a constant; no solutions");
    }

    std::vector<Complex> w = find_roots(pcoeffs);

    for (const ClusteredRoot& cluster : cluster_roots(w)) {
        if (std::abs(horner(R.den_coeffs, cluster.value)) < R.pole_tolerance) {
            for (int m = 0; m < cluster.multiplicity; ++m) out.rejected.push_back(cluster.value / h);
            continue;
        }
        const double residual =
            std::abs(horner(R.num_coeffs, cluster.value) - rhs * horner(R.den_coeffs, cluster.value));
        out.roots.push_back({cluster.value / h, residual, cluster.multiplicity});
    }
    return out;
}

inline std::vector<Complex> learnability_roots(const ButcherTableau& tableau,
                                               const ProblemSpec& spec) {
    check_problem(spec);
    const RationalStabilityFunction R = stability_function(tableau);
    LearnabilityResult r = equation_roots(R, growth_factor(spec), spec.h);
    std::vector<Complex> alphas;
    alphas.reserve(r.roots.size());
    for (const auto& root : r.roots) alphas.push_back(root.alpha);
    return alphas;
}

inline Complex select_alpha(const std::vector<Complex>& roots, const ProblemSpec& spec,
                            const RootPolicy& policy) {
    if (roots.empty()) throw NoRootsError("no surviving roots to select from");
    if (policy.kind == RootPolicyKind::All) {
        throw InvalidArgumentError("policy 'all' does not select a single root");
    }
    std::vector<Complex> sorted = roots;
    std::sort(sorted.begin(), sorted.end(), [&](const Complex& x, const Complex& y) {
        return detail::root_order(spec.lambda, x, y);
    });
    if (policy.kind == RootPolicyKind::ClosestToLambda) return sorted.front();
    if (policy.index < 0 || policy.index >= static_cast<int>(sorted.size())) {
        throw InvalidArgumentError("root index " + std::to_string(policy.index) +
                                   " out of range; have " + std::to_string(sorted.size()) +
                                   " roots");
    }
    return sorted[static_cast<std::size_t>(policy.index)];
}

/// Componentwise relative errors and the ratio mu = alpha/lambda. A zero
/// defining denominator gives an empty optional; the exact 0/0 case on a
/// single axis component is 0 (that component matches identically). lambda=0
/// leaves everything undefined.
inline Coefficients coefficients(Complex alpha, const ProblemSpec& spec) {
    Coefficients c;
    const Complex lambda = spec.lambda;
    if (lambda == Complex(0.0, 0.0)) return c;

    c.l_alpha = std::abs((alpha - lambda) / lambda);
    c.mu = alpha / lambda;
    if (lambda.real() != 0.0) {
        c.l_real = std::abs((alpha.real() - lambda.real()) / lambda.real());
    } else if (alpha.real() == 0.0) {
        c.l_real = 0.0;
    }
    if (lambda.imag() != 0.0) {
        c.l_imag = std::abs((alpha.imag() - lambda.imag()) / lambda.imag());
    } else if (alpha.imag() == 0.0) {
        c.l_imag = 0.0;
    }
    return c;
}

enum class Metric { LAlpha, LReal, LImag };

inline const char* metric_name(Metric m) {
    switch (m) {
        case Metric::LAlpha: return "l_alpha";
        case Metric::LReal: return "l_real";
        case Metric::LImag: return "l_imag";
    }
    return "l_alpha";
}

inline Metric metric_from_name(std::string_view name) {
    if (name == "l_alpha") return Metric::LAlpha;
    if (name == "l_real") return Metric::LReal;
    if (name == "l_imag") return Metric::LImag;
    throw InvalidArgumentError("unknown metric '" + std::string(name) +
                               "'; expected l_alpha, l_real, or l_imag");
}

inline std::optional<double> pick_metric(const Coefficients& c, Metric m) {
    switch (m) {
        case Metric::LAlpha: return c.l_alpha;
        case Metric::LReal: return c.l_real;
        case Metric::LImag: return c.l_imag;
    }
    return std::nullopt;
}

/// One grid-node evaluation: selected-root metric at (lambda, h) for a
/// prebuilt stability function. Any solver failure degrades to 'undefined'
/// instead of throwing, so sweeps survive isolated hard points.
inline std::optional<double> node_metric(const RationalStabilityFunction& R, Complex lambda,
                                         double h, const RootPolicy& policy, Metric metric) {
    try {
        ProblemSpec spec{lambda, h};
        LearnabilityResult r = equation_roots(R, growth_factor(spec), spec.h);
        if (r.roots.empty()) return std::nullopt;
        std::vector<Complex> alphas;
        alphas.reserve(r.roots.size());
        for (const auto& root : r.roots) alphas.push_back(root.alpha);
        Complex selected = select_alpha(alphas, spec, policy);
        return pick_metric(coefficients(selected, spec), metric);
    } catch (const Error&) {
        return std::nullopt;
    }
}

inline LearnabilityResult solve(const ButcherTableau& tableau, const ProblemSpec& spec,
                                const RootPolicy& policy) {
    check_problem(spec);
    const RationalStabilityFunction R = stability_function(tableau);
    LearnabilityResult result = equation_roots(R, growth_factor(spec), spec.h);

    std::sort(result.roots.begin(), result.roots.end(),
              [&](const LearnabilityRoot& x, const LearnabilityRoot& y) {
                  return detail::root_order(spec.lambda, x.alpha, y.alpha);
              });

    if (policy.kind != RootPolicyKind::All && !result.roots.empty()) {
        std::vector<Complex> alphas;
        alphas.reserve(result.roots.size());
        for (const auto& root : result.roots) alphas.push_back(root.alpha);
        result.selected = select_alpha(alphas, spec, policy);
        result.coeffs = coefficients(*result.selected, spec);
    }
    return result;
}

}  // namespace learnrk
