#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "learnrk/errors.hpp"
#include "learnrk/polynomial.hpp"

namespace learnrk {

namespace detail {

/// sum_k |c_k| r^k, the natural backward-error scale at |z| = r.
inline double magnitude_bound(const std::vector<Complex>& coeffs, double r) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * r + std::abs(coeffs[i]);
    return acc;
}

}  // namespace detail

/// All complex roots (with multiplicity) of sum_k coeffs[k] z^k, found by
/// Aberth-Ehrlich simultaneous iteration and polished with Newton steps.
/// Input is trimmed of exactly-zero leading coefficients only; callers decide
/// what counts as numerically zero for their problem.
inline std::vector<Complex> find_roots(std::vector<Complex> coeffs) {
    while (!coeffs.empty() && coeffs.back() == Complex(0.0, 0.0)) coeffs.pop_back();
    if (coeffs.size() <= 1) throw NoRootsError("polynomial is constant, nothing to solve");

    const int d = static_cast<int>(coeffs.size()) - 1;
    std::vector<Complex> monic(coeffs.size());
    for (int k = 0; k <= d; ++k) monic[k] = coeffs[k] / coeffs[d];
    std::vector<Complex> deriv(d);
    for (int k = 1; k <= d; ++k) deriv[k - 1] = monic[k] * static_cast<double>(k);

    double radius = 0.0;
    for (int k = 0; k < d; ++k) radius = std::max(radius, std::abs(monic[k]));
    radius = 1.0 + radius;

    // Offset angle keeps guesses off the axes, where symmetric problems would
    // make the Aberth correction terms cancel.
    std::vector<Complex> w(d);
    constexpr double kTau = 6.283185307179586;
    for (int j = 0; j < d; ++j) {
        double theta = kTau * static_cast<double>(j) / static_cast<double>(d) + 0.4;
        w[j] = radius * Complex(std::cos(theta), std::sin(theta));
    }

    constexpr double kEps = 2.220446049250313e-16;
    constexpr int kMaxIter = 500;
    bool converged = false;
    for (int iter = 0; iter < kMaxIter && !converged; ++iter) {
        converged = true;
        for (int i = 0; i < d; ++i) {
            const Complex pw = horner(monic, w[i]);
            if (std::abs(pw) <= 8.0 * kEps * detail::magnitude_bound(monic, std::abs(w[i]))) {
                continue;
            }
            const Complex dpw = horner(deriv, w[i]);
            Complex newton;
            if (std::abs(dpw) > 0.0) {
                newton = pw / dpw;
            } else {
                w[i] += 0.001 * radius * Complex(0.7, 0.7);
                converged = false;
                continue;
            }
            Complex repulsion(0.0, 0.0);
            for (int j = 0; j < d; ++j) {
                if (j == i) continue;
                Complex diff = w[i] - w[j];
                if (std::abs(diff) == 0.0) diff = Complex(kEps * radius, kEps * radius);
                repulsion += Complex(1.0, 0.0) / diff;
            }
            const Complex denom = Complex(1.0, 0.0) - newton * repulsion;
            Complex step;
            if (std::abs(denom) < 1e-300) {
                step = newton;
            } else {
                step = newton / denom;
            }
            w[i] -= step;
            if (std::abs(step) > 1e-14 * (1.0 + std::abs(w[i]))) converged = false;
        }
    }
    if (!converged) {
        throw ConvergenceError("root iteration did not converge within 500 sweeps", w);
    }

    // Newton polish; accepted only when the residual actually shrinks, so
    // multiple roots (where Newton stalls) are left at the Aberth result.
    for (int i = 0; i < d; ++i) {
        for (int step = 0; step < 3; ++step) {
            const Complex pw = horner(monic, w[i]);
            const Complex dpw = horner(deriv, w[i]);
            if (std::abs(dpw) == 0.0) break;
            const Complex cand = w[i] - pw / dpw;
            if (std::abs(horner(monic, cand)) < std::abs(pw)) {
                w[i] = cand;
            } else {
                break;
            }
        }
    }
    return w;
}

struct ClusteredRoot {
    Complex value;
    int multiplicity = 1;
};

/// Greedy clustering at relative distance `rel_tol`; the representative is the
/// mean of the cluster members.
inline std::vector<ClusteredRoot> cluster_roots(const std::vector<Complex>& roots,
                                                double rel_tol = 1e-8) {
    std::vector<ClusteredRoot> clusters;
    std::vector<Complex> sums;
    for (const Complex& r : roots) {
        bool placed = false;
        for (std::size_t k = 0; k < clusters.size(); ++k) {
            const double scale = std::max({1.0, std::abs(r), std::abs(clusters[k].value)});
            if (std::abs(r - clusters[k].value) <= rel_tol * scale) {
                clusters[k].multiplicity += 1;
                sums[k] += r;
                clusters[k].value = sums[k] / static_cast<double>(clusters[k].multiplicity);
                placed = true;
                break;
            }
        }
        if (!placed) {
            clusters.push_back({r, 1});
            sums.push_back(r);
        }
    }
    return clusters;
}

}  // namespace learnrk
