// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "learnrk/butcher.hpp"
#include "learnrk/design.hpp"
#include "learnrk/grid.hpp"
#include "learnrk/learnability.hpp"
#include "learnrk/rng.hpp"
#include "learnrk/stability.hpp"
#include "learnrk/trainer.hpp"

using namespace learnrk;

namespace {

struct Gate {
    int failures = 0;

    void report(int num, const char* label, bool ok, const std::string& detail) {
        std::printf("%s  %2d  %-28s %s\n", ok ? "PASS" : "FAIL", num, label, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string format_secs(double s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.2fs)", s);
    return buf;
}

const std::vector<std::string>& explicit_names() {
    static const std::vector<std::string> names = {"explicit_euler", "explicit_midpoint", "heun2",
                                                   "rk4", "cheb2"};
    return names;
}

// Random (lambda, h) with |h*lambda| <= 5, bounded away from zero so relative
// comparisons stay meaningful.
struct Draw {
    Complex lambda;
    double h;
};

Draw draw_problem(Rng& rng) {
    const double r = rng.uniform(0.05, 5.0);
    const double theta = rng.uniform(0.0, 6.283185307179586);
    const Complex z = std::polar(r, theta);
    const double h = std::exp(rng.uniform(-2.0, 1.0));
    return {z / h, h};
}

bool criterion_euler_oracle(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    ButcherTableau t = builtin("explicit_euler");
    Rng rng(101);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Draw d = draw_problem(rng);
        ProblemSpec spec{d.lambda, d.h};
        std::vector<Complex> roots = learnability_roots(t, spec);
        if (roots.size() != 1) {
            detail = "expected exactly one root";
            return false;
        }
        const Complex exact = (std::exp(spec.z()) - 1.0) / d.h;
        worst = std::max(worst, std::abs(roots[0] - exact) / std::abs(exact));
    }
    const double secs = seconds_since(start);
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst rel %.2e %s", worst, format_secs(secs).c_str());
    detail = buf;
    return worst <= 1e-10 && secs < 1.0;
}

bool criterion_midpoint_oracle(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    ButcherTableau t = builtin("explicit_midpoint");
    Rng rng(202);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Draw d = draw_problem(rng);
        // A nearly double root (discriminant ~ 0) is a conditioning question,
        // not an oracle question; redraw those inputs.
        while (std::abs(2.0 * std::exp(d.lambda * d.h) - 1.0) < 1e-4) d = draw_problem(rng);
        ProblemSpec spec{d.lambda, d.h};
        std::vector<Complex> roots = learnability_roots(t, spec);
        if (roots.size() != 2) {
            detail = "expected exactly two roots";
            return false;
        }
        const Complex w = std::sqrt(2.0 * std::exp(spec.z()) - 1.0);
        std::vector<Complex> exact = {(-1.0 + w) / d.h, (-1.0 - w) / d.h};
        auto by_re_im = [](Complex a, Complex b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        };
        std::sort(roots.begin(), roots.end(), by_re_im);
        std::sort(exact.begin(), exact.end(), by_re_im);
        for (int k = 0; k < 2; ++k) {
            worst = std::max(worst, std::abs(roots[static_cast<std::size_t>(k)] -
                                             exact[static_cast<std::size_t>(k)]) /
                                        std::max(1.0, std::abs(exact[static_cast<std::size_t>(k)])));
        }
    }
    const double secs = seconds_since(start);
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst rel %.2e %s", worst, format_secs(secs).c_str());
    detail = buf;
    return worst <= 1e-10 && secs < 1.0;
}

RationalPolynomial poly_from(const std::vector<Rational>& coeffs) {
    return RationalPolynomial(coeffs);
}

bool criterion_stability_exact(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    struct Expected {
        const char* name;
        std::vector<Rational> num;
        std::vector<Rational> den;
    };
    const Rational one(1);
    const std::vector<Expected> table = {
        {"explicit_euler", {one, one}, {one}},
        {"explicit_midpoint", {one, one, Rational(1, 2)}, {one}},
        {"rk4", {one, one, Rational(1, 2), Rational(1, 6), Rational(1, 24)}, {one}},
        {"cheb2", {one, one, Rational(1, 8)}, {one}},
        {"implicit_euler", {one}, {one, Rational(-1)}},
    };
    for (const Expected& e : table) {
        RationalStabilityFunction R = stability_function(builtin(e.name));
        if (R.numerator != poly_from(e.num) || R.denominator != poly_from(e.den)) {
            detail = std::string("mismatch for ") + e.name;
            return false;
        }
    }
    if (chebyshev_stability(2) != poly_from({one, one, Rational(1, 8)})) {
        detail = "shifted Chebyshev s=2 mismatch";
        return false;
    }
    const double secs = seconds_since(start);
    detail = format_secs(secs);
    return secs < 1.0;
}

bool criterion_residual_certificate(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    ButcherTableau t = builtin("rk4");
    RationalStabilityFunction R = stability_function(t);
    Region region;
    double worst = 0.0;
    long root_count = 0;
    for (int j = 0; j < region.ny; ++j) {
        const double y = region.im_min + (region.im_max - region.im_min) * j / (region.ny - 1);
        for (int i = 0; i < region.nx; ++i) {
            const double x = region.re_min + (region.re_max - region.re_min) * i / (region.nx - 1);
            const Complex rhs = std::exp(Complex(x, y));
            LearnabilityResult r = equation_roots(R, rhs, 1.0);
            const double bound = 1e-9 * std::max(1.0, std::abs(rhs));
            for (const LearnabilityRoot& root : r.roots) {
                ++root_count;
                worst = std::max(worst, root.residual / bound);
            }
        }
    }
    const double secs = seconds_since(start);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%ld roots, worst residual %.3f of bound %s", root_count,
                  worst, format_secs(secs).c_str());
    detail = buf;
    return worst <= 1.0 && secs < 60.0;
}

bool criterion_scaling_invariance(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(303);
    const std::vector<std::string> names = builtin_names();
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Complex lambda;
        do {
            lambda = Complex(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
        } while (std::abs(lambda.real()) < 0.01 || std::abs(lambda.imag()) < 0.01);
        const double h = std::exp(rng.uniform(-1.5, 1.0));
        const double c = std::exp(rng.uniform(-1.5, 1.5));
        ButcherTableau t = builtin(names[static_cast<std::size_t>(trial) % names.size()]);

        ProblemSpec base{lambda, h};
        ProblemSpec scaled{c * lambda, h / c};
        std::vector<Complex> r1 = learnability_roots(t, base);
        std::vector<Complex> r2 = learnability_roots(t, scaled);
        if (r1.size() != r2.size()) {
            detail = "root multiset sizes differ under scaling";
            return false;
        }
        for (int m = 0; m < 3; ++m) {
            const Metric metric = m == 0 ? Metric::LAlpha : (m == 1 ? Metric::LReal
                                                                    : Metric::LImag);
            std::vector<double> v1, v2;
            for (Complex a : r1) {
                if (auto v = pick_metric(coefficients(a, base), metric)) v1.push_back(*v);
            }
            for (Complex a : r2) {
                if (auto v = pick_metric(coefficients(a, scaled), metric)) v2.push_back(*v);
            }
            if (v1.size() != v2.size()) {
                detail = "defined-coefficient multiset sizes differ";
                return false;
            }
            std::sort(v1.begin(), v1.end());
            std::sort(v2.begin(), v2.end());
            for (std::size_t k = 0; k < v1.size(); ++k) {
                worst = std::max(worst, std::abs(v1[k] - v2[k]) / std::max(1.0, v1[k]));
            }
        }
    }
    const double secs = seconds_since(start);
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst rel %.2e %s", worst, format_secs(secs).c_str());
    detail = buf;
    return worst <= 1e-8;
}

bool criterion_order_ratios(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const Complex lambda(1.0, 1.0);
    const double h = 1e-2;
    const struct {
        const char* name;
        int q;
    } cases[] = {{"explicit_euler", 1}, {"explicit_midpoint", 2}, {"rk4", 4}};
    std::string parts;
    for (const auto& c : cases) {
        ButcherTableau t = builtin(c.name);
        RationalStabilityFunction R = stability_function(t);
        auto ell = [&](double step) {
            auto v = node_metric(R, lambda, step, RootPolicy::closest(), Metric::LAlpha);
            return v ? *v : -1.0;
        };
        const double ratio = ell(h / 2) / ell(h);
        const double scale = std::ldexp(1.0, -c.q);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s %.3f ", c.name, ratio / scale);
        parts += buf;
        if (!(ratio >= 0.85 * scale && ratio <= 1.15 * scale)) {
            detail = parts + "out of band";
            return false;
        }
    }
    detail = parts + format_secs(seconds_since(start));
    return true;
}

bool criterion_figure_reproduction(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    Region region;
    CoefficientField euler =
        evaluate_field(builtin("explicit_euler"), region, Metric::LAlpha, RootPolicy::closest());
    CoefficientField mid = evaluate_field(builtin("explicit_midpoint"), region, Metric::LAlpha,
                                          RootPolicy::closest());
    std::vector<CsvRow> euler_rows = import_csv(export_csv(euler));
    std::vector<CsvRow> mid_rows = import_csv(export_csv(mid));
    if (euler_rows.size() != mid_rows.size()) {
        detail = "csv row counts differ";
        return false;
    }

    long inside = 0, better = 0;
    double at_minus4 = -1.0, at_minus_half = -1.0;
    double best4 = 1e300, best_half = 1e300;
    for (std::size_t k = 0; k < mid_rows.size(); ++k) {
        const CsvRow& m = mid_rows[k];
        const CsvRow& e = euler_rows[k];
        if (m.re * m.re + m.im * m.im <= 1.0 && m.value && e.value) {
            ++inside;
            if (*m.value < *e.value) ++better;
        }
        if (m.value) {
            const double d4 = std::abs(m.re + 4.0) + std::abs(m.im);
            if (d4 < best4) {
                best4 = d4;
                at_minus4 = *m.value;
            }
            const double dh = std::abs(m.re + 0.5) + std::abs(m.im);
            if (dh < best_half) {
                best_half = dh;
                at_minus_half = *m.value;
            }
        }
    }
    const double frac = inside ? static_cast<double>(better) / static_cast<double>(inside) : 0.0;
    const double secs = seconds_since(start);
    char buf[160];
    std::snprintf(buf, sizeof buf, "better at %.1f%% of %ld nodes; mid(-4)=%.3f mid(-0.5)=%.3f %s",
                  100.0 * frac, inside, at_minus4, at_minus_half, format_secs(secs).c_str());
    detail = buf;
    return frac >= 0.95 && at_minus4 > at_minus_half && secs < 120.0;
}

bool criterion_design_comparison(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const double cheb = damping_reach(builtin("cheb2"), 0.2);
    const double mid = damping_reach(builtin("explicit_midpoint"), 0.2);
    const double secs = seconds_since(start);
    char buf[96];
    std::snprintf(buf, sizeof buf, "cheb2 %.4f vs midpoint %.4f %s", cheb, mid,
                  format_secs(secs).c_str());
    detail = buf;
    return cheb > mid && secs < 5.0;
}

bool criterion_zero_loss(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    ProblemSpec spec{Complex(0.0, 1.5), 1.0};
    double worst = 0.0;
    for (const std::string& name : explicit_names()) {
        ButcherTableau t = builtin(name);
        Dataset data = generate_dataset(spec.lambda, spec.h, 1000, 10.0, 99);
        double scale = 0.0;
        for (Complex x : data.x1) scale += std::norm(x);
        scale /= static_cast<double>(data.x1.size());
        for (Complex alpha : learnability_roots(t, spec)) {
            const double mse = linear_loss_and_grad(t, data, alpha, nullptr, nullptr);
            worst = std::max(worst, mse / scale);
        }
    }
    const double secs = seconds_since(start);
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst relative mse %.2e %s", worst,
                  format_secs(secs).c_str());
    detail = buf;
    return worst < 1e-18;
}

bool criterion_trainer_validation(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    ButcherTableau t = builtin("rk4");
    ProblemSpec spec{Complex(0.0, 1.5), 1.0};
    LearnabilityResult theory = solve(t, spec, RootPolicy::closest());
    const Complex target = *theory.selected;

    Dataset data = generate_dataset(spec.lambda, spec.h, 10000, 10.0, 0);
    OptimizerConfig cfg;  // stock defaults: lr 0.001, 3000 epochs, full batch
    TrainingReport r = fit_mlp(t, data, MlpConfig{200, 0}, cfg);

    const double rel = std::abs(r.estimated_alpha - target) / std::abs(target);
    const double secs = seconds_since(start);
    char buf[160];
    std::snprintf(buf, sizeof buf, "alpha (%.4f,%.4f), rel %.4f, target Re>0 %s %s",
                  r.estimated_alpha.real(), r.estimated_alpha.imag(), rel,
                  r.estimated_alpha.real() > 0 ? "yes" : "no", format_secs(secs).c_str());
    detail = buf;
    return rel <= 0.05 && r.estimated_alpha.real() > 0.0 && secs <= 600.0;
}

bool criterion_gradient_check(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(404);
    double worst = 0.0;
    for (const std::string& name : explicit_names()) {
        ButcherTableau t = builtin(name);
        for (int inst = 0; inst < 20; ++inst) {
            const int hidden = 3 + static_cast<int>(rng.raw() % 4);
            const int n = 4 + static_cast<int>(rng.raw() % 7);
            const Complex lambda(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            const double h = std::exp(rng.uniform(-1.5, 0.0));
            Dataset data = generate_dataset(lambda, h, n, 2.0, rng.raw());
            MlpModel model = MlpModel::init(hidden, rng.raw());
            MlpGrads grads = MlpGrads::zero(model);
            mlp_loss_and_grad(t, model, data, &grads);

            auto fd = [&](double* p) {
                const double step = 1e-6;
                const double saved = *p;
                *p = saved + step;
                const double up = mlp_loss_and_grad(t, model, data, nullptr);
                *p = saved - step;
                const double down = mlp_loss_and_grad(t, model, data, nullptr);
                *p = saved;
                return (up - down) / (2 * step);
            };
            auto check = [&](double analytic, double* p) {
                const double numeric = fd(p);
                const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
                worst = std::max(worst, std::abs(analytic - numeric) / denom);
            };
            for (int i = 0; i < model.W1.rows(); ++i) {
                for (int j = 0; j < 2; ++j) check(grads.W1(i, j), &model.W1(i, j));
            }
            for (int i = 0; i < model.b1.size(); ++i) check(grads.b1(i), &model.b1(i));
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < model.W2.cols(); ++j) check(grads.W2(i, j), &model.W2(i, j));
            }
            for (int i = 0; i < 2; ++i) check(grads.b2(i), &model.b2(i));
        }
    }
    const double secs = seconds_since(start);
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst rel %.2e %s", worst, format_secs(secs).c_str());
    detail = buf;
    return worst <= 1e-4 && secs < 30.0;
}

}  // namespace

int main() {
    Gate gate;
    std::string detail;

    detail.clear();
    gate.report(1, "euler closed-form oracle", criterion_euler_oracle(detail), detail);
    detail.clear();
    gate.report(2, "midpoint closed-form oracle", criterion_midpoint_oracle(detail), detail);
    detail.clear();
    gate.report(3, "exact stability polynomials", criterion_stability_exact(detail), detail);
    detail.clear();
    gate.report(4, "sweep residual certificate", criterion_residual_certificate(detail), detail);
    detail.clear();
    gate.report(5, "scaling invariance", criterion_scaling_invariance(detail), detail);
    detail.clear();
    gate.report(6, "order-of-accuracy ratios", criterion_order_ratios(detail), detail);
    detail.clear();
    gate.report(7, "figure field comparison", criterion_figure_reproduction(detail), detail);
    detail.clear();
    gate.report(8, "damping reach comparison", criterion_design_comparison(detail), detail);
    detail.clear();
    gate.report(9, "zero-loss certificate", criterion_zero_loss(detail), detail);
    detail.clear();
    gate.report(10, "mlp trainer validation", criterion_trainer_validation(detail), detail);
    detail.clear();
    gate.report(11, "mlp gradient check", criterion_gradient_check(detail), detail);

    if (gate.failures) {
        std::printf("%d criterion(s) failed\n", gate.failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
