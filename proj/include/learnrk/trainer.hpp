#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "learnrk/learnability.hpp"
#include "learnrk/rng.hpp"
#include "learnrk/util.hpp"

// glibc 2.35+ ships a batch tanh kernel (<= 4 ulp, IEEE special cases intact).
// Eigen only vectorizes tanh for float, so the double activation would
// otherwise fall back to one libm call per element.
#if defined(LEARNRK_USE_LIBMVEC) && defined(__x86_64__) && defined(__GLIBC__) && \
    (__GLIBC__ > 2 || (__GLIBC__ == 2 && __GLIBC_MINOR__ >= 35))
#include <emmintrin.h>
#define LEARNRK_MVEC_TANH 1
extern "C" __m128d _ZGVbN2v_tanh(__m128d);
#endif

namespace learnrk {

namespace detail {

/// Elementwise tanh over a dense buffer; the batch kernel and the scalar
/// fallback agree to within 4 ulp so training stays deterministic per build.
inline void tanh_in_place(Eigen::MatrixXd& M) {
    double* p = M.data();
    const Eigen::Index n = M.size();
    Eigen::Index i = 0;
#ifdef LEARNRK_MVEC_TANH
    for (; i + 2 <= n; i += 2) _mm_storeu_pd(p + i, _ZGVbN2v_tanh(_mm_loadu_pd(p + i)));
#endif
    for (; i < n; ++i) p[i] = std::tanh(p[i]);
}

}  // namespace detail

struct Dataset {
    std::vector<Complex> x0;
    std::vector<Complex> x1;
    Complex lambda;
    double h = 1.0;
    std::uint64_t seed = 0;
    double box = 10.0;
};

inline Dataset generate_dataset(Complex lambda, double h, int n, double box,
                                std::uint64_t seed) {
    if (n < 1) throw InvalidArgumentError("dataset needs at least one pair");
    if (!(box > 0.0)) throw InvalidArgumentError("sample box half-width must be positive");
    ProblemSpec spec{lambda, h};
    check_problem(spec);
    const Complex factor = growth_factor(spec);

    Dataset d;
    d.lambda = lambda;
    d.h = h;
    d.seed = seed;
    d.box = box;
    d.x0.reserve(static_cast<std::size_t>(n));
    d.x1.reserve(static_cast<std::size_t>(n));
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        Complex x(rng.uniform(-box, box), rng.uniform(-box, box));
        d.x0.push_back(x);
        d.x1.push_back(factor * x);
    }
    return d;
}

struct LinearModel {
    Complex alpha{0.0, 0.0};
};

/// 2 -> H -> 2 network with tanh hidden activation; channels are (Re, Im).
struct MlpModel {
    int hidden = 0;
    Eigen::MatrixXd W1;  // H x 2
    Eigen::VectorXd b1;  // H
    Eigen::MatrixXd W2;  // 2 x H
    Eigen::VectorXd b2;  // 2

    /// Uniform init in +-1/sqrt(fan_in); draw order W1 (row major), b1,
    /// W2 (row major), b2 pins the byte-identical reproducibility contract.
    static MlpModel init(int hidden, std::uint64_t seed) {
        if (hidden < 1) throw InvalidArgumentError("hidden width must be at least 1");
        MlpModel m;
        m.hidden = hidden;
        m.W1.resize(hidden, 2);
        m.b1.resize(hidden);
        m.W2.resize(2, hidden);
        m.b2.resize(2);
        Rng rng(seed);
        const double s1 = 1.0 / std::sqrt(2.0);
        const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
        for (int i = 0; i < hidden; ++i) {
            for (int j = 0; j < 2; ++j) m.W1(i, j) = rng.uniform(-s1, s1);
        }
        for (int i = 0; i < hidden; ++i) m.b1(i) = rng.uniform(-s1, s1);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < hidden; ++j) m.W2(i, j) = rng.uniform(-s2, s2);
        }
        for (int i = 0; i < 2; ++i) m.b2(i) = rng.uniform(-s2, s2);
        return m;
    }

    /// Batched map: rows of Z are (Re, Im) inputs.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& Z) const {
        Eigen::MatrixXd T = (Z * W1.transpose()).rowwise() + b1.transpose();
        detail::tanh_in_place(T);
        return (T * W2.transpose()).rowwise() + b2.transpose();
    }

    Complex map(Complex z) const {
        Eigen::MatrixXd Z(1, 2);
        Z(0, 0) = z.real();
        Z(0, 1) = z.imag();
        Eigen::MatrixXd Y = forward(Z);
        return Complex(Y(0, 0), Y(0, 1));
    }
};

namespace detail {

struct ExplicitStepper {
    int p = 0;
    std::vector<std::vector<double>> A;
    std::vector<double> b;

    explicit ExplicitStepper(const ButcherTableau& t) : p(t.p) {
        if (!t.is_explicit) {
            throw InvalidArgumentError(
                "implicit tableaux are not supported here; stepping would need a "
                "nonlinear stage solve");
        }
        A.assign(static_cast<std::size_t>(p), std::vector<double>(static_cast<std::size_t>(p)));
        b.resize(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) A[i][j] = to_double(t.A[i][j]);
            b[i] = to_double(t.b[i]);
        }
    }

    template <class F>
    Complex step(F&& f, Complex x, double h) const {
        std::vector<Complex> k(static_cast<std::size_t>(p));
        Complex out = x;
        for (int i = 0; i < p; ++i) {
            Complex z = x;
            for (int j = 0; j < i; ++j) {
                if (A[i][j] != 0.0) z += h * A[i][j] * k[static_cast<std::size_t>(j)];
            }
            k[static_cast<std::size_t>(i)] = f(z);
            out += h * b[i] * k[static_cast<std::size_t>(i)];
        }
        return out;
    }
};

}  // namespace detail

template <class F>
inline Complex rk_step_with(const ButcherTableau& t, F&& f, Complex x, double h) {
    return detail::ExplicitStepper(t).step(std::forward<F>(f), x, h);
}

inline Complex rk_step(const ButcherTableau& t, const LinearModel& m, Complex x, double h) {
    return rk_step_with(t, [&](Complex z) { return m.alpha * z; }, x, h);
}

inline Complex rk_step(const ButcherTableau& t, const MlpModel& m, Complex x, double h) {
    return rk_step_with(t, [&](Complex z) { return m.map(z); }, x, h);
}

struct OptimizerConfig {
    double lr = 0.001;
    int epochs = 3000;
    int batch = 0;  // 0 = full batch
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double grad_tol = 1e-12;
};

struct TrainingReport {
    std::string model;
    std::string method;
    double final_loss = 0.0;
    Complex estimated_alpha{0.0, 0.0};
    Complex ratio_mean{0.0, 0.0};
    double ratio_dispersion = 0.0;
    Complex nearest_root{0.0, 0.0};
    double distance = 0.0;
    int iterations = 0;
    std::uint64_t seed = 0;
    OptimizerConfig optimizer;
    std::vector<double> loss_history;
};

/// MSE and gradient of the one-step loss for the linear model; reverse-mode
/// through the stage recursion. The adjoint of k -> alpha*k is multiplication
/// by conj(alpha) when complex pairs stand for R^2 vectors.
inline double linear_loss_and_grad(const detail::ExplicitStepper& st, const Dataset& data,
                                   Complex alpha, double* d_re, double* d_im) {
    const int p = st.p;
    const double h = data.h;
    const std::size_t n = data.x0.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    double loss = 0.0;
    double ga = 0.0, gb = 0.0;
    std::vector<Complex> z(static_cast<std::size_t>(p)), k(static_cast<std::size_t>(p)),
        gk(static_cast<std::size_t>(p)), gz(static_cast<std::size_t>(p));
    for (std::size_t s = 0; s < n; ++s) {
        const Complex x0 = data.x0[s];
        Complex xhat = x0;
        for (int i = 0; i < p; ++i) {
            Complex zi = x0;
            for (int j = 0; j < i; ++j) {
                if (st.A[i][j] != 0.0) zi += h * st.A[i][j] * k[static_cast<std::size_t>(j)];
            }
            z[static_cast<std::size_t>(i)] = zi;
            k[static_cast<std::size_t>(i)] = alpha * zi;
            xhat += h * st.b[i] * k[static_cast<std::size_t>(i)];
        }
        const Complex diff = xhat - data.x1[s];
        loss += std::norm(diff) * inv_n;
        if (d_re == nullptr) continue;

        const Complex g = 2.0 * inv_n * diff;
        for (int i = p - 1; i >= 0; --i) {
            Complex gki = h * st.b[i] * g;
            for (int m = i + 1; m < p; ++m) {
                if (st.A[m][i] != 0.0) gki += h * st.A[m][i] * gz[static_cast<std::size_t>(m)];
            }
            gk[static_cast<std::size_t>(i)] = gki;
            gz[static_cast<std::size_t>(i)] = std::conj(alpha) * gki;
            const Complex zi = z[static_cast<std::size_t>(i)];
            ga += (std::conj(gki) * zi).real();
            gb += (std::conj(gki) * (Complex(0.0, 1.0) * zi)).real();
        }
    }
    if (d_re != nullptr) {
        *d_re = ga;
        *d_im = gb;
    }
    return loss;
}

inline double linear_loss_and_grad(const ButcherTableau& t, const Dataset& data, Complex alpha,
                                   double* d_re, double* d_im) {
    return linear_loss_and_grad(detail::ExplicitStepper(t), data, alpha, d_re, d_im);
}

struct MlpGrads {
    Eigen::MatrixXd W1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd W2;
    Eigen::VectorXd b2;

    static MlpGrads zero(const MlpModel& m) {
        MlpGrads g;
        g.W1 = Eigen::MatrixXd::Zero(m.hidden, 2);
        g.b1 = Eigen::VectorXd::Zero(m.hidden);
        g.W2 = Eigen::MatrixXd::Zero(2, m.hidden);
        g.b2 = Eigen::VectorXd::Zero(2);
        return g;
    }

    double squared_norm() const {
        return W1.squaredNorm() + b1.squaredNorm() + W2.squaredNorm() + b2.squaredNorm();
    }
};

/// Batched MSE and gradients for the MLP trained through the stage recursion.
/// X0, X1 have one (Re, Im) row per pair. Pass grads = nullptr for loss only.
inline double mlp_loss_and_grad(const detail::ExplicitStepper& st, const MlpModel& m,
                                const Eigen::MatrixXd& X0, const Eigen::MatrixXd& X1, double h,
                                MlpGrads* grads) {
    const int p = st.p;
    const Eigen::Index n = X0.rows();
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<Eigen::MatrixXd> Z(static_cast<std::size_t>(p)), T(static_cast<std::size_t>(p)),
        K(static_cast<std::size_t>(p));
    Eigen::MatrixXd xhat = X0;
    for (int i = 0; i < p; ++i) {
        Eigen::MatrixXd zi = X0;
        for (int j = 0; j < i; ++j) {
            if (st.A[i][j] != 0.0) zi += (h * st.A[i][j]) * K[static_cast<std::size_t>(j)];
        }
        Eigen::MatrixXd ti = (zi * m.W1.transpose()).rowwise() + m.b1.transpose();
        detail::tanh_in_place(ti);
        K[static_cast<std::size_t>(i)] = (ti * m.W2.transpose()).rowwise() + m.b2.transpose();
        Z[static_cast<std::size_t>(i)] = std::move(zi);
        T[static_cast<std::size_t>(i)] = std::move(ti);
        xhat += (h * st.b[i]) * K[static_cast<std::size_t>(i)];
    }

    const Eigen::MatrixXd diff = xhat - X1;
    const double loss = diff.squaredNorm() * inv_n;
    if (grads == nullptr) return loss;

    *grads = MlpGrads::zero(m);
    const Eigen::MatrixXd gout = (2.0 * inv_n) * diff;
    std::vector<Eigen::MatrixXd> GZ(static_cast<std::size_t>(p));
    for (int i = p - 1; i >= 0; --i) {
        Eigen::MatrixXd gk = (h * st.b[i]) * gout;
        for (int r = i + 1; r < p; ++r) {
            if (st.A[r][i] != 0.0) gk += (h * st.A[r][i]) * GZ[static_cast<std::size_t>(r)];
        }
        const Eigen::MatrixXd& ti = T[static_cast<std::size_t>(i)];
        grads->W2 += gk.transpose() * ti;
        grads->b2 += gk.colwise().sum().transpose();
        Eigen::MatrixXd gu =
            (gk * m.W2).cwiseProduct((1.0 - ti.array().square()).matrix());
        grads->W1 += gu.transpose() * Z[static_cast<std::size_t>(i)];
        grads->b1 += gu.colwise().sum().transpose();
        GZ[static_cast<std::size_t>(i)] = gu * m.W1;
    }
    return loss;
}

inline Eigen::MatrixXd to_matrix(const std::vector<Complex>& v) {
    Eigen::MatrixXd M(static_cast<Eigen::Index>(v.size()), 2);
    for (std::size_t i = 0; i < v.size(); ++i) {
        M(static_cast<Eigen::Index>(i), 0) = v[i].real();
        M(static_cast<Eigen::Index>(i), 1) = v[i].imag();
    }
    return M;
}

inline double mlp_loss_and_grad(const ButcherTableau& t, const MlpModel& m, const Dataset& data,
                                MlpGrads* grads) {
    return mlp_loss_and_grad(detail::ExplicitStepper(t), m, to_matrix(data.x0),
                             to_matrix(data.x1), data.h, grads);
}

struct AlphaEstimate {
    Complex alpha_hat{0.0, 0.0};
    Complex ratio_mean{0.0, 0.0};
    double dispersion = 0.0;
};

inline Complex model_apply(const LinearModel& m, Complex z) { return m.alpha * z; }
inline Complex model_apply(const MlpModel& m, Complex z) { return m.map(z); }

/// Mean one-step multiplier of the model, inverted through the stability
/// relation: alpha_hat is the root of R(h*alpha) = mean ratio closest to
/// lambda. Pairs with |x0| < 1e-6 are excluded from the mean.
template <class Model>
inline AlphaEstimate estimate_alpha(const ButcherTableau& t, const Model& model,
                                    const Dataset& data) {
    const detail::ExplicitStepper st(t);
    std::vector<Complex> ratios;
    ratios.reserve(data.x0.size());
    for (std::size_t i = 0; i < data.x0.size(); ++i) {
        if (std::abs(data.x0[i]) < 1e-6) continue;
        Complex stepped = st.step([&](Complex z) { return model_apply(model, z); },
                                  data.x0[i], data.h);
        ratios.push_back(stepped / data.x0[i]);
    }
    if (ratios.empty()) {
        throw InvalidArgumentError("every pair falls under the |x0| exclusion threshold");
    }
    Complex sum(0.0, 0.0);
    for (const Complex& r : ratios) sum += r;
    AlphaEstimate est;
    est.ratio_mean = sum / static_cast<double>(ratios.size());
    for (const Complex& r : ratios) {
        est.dispersion = std::max(est.dispersion, std::abs(r - est.ratio_mean));
    }

    const RationalStabilityFunction R = stability_function(t);
    LearnabilityResult roots = equation_roots(R, est.ratio_mean, data.h);
    std::vector<Complex> alphas;
    alphas.reserve(roots.roots.size());
    for (const auto& root : roots.roots) alphas.push_back(root.alpha);
    est.alpha_hat = select_alpha(alphas, ProblemSpec{data.lambda, data.h}, RootPolicy::closest());
    return est;
}

namespace detail {

inline std::pair<Complex, double> nearest_analytic_root(const ButcherTableau& t,
                                                        const ProblemSpec& spec,
                                                        Complex alpha_hat) {
    std::vector<Complex> roots = learnability_roots(t, spec);
    Complex best = roots.front();
    double dist = std::abs(alpha_hat - best);
    for (const Complex& r : roots) {
        double d = std::abs(alpha_hat - r);
        if (d < dist) {
            dist = d;
            best = r;
        }
    }
    return {best, dist};
}

/// Scalar Adam state shared by both trainers.
struct AdamScalar {
    double m = 0.0;
    double v = 0.0;

    double update(double g, const OptimizerConfig& cfg, double bias1, double bias2) {
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
        return cfg.lr * (m / bias1) / (std::sqrt(v / bias2) + cfg.eps);
    }
};

}  // namespace detail

inline TrainingReport fit_linear(const ButcherTableau& t, const Dataset& data, Complex init_alpha,
                                 const OptimizerConfig& cfg) {
    const detail::ExplicitStepper st(t);
    Complex alpha = init_alpha;
    detail::AdamScalar ma, mb;

    TrainingReport report;
    report.model = "linear";
    report.method = t.name;
    report.seed = data.seed;
    report.optimizer = cfg;
    report.loss_history.reserve(static_cast<std::size_t>(cfg.epochs));

    double loss = 0.0;
    int epoch = 0;
    for (; epoch < cfg.epochs; ++epoch) {
        double ga = 0.0, gb = 0.0;
        loss = linear_loss_and_grad(st, data, alpha, &ga, &gb);
        if (!std::isfinite(loss)) {
            throw DivergenceError("loss became non-finite during linear training", epoch);
        }
        report.loss_history.push_back(loss);
        if (std::sqrt(ga * ga + gb * gb) < cfg.grad_tol) {
            ++epoch;
            break;
        }
        const double bias1 = 1.0 - std::pow(cfg.beta1, epoch + 1);
        const double bias2 = 1.0 - std::pow(cfg.beta2, epoch + 1);
        alpha -= Complex(ma.update(ga, cfg, bias1, bias2), mb.update(gb, cfg, bias1, bias2));
    }

    report.iterations = epoch;
    report.final_loss = linear_loss_and_grad(st, data, alpha, nullptr, nullptr);
    LinearModel model{alpha};
    AlphaEstimate est = estimate_alpha(t, model, data);
    // The trained parameter is the estimate itself; ratio inversion cannot
    // separate preimages that share the same mean ratio, so only the ratio
    // statistics come from the estimator here.
    report.estimated_alpha = alpha;
    report.ratio_mean = est.ratio_mean;
    report.ratio_dispersion = est.dispersion;
    auto [root, dist] = detail::nearest_analytic_root(t, ProblemSpec{data.lambda, data.h},
                                                      alpha);
    report.nearest_root = root;
    report.distance = dist;
    return report;
}

struct MlpConfig {
    int hidden = 200;
    std::uint64_t seed = 0;
};

inline TrainingReport fit_mlp(const ButcherTableau& t, const Dataset& data, const MlpConfig& mlp,
                              const OptimizerConfig& cfg, MlpModel* trained = nullptr) {
    const detail::ExplicitStepper st(t);
    MlpModel model = MlpModel::init(mlp.hidden, mlp.seed);
    const Eigen::MatrixXd X0 = to_matrix(data.x0);
    const Eigen::MatrixXd X1 = to_matrix(data.x1);
    const Eigen::Index n = X0.rows();

    MlpGrads m_state = MlpGrads::zero(model);
    MlpGrads v_state = MlpGrads::zero(model);

    TrainingReport report;
    report.model = "mlp";
    report.method = t.name;
    report.seed = mlp.seed;
    report.optimizer = cfg;
    report.loss_history.reserve(static_cast<std::size_t>(cfg.epochs));

    const Eigen::Index batch =
        cfg.batch > 0 ? std::min<Eigen::Index>(cfg.batch, n) : n;

    MlpGrads grads = MlpGrads::zero(model);
    int epoch = 0;
    int step_count = 0;
    for (; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        double grad_sq = 0.0;
        Eigen::Index covered = 0;
        while (covered < n) {
            const Eigen::Index take = std::min(batch, n - covered);
            double loss = mlp_loss_and_grad(st, model, X0.middleRows(covered, take),
                                            X1.middleRows(covered, take), data.h, &grads);
            if (!std::isfinite(loss)) {
                throw DivergenceError("loss became non-finite during mlp training", epoch);
            }
            epoch_loss += loss * static_cast<double>(take);
            grad_sq += grads.squared_norm();
            ++step_count;
            const double bias1 = 1.0 - std::pow(cfg.beta1, step_count);
            const double bias2 = 1.0 - std::pow(cfg.beta2, step_count);
            auto adam = [&](auto& theta, const auto& g, auto& ms, auto& vs) {
                ms = cfg.beta1 * ms + (1.0 - cfg.beta1) * g;
                vs = cfg.beta2 * vs + (1.0 - cfg.beta2) * g.cwiseProduct(g);
                theta -= cfg.lr * ((ms / bias1).array() / ((vs / bias2).array().sqrt() + cfg.eps))
                                      .matrix();
            };
            adam(model.W1, grads.W1, m_state.W1, v_state.W1);
            adam(model.b1, grads.b1, m_state.b1, v_state.b1);
            adam(model.W2, grads.W2, m_state.W2, v_state.W2);
            adam(model.b2, grads.b2, m_state.b2, v_state.b2);
            covered += take;
        }
        report.loss_history.push_back(epoch_loss / static_cast<double>(n));
        if (std::sqrt(grad_sq) < cfg.grad_tol) {
            ++epoch;
            break;
        }
    }

    report.iterations = epoch;
    report.final_loss = mlp_loss_and_grad(st, model, X0, X1, data.h, nullptr);
    AlphaEstimate est = estimate_alpha(t, model, data);
    report.estimated_alpha = est.alpha_hat;
    report.ratio_mean = est.ratio_mean;
    report.ratio_dispersion = est.dispersion;
    auto [root, dist] = detail::nearest_analytic_root(t, ProblemSpec{data.lambda, data.h},
                                                      est.alpha_hat);
    report.nearest_root = root;
    report.distance = dist;
    if (trained != nullptr) *trained = model;
    return report;
}

struct TrajectoryConfig {
    double t_max = 10.0;
    int samples = 200;
    Complex x0{1.0, 0.0};
};

struct ComparisonReport {
    std::vector<double> root_distances;  // aligned with result.roots order
    int matched_index = -1;
    Coefficients theory;
    Coefficients empirical;
    std::vector<double> times;
    std::vector<double> re_true;
    std::vector<double> re_learned;
};

inline ComparisonReport compare_with_theory(const TrainingReport& report,
                                            const LearnabilityResult& result,
                                            const ProblemSpec& spec,
                                            const TrajectoryConfig& traj = {}) {
    ComparisonReport cmp;
    for (std::size_t i = 0; i < result.roots.size(); ++i) {
        cmp.root_distances.push_back(std::abs(report.estimated_alpha - result.roots[i].alpha));
        if (cmp.matched_index < 0 ||
            cmp.root_distances[i] < cmp.root_distances[static_cast<std::size_t>(
                                        cmp.matched_index)]) {
            cmp.matched_index = static_cast<int>(i);
        }
    }
    if (cmp.matched_index >= 0) {
        cmp.theory = coefficients(
            result.roots[static_cast<std::size_t>(cmp.matched_index)].alpha, spec);
    }
    cmp.empirical = coefficients(report.estimated_alpha, spec);

    const int steps = std::max(2, traj.samples);
    for (int k = 0; k < steps; ++k) {
        double tk = traj.t_max * static_cast<double>(k) / static_cast<double>(steps - 1);
        cmp.times.push_back(tk);
        cmp.re_true.push_back((traj.x0 * std::exp(spec.lambda * tk)).real());
        cmp.re_learned.push_back((traj.x0 * std::exp(report.estimated_alpha * tk)).real());
    }
    return cmp;
}

inline std::string trajectory_csv(const ComparisonReport& cmp) {
    std::string out = "t,re_true,re_learned\n";
    for (std::size_t k = 0; k < cmp.times.size(); ++k) {
        out += format_double17(cmp.times[k]);
        out.push_back(',');
        out += format_double17(cmp.re_true[k]);
        out.push_back(',');
        out += format_double17(cmp.re_learned[k]);
        out.push_back('\n');
    }
    return out;
}

}  // namespace learnrk
