#ifndef PLNLC_TEST_SUPPORT_HPP
#define PLNLC_TEST_SUPPORT_HPP

// Shared oracles and statistical helpers for the test suites. Everything
// here is implementation-independent on purpose: dense joint-Gaussian
// conditioning, quadrature, and classical special functions, never the
// library's own filters or samplers.

#include "plnlc/rng.hpp"
#include "plnlc/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace plnlc::test {

// ---------------------------------------------------------------------------
// Special functions

/// Lower regularized incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) {
        throw std::invalid_argument("gamma_p domain");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x < a + 1.0) {
        // series expansion
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 10000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) {
                break;
            }
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    // continued fraction (modified Lentz)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::fabs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) {
            break;
        }
    }
    const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    return 1.0 - q;
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

inline double normal_cdf(double x, double mean = 0.0, double variance = 1.0) {
    return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

/// CDF of the inverse gamma with density x^{-a-1} exp(-b/x).
inline double inv_gamma_cdf(double x, double shape, double rate) {
    if (x <= 0.0) {
        return 0.0;
    }
    return gamma_q(shape, rate / x);
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)> &cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

/// Asymptotic KS p-value (Stephens' small-sample correction).
inline double ks_pvalue(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 101; ++j) {
        p += sign * 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
        sign = -sign;
    }
    return std::clamp(p, 0.0, 1.0);
}

inline double ks_test_pvalue(const std::vector<double> &sample,
                             const std::function<double(double)> &cdf) {
    return ks_pvalue(ks_statistic(sample, cdf), sample.size());
}

// ---------------------------------------------------------------------------
// Quadrature

/// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)> &f, double lo, double hi, int n) {
    if (n % 2 != 0) {
        ++n;
    }
    const double h = (hi - lo) / n;
    double acc = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) {
        acc += f(lo + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    return acc * h / 3.0;
}

// ---------------------------------------------------------------------------
// Dense joint-Gaussian oracle for the state-space model
//
// kappa_t = kappa_{t-1} + theta1 + theta2 t + omega_t, kappa_0 ~ N(mu0, s20)
// y_{x,t} = alpha_x + beta_x kappa_t + eps_{x,t}
//
// The joint of (kappa_0..kappa_N, observed y cells) is normal with moments
// available in closed form, so any conditional the filters produce can be
// checked by brute-force conditioning.

struct OracleParams {
    Vector alpha;
    Vector beta;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double sigma2_eps = 1.0;
    double sigma2_omega = 1.0;
    double mu_kappa0 = 0.0;
    double sigma2_kappa0 = 1.0;
};

struct ObservedCell {
    Index x;
    Index t; // 1-based year
    double y;
};

/// Prior mean of kappa_t (t = 0..N).
inline Vector oracle_kappa_mean(const OracleParams &p, Index n_years) {
    Vector mean(n_years + 1);
    mean(0) = p.mu_kappa0;
    for (Index t = 1; t <= n_years; ++t) {
        mean(t) = mean(t - 1) + p.theta1 + p.theta2 * static_cast<double>(t);
    }
    return mean;
}

/// Prior covariance of (kappa_0..kappa_N): s20 + s2w * min(s, t).
inline Matrix oracle_kappa_cov(const OracleParams &p, Index n_years) {
    Matrix cov(n_years + 1, n_years + 1);
    for (Index s = 0; s <= n_years; ++s) {
        for (Index t = 0; t <= n_years; ++t) {
            cov(s, t) = p.sigma2_kappa0 +
                        p.sigma2_omega * static_cast<double>(std::min(s, t));
        }
    }
    return cov;
}

struct GaussianPosterior {
    Vector mean; // over kappa_0..kappa_N
    Matrix cov;
};

/// Condition (kappa_0..kappa_N) on the given observed cells.
inline GaussianPosterior oracle_kappa_posterior(const OracleParams &p, Index n_years,
                                                const std::vector<ObservedCell> &cells) {
    const Vector km = oracle_kappa_mean(p, n_years);
    const Matrix kc = oracle_kappa_cov(p, n_years);
    const Index n_obs = static_cast<Index>(cells.size());
    if (n_obs == 0) {
        return {km, kc};
    }
    Vector y(n_obs);
    Vector ym(n_obs);
    Matrix yc(n_obs, n_obs);
    Matrix cross(n_years + 1, n_obs); // cov(kappa_s, y_i)
    for (Index i = 0; i < n_obs; ++i) {
        const auto &ci = cells[static_cast<std::size_t>(i)];
        y(i) = ci.y;
        ym(i) = p.alpha(ci.x) + p.beta(ci.x) * km(ci.t);
        for (Index j = 0; j < n_obs; ++j) {
            const auto &cj = cells[static_cast<std::size_t>(j)];
            yc(i, j) = p.beta(ci.x) * p.beta(cj.x) * kc(ci.t, cj.t) +
                       (i == j ? p.sigma2_eps : 0.0);
        }
        for (Index s = 0; s <= n_years; ++s) {
            cross(s, i) = p.beta(ci.x) * kc(s, ci.t);
        }
    }
    const Eigen::LDLT<Matrix> ldlt(yc);
    GaussianPosterior post;
    post.mean = km + cross * ldlt.solve(y - ym);
    post.cov = kc - cross * ldlt.solve(cross.transpose());
    return post;
}

/// Filtered moments of kappa_t given observations up to year t.
inline std::pair<double, double> oracle_filtered(const OracleParams &p, Index n_years,
                                                 const std::vector<ObservedCell> &cells,
                                                 Index t) {
    std::vector<ObservedCell> up_to;
    for (const auto &c : cells) {
        if (c.t <= t) {
            up_to.push_back(c);
        }
    }
    const GaussianPosterior post = oracle_kappa_posterior(p, n_years, up_to);
    return {post.mean(t), post.cov(t, t)};
}

// ---------------------------------------------------------------------------
// Exact quadratic extraction
//
// For an exactly quadratic f(p) = c + g^T p - 0.5 p^T H p, finite
// differences recover g and H up to rounding; the maximizer H^{-1} g is the
// Gaussian conditional mean of any log-quadratic density.

struct QuadraticForm {
    Vector grad;
    Matrix hess; // H (negated second derivative)
};

inline QuadraticForm extract_quadratic(const std::function<double(const Vector &)> &f,
                                       Index dim, double h = 0.25) {
    QuadraticForm q;
    q.grad.resize(dim);
    q.hess.resize(dim, dim);
    const double f0 = f(Vector::Zero(dim));
    for (Index i = 0; i < dim; ++i) {
        Vector e = Vector::Zero(dim);
        e(i) = h;
        const double fp = f(e);
        const double fm = f(-e);
        q.grad(i) = (fp - fm) / (2.0 * h);
        q.hess(i, i) = -(fp - 2.0 * f0 + fm) / (h * h);
    }
    for (Index i = 0; i < dim; ++i) {
        for (Index j = i + 1; j < dim; ++j) {
            Vector eij = Vector::Zero(dim);
            eij(i) = h;
            eij(j) = h;
            Vector ei = Vector::Zero(dim);
            ei(i) = h;
            Vector ej = Vector::Zero(dim);
            ej(j) = h;
            const double hij = -(f(eij) - f(ei) - f(ej) + f0) / (h * h);
            q.hess(i, j) = hij;
            q.hess(j, i) = hij;
        }
    }
    return q;
}

// ---------------------------------------------------------------------------
// Misc

inline double sample_mean(const std::vector<double> &v) {
    double m = 0.0;
    for (double x : v) {
        m += x;
    }
    return m / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double> &v) {
    const double m = sample_mean(v);
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m) * (x - m);
    }
    return ss / static_cast<double>(v.size() - 1);
}

/// Random filter-test instance drawn from the model itself.
struct RandomInstance {
    OracleParams params;
    Matrix y;      // M x N log rates
    MaskGrid mask; // M x N
    Vector kappa_true;
};

inline RandomInstance random_instance(RngStream &rng, Index max_ages, Index max_years,
                                      double missing_prob) {
    RandomInstance inst;
    const Index m = 1 + static_cast<Index>(rng.uniform() * static_cast<double>(max_ages));
    const Index n = 1 + static_cast<Index>(rng.uniform() * static_cast<double>(max_years));
    inst.params.alpha.resize(m);
    inst.params.beta.resize(m);
    for (Index x = 0; x < m; ++x) {
        inst.params.alpha(x) = -3.0 + 4.0 * rng.uniform();
        inst.params.beta(x) = 0.2 + 1.5 * rng.uniform();
    }
    inst.params.theta1 = -1.0 + 2.0 * rng.uniform();
    inst.params.theta2 = -0.2 + 0.4 * rng.uniform();
    inst.params.sigma2_eps = 0.05 + rng.uniform();
    inst.params.sigma2_omega = 0.05 + rng.uniform();
    inst.params.mu_kappa0 = -2.0 + 4.0 * rng.uniform();
    inst.params.sigma2_kappa0 = 0.1 + 2.0 * rng.uniform();

    inst.kappa_true.resize(n + 1);
    inst.kappa_true(0) =
        inst.params.mu_kappa0 + std::sqrt(inst.params.sigma2_kappa0) * rng.normal();
    for (Index t = 1; t <= n; ++t) {
        inst.kappa_true(t) = inst.kappa_true(t - 1) + inst.params.theta1 +
                             inst.params.theta2 * static_cast<double>(t) +
                             std::sqrt(inst.params.sigma2_omega) * rng.normal();
    }
    inst.y.resize(m, n);
    inst.mask.resize(m, n);
    for (Index t = 0; t < n; ++t) {
        for (Index x = 0; x < m; ++x) {
            inst.y(x, t) = inst.params.alpha(x) + inst.params.beta(x) * inst.kappa_true(t + 1) +
                           std::sqrt(inst.params.sigma2_eps) * rng.normal();
            inst.mask(x, t) = rng.uniform() < missing_prob ? 0 : 1;
        }
    }
    return inst;
}

inline std::vector<ObservedCell> observed_cells(const RandomInstance &inst) {
    std::vector<ObservedCell> cells;
    for (Index t = 0; t < inst.y.cols(); ++t) {
        for (Index x = 0; x < inst.y.rows(); ++x) {
            if (inst.mask(x, t) == 1) {
                cells.push_back({x, t + 1, inst.y(x, t)});
            }
        }
    }
    return cells;
}

} // namespace plnlc::test

#include "plnlc/dataset.hpp"
#include "plnlc/model.hpp"

namespace plnlc::test {

/// ParamState carrying an instance's parameters and log rates; only the
/// fields the filters read are meaningful.
inline ParamState to_param_state(const RandomInstance &inst) {
    ParamState s;
    s.alpha = inst.params.alpha;
    s.beta = inst.params.beta;
    s.kappa = Vector::Zero(inst.y.cols());
    s.log_mu = inst.y;
    s.theta1 = inst.params.theta1;
    s.theta2 = inst.params.theta2;
    s.sigma2_eps = inst.params.sigma2_eps;
    s.sigma2_omega = inst.params.sigma2_omega;
    return s;
}

inline Hyperparams to_hyperparams(const RandomInstance &inst) {
    Hyperparams hp = Hyperparams::defaults(inst.y.rows());
    hp.mu_kappa0 = inst.params.mu_kappa0;
    hp.sigma2_kappa0 = inst.params.sigma2_kappa0;
    hp.kappa0_specified = true;
    return hp;
}

/// Minimal dataset wrapper (the filters read only the mask and shape).
inline MortalityDataset to_dataset(const RandomInstance &inst) {
    MortalityDataset ds;
    const Index m = inst.y.rows();
    const Index n = inst.y.cols();
    ds.deaths = Matrix::Zero(m, n);
    ds.exposures = Matrix::Ones(m, n);
    ds.mask = inst.mask;
    for (Index x = 0; x < m; ++x) {
        ds.age_labels.push_back(x);
    }
    for (Index t = 0; t < n; ++t) {
        ds.year_labels.push_back(2000 + t);
    }
    return ds;
}

} // namespace plnlc::test

#endif // PLNLC_TEST_SUPPORT_HPP
