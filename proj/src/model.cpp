#include "plnlc/model.hpp"

#include "plnlc/errors.hpp"

#include <cmath>
#include <string>

namespace plnlc {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_normal_pdf(double x, double mean, double variance) {
    const double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(variance) + d * d / variance);
}

double log_inv_gamma_pdf(double x, double shape, double rate) {
    return shape * std::log(rate) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - rate / x;
}

} // namespace

Hyperparams Hyperparams::defaults(Index num_ages) {
    Hyperparams hp;
    hp.mu_alpha = Vector::Zero(num_ages);
    hp.mu_beta = Vector::Constant(num_ages, 1.0 / static_cast<double>(num_ages));
    return hp;
}

Matrix ConstrainedPrior::precision() const {
    const Index k = mu_p.size() / 2;
    Matrix prec = Matrix::Zero(2 * k, 2 * k);
    // (I - J J^T / M)^{-1} = I + J J^T, so each block is (I + J J^T) / sigma2.
    const Matrix ones = Matrix::Ones(k, k);
    prec.topLeftCorner(k, k) = (Matrix::Identity(k, k) + ones) / sigma2_alpha;
    prec.bottomRightCorner(k, k) = (Matrix::Identity(k, k) + ones) / sigma2_beta;
    return prec;
}

ConstrainedPrior constrained_prior(const Hyperparams &hp, double sigma2_alpha,
                                   double sigma2_beta) {
    const Index M = hp.mu_alpha.size();
    if (M < 2) {
        throw NumericError("constrained_prior requires at least 2 age groups");
    }
    const Index k = M - 1;
    const double m = static_cast<double>(M);

    ConstrainedPrior prior;
    prior.sigma2_alpha = sigma2_alpha;
    prior.sigma2_beta = sigma2_beta;
    prior.mu_p.resize(2 * k);
    // mu_p = mu_1 - Sigma_1 Sigma_2^{-1} (mu_2 - a) with a = (0, 1)^T;
    // Sigma_1 Sigma_2^{-1} collapses to J/M per block.
    const double alpha_shift = (hp.mu_alpha.sum() - 0.0) / m;
    const double beta_shift = (hp.mu_beta.sum() - 1.0) / m;
    prior.mu_p.head(k) = hp.mu_alpha.head(k).array() - alpha_shift;
    prior.mu_p.tail(k) = hp.mu_beta.head(k).array() - beta_shift;

    prior.sigma_p = Matrix::Zero(2 * k, 2 * k);
    const Matrix centered =
        Matrix::Identity(k, k) - Matrix::Constant(k, k, 1.0 / m); // I - J J^T / M
    prior.sigma_p.topLeftCorner(k, k) = sigma2_alpha * centered;
    prior.sigma_p.bottomRightCorner(k, k) = sigma2_beta * centered;
    return prior;
}

double log_joint_density(const ParamState &s, const MortalityDataset &ds,
                         const Hyperparams &hp) {
    const Index M = ds.num_ages();
    const Index N = ds.num_years();
    double lp = 0.0;

    // Observed-cell likelihood: Poisson counts and the Gaussian overdispersion
    // layer on log mu.
    for (Index x = 0; x < M; ++x) {
        for (Index t = 0; t < N; ++t) {
            if (ds.mask(x, t) == 0) {
                continue;
            }
            const double l = s.log_mu(x, t);
            const double d = ds.deaths(x, t);
            const double e = ds.exposures(x, t);
            lp += d * (std::log(e) + l) - e * std::exp(l) - std::lgamma(d + 1.0);
            lp += log_normal_pdf(l, s.alpha(x) + s.beta(x) * s.kappa(t), s.sigma2_eps);
        }
    }

    // State equation: kappa random walk with drift and optional trend.
    lp += log_normal_pdf(s.kappa0, hp.mu_kappa0, hp.sigma2_kappa0);
    double prev = s.kappa0;
    for (Index t = 1; t <= N; ++t) {
        lp += log_normal_pdf(s.kappa(t - 1),
                             prev + s.theta1 + s.theta2 * static_cast<double>(t), s.sigma2_omega);
        prev = s.kappa(t - 1);
    }

    // Constrained (alpha, beta) prior; empty when M == 1.
    if (M >= 2) {
        const ConstrainedPrior prior = constrained_prior(hp, s.sigma2_alpha, s.sigma2_beta);
        const Index k = M - 1;
        Vector p(2 * k);
        p.head(k) = s.alpha.head(k);
        p.tail(k) = s.beta.head(k);
        const Vector dev = p - prior.mu_p;
        const Eigen::LLT<Matrix> llt(prior.sigma_p);
        if (llt.info() != Eigen::Success) {
            throw NumericError("constrained prior covariance not positive definite");
        }
        const double quad = dev.dot(llt.solve(dev));
        const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        lp += -0.5 * (2.0 * static_cast<double>(k) * kLog2Pi + logdet + quad);
    }

    lp += log_inv_gamma_pdf(s.sigma2_alpha, hp.a_sigma_alpha, hp.b_sigma_alpha);
    lp += log_inv_gamma_pdf(s.sigma2_beta, hp.a_sigma_beta, hp.b_sigma_beta);
    lp += log_inv_gamma_pdf(s.zeta, hp.a_zeta, hp.b_zeta);
    lp += -std::log(s.sigma2_eps);
    lp += -std::log(s.sigma2_omega);
    // theta1 flat; z and the spike/slab on theta2.
    if (s.z == 1) {
        lp += std::log(hp.p0) + log_normal_pdf(s.theta2, 0.0, s.zeta);
    } else {
        lp += std::log(1.0 - hp.p0);
    }

    if (!std::isfinite(lp)) {
        throw NumericError("log joint density is non-finite");
    }
    return lp;
}

void validate_state(const ParamState &s, const char *context) {
    const std::string where = context[0] ? std::string(context) + ": " : std::string();
    const auto fail = [&where](const char *what) {
        throw NumericError(where + "invalid state: " + what);
    };
    if (!s.alpha.allFinite() || !s.beta.allFinite() || !s.kappa.allFinite() ||
        !s.log_mu.allFinite()) {
        fail("non-finite vector entry (alpha/beta/kappa/log_mu)");
    }
    if (!std::isfinite(s.kappa0) || !std::isfinite(s.theta1) || !std::isfinite(s.theta2)) {
        fail("non-finite scalar (kappa0/theta1/theta2)");
    }
    if (std::abs(s.alpha.sum()) > 1e-10) {
        fail("sum(alpha) != 0");
    }
    if (std::abs(s.beta.sum() - 1.0) > 1e-10) {
        fail("sum(beta) != 1");
    }
    if (s.z == 0 && s.theta2 != 0.0) {
        fail("z = 0 but theta2 != 0");
    }
    if (s.z != 0 && s.z != 1) {
        fail("z not binary");
    }
    const double scales[] = {s.zeta, s.sigma2_alpha, s.sigma2_beta, s.sigma2_eps, s.sigma2_omega};
    const char *names[] = {"zeta", "sigma2_alpha", "sigma2_beta", "sigma2_eps", "sigma2_omega"};
    for (int i = 0; i < 5; ++i) {
        if (!(scales[i] > 0.0) || !std::isfinite(scales[i])) {
            fail(names[i]);
        }
    }
}

} // namespace plnlc
