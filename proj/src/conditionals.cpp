#include "plnlc/conditionals.hpp"

#include "plnlc/errors.hpp"

#include <cmath>
#include <iostream>

namespace plnlc {

ProposalTuner ProposalTuner::make(Index num_ages, Index num_years, double initial_value,
                                  int cycle_length, int max_cycles) {
    ProposalTuner tuner;
    tuner.sigma2_prop = ArrayXX::Constant(num_ages, num_years, initial_value);
    tuner.accept_counts = Eigen::ArrayXXi::Zero(num_ages, num_years);
    tuner.attempt_counts = Eigen::ArrayXXi::Zero(num_ages, num_years);
    tuner.last_cycle_rates = ArrayXX::Zero(num_ages, num_years);
    tuner.cycle_length = cycle_length;
    tuner.max_cycles = max_cycles;
    return tuner;
}

double log_mu_log_kernel(double log_mu, double deaths, double exposure, double lin_pred,
                         double sigma2_eps) {
    const double dev = log_mu - lin_pred;
    return deaths * log_mu - exposure * std::exp(log_mu) - dev * dev / (2.0 * sigma2_eps);
}

void update_log_mu(ParamState &state, const MortalityDataset &ds, const ArrayXX &sigma2_prop,
                   RngStream &rng, Eigen::ArrayXXi *accepts, Eigen::ArrayXXi *attempts) {
    const Index M = ds.num_ages();
    const Index N = ds.num_years();
    for (Index t = 0; t < N; ++t) {
        const double k = state.kappa(t);
        for (Index x = 0; x < M; ++x) {
            if (ds.mask(x, t) == 0) {
                continue;
            }
            const double lin_pred = state.alpha(x) + state.beta(x) * k;
            const double cur = state.log_mu(x, t);
            const double prop = cur + std::sqrt(sigma2_prop(x, t)) * rng.normal();
            const double log_ratio =
                log_mu_log_kernel(prop, ds.deaths(x, t), ds.exposures(x, t), lin_pred,
                                  state.sigma2_eps) -
                log_mu_log_kernel(cur, ds.deaths(x, t), ds.exposures(x, t), lin_pred,
                                  state.sigma2_eps);
            if (attempts) {
                (*attempts)(x, t) += 1;
            }
            if (std::isnan(log_ratio)) {
                std::cerr << "[plnlc] non-finite MH ratio at cell (" << x << "," << t
                          << "); proposal rejected\n";
                continue;
            }
            if (log_ratio >= 0.0 || std::log(rng.uniform_pos()) < log_ratio) {
                state.log_mu(x, t) = prop;
                if (accepts) {
                    (*accepts)(x, t) += 1;
                }
            }
        }
    }
}

void tune_proposals(ProposalTuner &tuner) {
    if (tuner.finished()) {
        return;
    }
    const Index M = tuner.sigma2_prop.rows();
    const Index N = tuner.sigma2_prop.cols();
    for (Index x = 0; x < M; ++x) {
        for (Index t = 0; t < N; ++t) {
            const int att = tuner.attempt_counts(x, t);
            if (att == 0) {
                continue; // unobserved cell
            }
            const double rate =
                static_cast<double>(tuner.accept_counts(x, t)) / static_cast<double>(att);
            tuner.last_cycle_rates(x, t) = rate;
            if (rate > 0.5) {
                tuner.sigma2_prop(x, t) *= 2.0;
            } else if (rate < 0.15) {
                tuner.sigma2_prop(x, t) *= 0.5;
            }
        }
    }
    tuner.accept_counts.setZero();
    tuner.attempt_counts.setZero();
    tuner.cycles_done += 1;
}

void update_alpha_beta(ParamState &state, const MortalityDataset &ds,
                       const ConstrainedPrior &prior, RngStream &rng) {
    const Index M = ds.num_ages();
    const Index N = ds.num_years();
    const Index k = M - 1;
    const double inv_s2e = 1.0 / state.sigma2_eps;

    // Per-age observed-cell sums: counts, kappa moments, and data cross terms.
    Vector n = Vector::Zero(M);
    Vector sk = Vector::Zero(M);
    Vector skk = Vector::Zero(M);
    Vector sy = Vector::Zero(M);
    Vector sky = Vector::Zero(M);
    for (Index t = 0; t < N; ++t) {
        const double kap = state.kappa(t);
        for (Index x = 0; x < M; ++x) {
            if (ds.mask(x, t) == 0) {
                continue;
            }
            const double l = state.log_mu(x, t);
            n(x) += 1.0;
            sk(x) += kap;
            skk(x) += kap * kap;
            sy(x) += l;
            sky(x) += kap * l;
        }
    }

    // Data precision: diagonal per-age terms plus the rank-one blocks from
    // eliminating the M-th coordinate, all scaled by 1/sigma2_eps.
    Matrix H = prior.precision();
    H.topLeftCorner(k, k) += inv_s2e * (Matrix(n.head(k).asDiagonal()) +
                                        Matrix::Constant(k, k, n(M - 1)));
    H.topRightCorner(k, k) += inv_s2e * (Matrix(sk.head(k).asDiagonal()) +
                                         Matrix::Constant(k, k, sk(M - 1)));
    H.bottomLeftCorner(k, k) = H.topRightCorner(k, k).transpose();
    H.bottomRightCorner(k, k) += inv_s2e * (Matrix(skk.head(k).asDiagonal()) +
                                            Matrix::Constant(k, k, skk(M - 1)));

    Vector r(2 * k);
    r.head(k) = inv_s2e * (sy.head(k).array() + (sk(M - 1) - sy(M - 1)));
    r.tail(k) = inv_s2e * (sky.head(k).array() + (skk(M - 1) - sky(M - 1)));
    r += prior.precision() * prior.mu_p;

    const Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success) {
        throw NumericError("alpha/beta conditional precision not positive definite (M=" +
                           std::to_string(M) + ", sigma2_eps=" + std::to_string(state.sigma2_eps) +
                           ", sigma2_alpha=" + std::to_string(prior.sigma2_alpha) +
                           ", sigma2_beta=" + std::to_string(prior.sigma2_beta) + ")");
    }
    const Vector mean = llt.solve(r);
    Vector noise(2 * k);
    for (Index i = 0; i < 2 * k; ++i) {
        noise(i) = rng.normal();
    }
    // x = U^{-1} z has covariance (U^T U)^{-1} = H^{-1}.
    const Vector draw = mean + llt.matrixU().solve(noise);

    state.alpha.head(k) = draw.head(k);
    state.beta.head(k) = draw.tail(k);
    state.alpha(M - 1) = -draw.head(k).sum();
    state.beta(M - 1) = 1.0 - draw.tail(k).sum();
}

void update_sigma2_alpha(ParamState &state, const Hyperparams &hp, RngStream &rng) {
    const Index k = state.num_ages() - 1;
    const Vector dev = state.alpha.head(k) - hp.mu_alpha.head(k);
    // (I - J J^T / M)^{-1} = I + J J^T.
    const double quad = dev.squaredNorm() + dev.sum() * dev.sum();
    state.sigma2_alpha = rng.inv_gamma(hp.a_sigma_alpha + 0.5 * static_cast<double>(k),
                                       hp.b_sigma_alpha + 0.5 * quad);
}

void update_sigma2_beta(ParamState &state, const Hyperparams &hp, RngStream &rng) {
    const Index k = state.num_ages() - 1;
    const Vector dev = state.beta.head(k) - hp.mu_beta.head(k);
    const double quad = dev.squaredNorm() + dev.sum() * dev.sum();
    state.sigma2_beta = rng.inv_gamma(hp.a_sigma_beta + 0.5 * static_cast<double>(k),
                                      hp.b_sigma_beta + 0.5 * quad);
}

void update_zeta(ParamState &state, const Hyperparams &hp, RngStream &rng) {
    if (state.z == 1) {
        state.zeta = rng.inv_gamma(hp.a_zeta + 0.5, hp.b_zeta + 0.5 * state.theta2 * state.theta2);
    } else {
        state.zeta = rng.inv_gamma(hp.a_zeta, hp.b_zeta);
    }
}

void update_sigma2_omega(ParamState &state, RngStream &rng) {
    const Index N = state.num_years();
    double ss = 0.0;
    double prev = state.kappa0;
    for (Index t = 1; t <= N; ++t) {
        const double resid =
            state.kappa(t - 1) - prev - state.theta1 - state.theta2 * static_cast<double>(t);
        ss += resid * resid;
        prev = state.kappa(t - 1);
    }
    if (!(ss > 0.0)) {
        std::cerr << "[plnlc] degenerate sigma2_omega rate; keeping current value\n";
        state.sigma2_omega = std::max(state.sigma2_omega, 1e-12);
        return;
    }
    state.sigma2_omega = rng.inv_gamma(0.5 * static_cast<double>(N), 0.5 * ss);
}

void update_sigma2_eps(ParamState &state, const MortalityDataset &ds, RngStream &rng) {
    const Index M = ds.num_ages();
    const Index N = ds.num_years();
    double count = 0.0;
    double ss = 0.0;
    for (Index t = 0; t < N; ++t) {
        const double kap = state.kappa(t);
        for (Index x = 0; x < M; ++x) {
            if (ds.mask(x, t) == 0) {
                continue;
            }
            const double resid = state.log_mu(x, t) - state.alpha(x) - state.beta(x) * kap;
            count += 1.0;
            ss += resid * resid;
        }
    }
    if (!(ss > 0.0)) {
        std::cerr << "[plnlc] degenerate sigma2_eps rate (all residuals zero); "
                     "keeping current value\n";
        state.sigma2_eps = std::max(state.sigma2_eps, 1e-12);
        return;
    }
    state.sigma2_eps = rng.inv_gamma(0.5 * count, 0.5 * ss);
}

void update_scale_params(ParamState &state, const MortalityDataset &ds, const Hyperparams &hp,
                         RngStream &rng) {
    update_sigma2_alpha(state, hp, rng);
    update_sigma2_beta(state, hp, rng);
    update_zeta(state, hp, rng);
    update_sigma2_omega(state, rng);
    update_sigma2_eps(state, ds, rng);
}

void update_theta1(ParamState &state, RngStream &rng) {
    const double n = static_cast<double>(state.num_years());
    const double sum_t = 0.5 * n * (n + 1.0);
    const double mean =
        (state.kappa(state.num_years() - 1) - state.kappa0 - state.theta2 * sum_t) / n;
    state.theta1 = rng.normal(mean, state.sigma2_omega / n);
}

namespace {

/// S = sum_t t (kappa_t - kappa_{t-1} - theta1) and T = sum_t t^2.
std::pair<double, double> trend_stats(const ParamState &state) {
    const Index N = state.num_years();
    double s = 0.0;
    double sum_t2 = 0.0;
    double prev = state.kappa0;
    for (Index t = 1; t <= N; ++t) {
        const double td = static_cast<double>(t);
        s += td * (state.kappa(t - 1) - prev - state.theta1);
        sum_t2 += td * td;
        prev = state.kappa(t - 1);
    }
    return {s, sum_t2};
}

} // namespace

double spike_probability(const ParamState &state, const Hyperparams &hp) {
    if (hp.p0 <= 0.0) {
        return 0.0;
    }
    if (hp.p0 >= 1.0) {
        return 1.0;
    }
    const auto [s, sum_t2] = trend_stats(state);
    const double s2w = state.sigma2_omega;
    const double zeta = state.zeta;
    // log marginal-likelihood ratio of the slab vs the spike. The closed form
    // overflows for large S^2 zeta / s2w and for the huge zeta draws the
    // heavy-tailed prior produces, so keep it in log space with zeta only in
    // the denominator.
    const double shrunk = sum_t2 + s2w / zeta; // (zeta sum_t2 + s2w) / zeta
    const double log_ratio = 0.5 * (std::log(s2w) - std::log(zeta) - std::log(shrunk)) +
                             s * s / (2.0 * s2w * shrunk);
    const double logit = log_ratio + std::log(hp.p0) - std::log1p(-hp.p0);
    if (std::isnan(logit)) {
        throw NumericError("spike probability is NaN");
    }
    if (logit > 0.0) {
        return 1.0 / (1.0 + std::exp(-logit));
    }
    const double e = std::exp(logit);
    return e / (1.0 + e);
}

std::pair<double, double> slab_moments(const ParamState &state) {
    const auto [s, sum_t2] = trend_stats(state);
    const double shrunk = sum_t2 + state.sigma2_omega / state.zeta;
    return {s / shrunk, state.sigma2_omega / shrunk};
}

void update_spike(ParamState &state, const Hyperparams &hp, RngStream &rng) {
    const double p = spike_probability(state, hp);
    state.z = rng.bernoulli(p) ? 1 : 0;
    if (state.z == 1) {
        const auto [mean, var] = slab_moments(state);
        state.theta2 = rng.normal(mean, var);
    } else {
        state.theta2 = 0.0;
    }
}

} // namespace plnlc
