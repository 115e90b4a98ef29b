#include "plnlc/lc_init.hpp"

#include "plnlc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace plnlc {

namespace {

double clamp_deaths(double value, double exposure) {
    const double rounded = std::llround(value);
    return std::min(rounded, std::floor(exposure));
}

Matrix corrected_log_rates(const MortalityDataset &ds) {
    // log((D + 0.5)/E): the half-count continuity correction keeps zero-death
    // cells finite.
    return ((ds.deaths.array() + 0.5) / ds.exposures.array()).log().matrix();
}

double mean_increment(const Vector &kappa) {
    const Index n = kappa.size();
    return (kappa(n - 1) - kappa(0)) / static_cast<double>(n - 1);
}

double increment_variance(const Vector &kappa) {
    const Index n = kappa.size() - 1; // number of increments
    const double drift = mean_increment(kappa);
    double ss = 0.0;
    for (Index t = 0; t < n; ++t) {
        const double d = kappa(t + 1) - kappa(t) - drift;
        ss += d * d;
    }
    const double denom = std::max<Index>(1, n - 1);
    return ss / static_cast<double>(denom);
}

} // namespace

ImputedDataset linear_interpolate_impute(const MortalityDataset &ds) {
    const Index M = ds.num_ages();
    const Index N = ds.num_years();
    ImputedDataset out;
    out.observed = ds.mask;
    out.completed = ds;
    out.completed.mask = MaskGrid::Ones(M, N);

    for (Index x = 0; x < M; ++x) {
        std::vector<Index> obs;
        for (Index t = 0; t < N; ++t) {
            if (ds.mask(x, t) == 1) {
                obs.push_back(t);
            }
        }
        if (obs.empty()) {
            throw DataError("age row " + std::to_string(ds.age_labels[x]) +
                            " has no observed cells; interpolation impossible");
        }
        for (Index t = 0; t < N; ++t) {
            if (ds.mask(x, t) == 1) {
                continue;
            }
            const auto next = std::lower_bound(obs.begin(), obs.end(), t);
            double deaths;
            double exposure;
            if (next == obs.begin()) {
                deaths = ds.deaths(x, *next); // leading gap: nearest observed
                exposure = ds.exposures(x, *next);
            } else if (next == obs.end()) {
                deaths = ds.deaths(x, obs.back()); // trailing gap
                exposure = ds.exposures(x, obs.back());
            } else {
                const Index t1 = *next;
                const Index t0 = *(next - 1);
                const double w = static_cast<double>(t - t0) / static_cast<double>(t1 - t0);
                deaths = w * ds.deaths(x, t1) + (1.0 - w) * ds.deaths(x, t0);
                exposure = w * ds.exposures(x, t1) + (1.0 - w) * ds.exposures(x, t0);
            }
            out.completed.exposures(x, t) = exposure;
            out.completed.deaths(x, t) = clamp_deaths(deaths, exposure);
        }
    }
    return out;
}

LcFit fit_lc_svd(const Matrix &log_rates) {
    if (!log_rates.allFinite()) {
        throw NumericError("fit_lc_svd requires finite log rates");
    }
    const Index M = log_rates.rows();
    const Index N = log_rates.cols();

    LcFit fit;
    fit.alpha = log_rates.rowwise().mean();
    const Matrix centered = log_rates - fit.alpha * Matrix::Ones(1, N);

    Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double s = svd.singularValues()(0);
    if (!(s > 1e-12 * std::max(1.0, log_rates.norm()))) {
        throw DataError("degenerate LC fit: leading singular value is zero (constant grid?)");
    }
    Vector u = svd.matrixU().col(0);
    Vector v = svd.matrixV().col(0);
    if (u.sum() < 0.0) {
        u = -u;
        v = -v;
    }
    const double usum = u.sum();
    if (!(std::abs(usum) > 1e-12)) {
        throw DataError("degenerate LC fit: age loadings sum to zero, cannot normalize");
    }
    fit.beta = u / usum;
    fit.kappa = s * usum * v;

    // Constraint transfer (alpha, kappa) -> (alpha - c beta, kappa + c) leaves
    // alpha + beta kappa unchanged because sum(beta) = 1. Two passes push the
    // residual constraint error to rounding level.
    for (int pass = 0; pass < 2; ++pass) {
        const double bsum = fit.beta.sum();
        fit.kappa *= bsum;
        fit.beta /= bsum;
        const double c = fit.alpha.sum();
        fit.alpha -= c * fit.beta;
        fit.kappa.array() += c;
    }

    const Matrix fitted = fit.alpha * Matrix::Ones(1, N) + fit.beta * fit.kappa.transpose();
    fit.residual_sd = std::sqrt((log_rates - fitted).squaredNorm() /
                                static_cast<double>(M * N));
    return fit;
}

ImputedDataset svd_impute(const ImputedDataset &ds, const LcFit &fit) {
    ImputedDataset out = ds;
    const Index M = ds.completed.num_ages();
    const Index N = ds.completed.num_years();
    for (Index x = 0; x < M; ++x) {
        for (Index t = 0; t < N; ++t) {
            if (ds.observed(x, t) == 1) {
                continue;
            }
            const double mu = std::exp(fit.alpha(x) + fit.beta(x) * fit.kappa(t));
            const double exposure = ds.completed.exposures(x, t);
            out.completed.deaths(x, t) = clamp_deaths(mu * exposure, exposure);
        }
    }
    return out;
}

ParamState state_from_fit(const LcFit &fit, const MortalityDataset &completed) {
    ParamState s;
    s.alpha = fit.alpha;
    s.beta = fit.beta;
    s.kappa = fit.kappa;
    const double drift = mean_increment(fit.kappa);
    s.kappa0 = fit.kappa(0) - drift;
    s.log_mu = corrected_log_rates(completed);
    s.theta1 = drift;
    s.theta2 = 0.0;
    s.z = 0;
    s.zeta = 1.0;
    s.sigma2_eps = std::max(fit.residual_sd * fit.residual_sd, 1e-6);
    s.sigma2_omega = std::max(increment_variance(fit.kappa), 1e-6);
    const Index M = fit.alpha.size();
    s.sigma2_alpha =
        std::max(fit.alpha.squaredNorm() / static_cast<double>(M), 1e-4);
    s.sigma2_beta = std::max(
        (fit.beta.array() - fit.beta.mean()).matrix().squaredNorm() / static_cast<double>(M),
        1e-4);
    return s;
}

InitialValues initial_values(const MortalityDataset &ds, Hyperparams hp,
                             const SamplerConfig &cfg) {
    const ImputedDataset interpolated = linear_interpolate_impute(ds);
    const LcFit fit = fit_lc_svd(corrected_log_rates(interpolated.completed));
    const ImputedDataset refined = svd_impute(interpolated, fit);

    if (!hp.kappa0_specified) {
        hp.mu_kappa0 = fit.kappa(0) - mean_increment(fit.kappa);
        hp.sigma2_kappa0 = std::max(increment_variance(fit.kappa), 1e-6);
        hp.kappa0_specified = true;
    }

    SamplerConfig pilot_cfg = cfg;
    pilot_cfg.n_iter = cfg.pilot_iter;
    pilot_cfg.thin = 1;
    pilot_cfg.seed = RngStream::derive_seed(cfg.seed, 0x910f);
    pilot_cfg.dump_filter_moments = false;

    ChainStore pilot;
    try {
        pilot = run_chain(refined.completed, hp, pilot_cfg, state_from_fit(fit, refined.completed));
    } catch (const NumericError &err) {
        throw NumericError(std::string("initialization pilot chain diverged: ") + err.what());
    }

    const Index M = ds.num_ages();
    const Index N = ds.num_years();
    const double J = static_cast<double>(pilot.draws.size());
    ParamState init;
    init.alpha = Vector::Zero(M);
    init.beta = Vector::Zero(M);
    init.kappa = Vector::Zero(N);
    init.log_mu = Matrix::Zero(M, N);
    double mean_z = 0.0;
    double theta2_given_z1 = 0.0;
    double n_z1 = 0.0;
    init.kappa0 = init.theta1 = init.zeta = 0.0;
    init.sigma2_alpha = init.sigma2_beta = init.sigma2_eps = init.sigma2_omega = 0.0;
    for (const ParamState &d : pilot.draws) {
        init.alpha += d.alpha / J;
        init.beta += d.beta / J;
        init.kappa += d.kappa / J;
        init.kappa0 += d.kappa0 / J;
        init.theta1 += d.theta1 / J;
        init.zeta += d.zeta / J;
        init.sigma2_alpha += d.sigma2_alpha / J;
        init.sigma2_beta += d.sigma2_beta / J;
        init.sigma2_eps += d.sigma2_eps / J;
        init.sigma2_omega += d.sigma2_omega / J;
        mean_z += d.z / J;
        if (d.z == 1) {
            theta2_given_z1 += d.theta2;
            n_z1 += 1.0;
        }
    }
    init.z = mean_z > 0.5 ? 1 : 0;
    init.theta2 = init.z == 1 ? theta2_given_z1 / n_z1 : 0.0;

    const Matrix observed_log_rates = corrected_log_rates(ds);
    for (Index x = 0; x < M; ++x) {
        for (Index t = 0; t < N; ++t) {
            init.log_mu(x, t) = ds.mask(x, t) == 1
                                    ? observed_log_rates(x, t)
                                    : init.alpha(x) + init.beta(x) * init.kappa(t);
        }
    }
    validate_state(init, "initial values");
    return InitialValues{std::move(init), fit, hp};
}

} // namespace plnlc
