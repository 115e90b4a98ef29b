#include "plnlc/synth.hpp"

#include "plnlc/errors.hpp"

#include <cmath>
#include <numeric>

namespace plnlc {

namespace {

/// Mortality-shaped age intercept deviations: elevated infancy, a young-age
/// trough, then a senescent climb; centered so the constraint holds.
Vector default_alpha_profile(Index m) {
    Vector raw(m);
    for (Index x = 0; x < m; ++x) {
        const double u = m > 1 ? static_cast<double>(x) / static_cast<double>(m - 1) : 0.0;
        raw(x) = 3.0 * std::pow(u, 1.5) + 0.8 * std::exp(-20.0 * u);
    }
    return raw.array() - raw.mean();
}

Vector default_beta_profile(Index m) {
    Vector raw(m);
    for (Index x = 0; x < m; ++x) {
        const double u = m > 1 ? static_cast<double>(x) / static_cast<double>(m - 1) : 0.0;
        raw(x) = 0.5 + u;
    }
    return raw / raw.sum();
}

} // namespace

void SynthSpec::resolve_defaults() {
    const double m = static_cast<double>(num_ages);
    if (alpha.size() == 0) {
        alpha = default_alpha_profile(num_ages);
    }
    if (beta.size() == 0) {
        beta = default_beta_profile(num_ages);
    }
    if (!kappa0_set) {
        kappa0 = -4.2 * m;
    }
    if (!theta1_set) {
        theta1 = -0.05 * m;
    }
    if (sigma2_omega <= 0.0) {
        sigma2_omega = 0.05 * m * 0.05 * m;
    }
}

SynthSpec SynthSpec::census_block_preset() {
    SynthSpec spec;
    spec.num_ages = 100;
    spec.num_years = 22;
    spec.first_age = 0;
    spec.first_year = 1995;
    spec.pattern = Pattern::Block;
    spec.block_age_ranges = {{10, 19}, {85, 99}};
    spec.block_years.clear();
    for (long year = 1995; year <= 2016; ++year) {
        // Censuses and the 1% sample surveys produced complete years.
        if (year == 1995 || year == 2000 || year == 2005 || year == 2010 || year == 2015) {
            continue;
        }
        spec.block_years.push_back(year);
    }
    return spec;
}

SynthResult generate_synthetic(const SynthSpec &input, RngStream &rng) {
    SynthSpec spec = input;
    spec.resolve_defaults();
    const Index M = spec.num_ages;
    const Index N = spec.num_years;
    if (M < 2 || N < 2) {
        throw ConfigError("synthetic grid needs at least 2 ages and 2 years");
    }
    if (std::abs(spec.alpha.sum()) > 1e-8 || std::abs(spec.beta.sum() - 1.0) > 1e-8) {
        throw ConfigError("synthetic alpha/beta must satisfy the constraints");
    }

    ParamState truth;
    truth.alpha = spec.alpha;
    truth.beta = spec.beta;
    truth.theta1 = spec.theta1;
    truth.theta2 = spec.theta2;
    truth.z = spec.theta2 != 0.0 ? 1 : 0;
    truth.zeta = 1.0;
    truth.sigma2_alpha = 1.0;
    truth.sigma2_beta = 1.0;
    truth.sigma2_eps = spec.sigma2_eps;
    truth.sigma2_omega = spec.sigma2_omega;
    truth.kappa0 = spec.sigma2_kappa0 > 0.0
                       ? rng.normal(spec.kappa0, spec.sigma2_kappa0)
                       : spec.kappa0;
    truth.kappa.resize(N);
    double kap = truth.kappa0;
    for (Index t = 1; t <= N; ++t) {
        kap += spec.theta1 + spec.theta2 * static_cast<double>(t) +
               std::sqrt(spec.sigma2_omega) * rng.normal();
        truth.kappa(t - 1) = kap;
    }

    MortalityDataset full;
    full.deaths = Matrix::Zero(M, N);
    full.exposures = Matrix::Constant(M, N, spec.exposure);
    full.mask = MaskGrid::Ones(M, N);
    full.age_labels.resize(M);
    full.year_labels.resize(N);
    for (Index x = 0; x < M; ++x) {
        full.age_labels[x] = spec.first_age + x;
    }
    for (Index t = 0; t < N; ++t) {
        full.year_labels[t] = spec.first_year + t;
    }

    truth.log_mu.resize(M, N);
    for (Index t = 0; t < N; ++t) {
        for (Index x = 0; x < M; ++x) {
            const double log_mu = truth.alpha(x) + truth.beta(x) * truth.kappa(t) +
                                  std::sqrt(spec.sigma2_eps) * rng.normal();
            truth.log_mu(x, t) = log_mu;
            const double mean = spec.exposure * std::exp(log_mu);
            if (!(mean < 1e12)) {
                throw NumericError("synthetic Poisson mean blew up; check parameters");
            }
            full.deaths(x, t) =
                std::min(static_cast<double>(rng.poisson(mean)), std::floor(spec.exposure));
        }
    }

    MaskGrid mask = MaskGrid::Ones(M, N);
    switch (spec.pattern) {
    case SynthSpec::Pattern::None:
        break;
    case SynthSpec::Pattern::Sporadic: {
        for (Index t = 0; t < N; ++t) {
            for (Index x = 0; x < M; ++x) {
                if (rng.bernoulli(spec.sporadic_p)) {
                    mask(x, t) = 0;
                }
            }
        }
        break;
    }
    case SynthSpec::Pattern::Block: {
        for (long year : spec.block_years) {
            const long t = year - spec.first_year;
            if (t < 0 || t >= N) {
                throw ConfigError("block year " + std::to_string(year) + " outside the grid");
            }
            for (const auto &[lo, hi] : spec.block_age_ranges) {
                for (long age = lo; age <= hi; ++age) {
                    const long x = age - spec.first_age;
                    if (x < 0 || x >= M) {
                        throw ConfigError("block age " + std::to_string(age) +
                                          " outside the grid");
                    }
                    mask(x, t) = 0;
                }
            }
        }
        break;
    }
    }

    // The engine requires a fully observed year; restore one if the pattern
    // wiped them all out.
    bool any_complete = false;
    for (Index t = 0; t < N && !any_complete; ++t) {
        any_complete = mask.col(t).sum() == M;
    }
    if (!any_complete) {
        Index best = 0;
        for (Index t = 1; t < N; ++t) {
            if (mask.col(t).sum() > mask.col(best).sum()) {
                best = t;
            }
        }
        mask.col(best).setOnes();
    }

    SynthResult result;
    result.full_data = full;
    result.data = full;
    result.data.mask = mask;
    for (Index t = 0; t < N; ++t) {
        for (Index x = 0; x < M; ++x) {
            if (mask(x, t) == 0) {
                result.data.deaths(x, t) = 0.0;
                result.data.exposures(x, t) = 0.0;
            }
        }
    }
    result.truth = truth;
    return result;
}

Matrix simulate_future_log_mu(const ParamState &truth, int horizon, RngStream &rng) {
    const Index M = truth.num_ages();
    const Index N = truth.num_years();
    Matrix future(M, horizon);
    double kap = truth.kappa(N - 1);
    for (int h = 1; h <= horizon; ++h) {
        kap += truth.theta1 + truth.theta2 * static_cast<double>(N + h) +
               std::sqrt(truth.sigma2_omega) * rng.normal();
        for (Index x = 0; x < M; ++x) {
            future(x, h - 1) = truth.alpha(x) + truth.beta(x) * kap +
                               std::sqrt(truth.sigma2_eps) * rng.normal();
        }
    }
    return future;
}

} // namespace plnlc
