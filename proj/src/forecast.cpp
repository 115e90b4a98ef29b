#include "plnlc/forecast.hpp"

#include "plnlc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace plnlc {

PosteriorDraws to_draws(const ChainStore &chain) {
    if (chain.draws.empty()) {
        throw NumericError("empty chain");
    }
    const Index J = static_cast<Index>(chain.draws.size());
    const Index M = chain.draws.front().num_ages();
    const Index N = chain.draws.front().num_years();
    PosteriorDraws d;
    d.alpha.resize(M, J);
    d.beta.resize(M, J);
    d.kappa.resize(N + 1, J);
    d.theta1.resize(J);
    d.theta2.resize(J);
    d.sigma2_eps.resize(J);
    d.sigma2_omega.resize(J);
    d.z.resize(static_cast<std::size_t>(J));
    for (Index j = 0; j < J; ++j) {
        const ParamState &s = chain.draws[static_cast<std::size_t>(j)];
        d.alpha.col(j) = s.alpha;
        d.beta.col(j) = s.beta;
        d.kappa(0, j) = s.kappa0;
        d.kappa.col(j).tail(N) = s.kappa;
        d.theta1(j) = s.theta1;
        d.theta2(j) = s.theta2;
        d.sigma2_eps(j) = s.sigma2_eps;
        d.sigma2_omega(j) = s.sigma2_omega;
        d.z[static_cast<std::size_t>(j)] = s.z;
    }
    return d;
}

std::pair<double, double> hpd_interval(std::vector<double> sample, double level) {
    const std::size_t n = sample.size();
    if (n == 0) {
        throw NumericError("hpd_interval: empty sample");
    }
    if (n < 2) {
        throw NumericError("hpd_interval: need at least 2 points");
    }
    if (!(level > 0.0) || !(level < 1.0) || level * static_cast<double>(n) < 1.0) {
        throw NumericError("hpd_interval: level out of range for sample size");
    }
    std::sort(sample.begin(), sample.end());
    const std::size_t m =
        static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
    std::size_t best = 0;
    double best_width = sample[m - 1] - sample[0];
    for (std::size_t i = 1; i + m <= n; ++i) {
        const double width = sample[i + m - 1] - sample[i];
        if (width < best_width) {
            best_width = width;
            best = i;
        }
    }
    return {sample[best], sample[best + m - 1]};
}

ForecastResult forecast(const PosteriorDraws &draws, TimeStructure structure, int horizon,
                        RngStream &rng, bool keep_draws) {
    if (horizon <= 0) {
        throw ConfigError("forecast horizon must be >= 1");
    }
    const int want_z = structure == TimeStructure::DriftPlusTrend ? 1 : 0;
    std::vector<Index> kept;
    for (Index j = 0; j < draws.num_draws(); ++j) {
        if (draws.z[static_cast<std::size_t>(j)] == want_z) {
            kept.push_back(j);
        }
    }
    if (kept.empty()) {
        throw NumericError("no posterior draws consistent with structure " + to_string(structure));
    }

    const Index M = draws.num_ages();
    const Index N = draws.num_years();
    const Index H = horizon;
    const Index J = static_cast<Index>(kept.size());

    Matrix logmu_draws(M * H, J); // cell (x, h) at row h * M + x
    for (Index jj = 0; jj < J; ++jj) {
        const Index j = kept[static_cast<std::size_t>(jj)];
        double kap = draws.kappa(N, j);
        for (Index h = 1; h <= H; ++h) {
            const double t = static_cast<double>(N + h); // internal time index continues
            kap += draws.theta1(j) + draws.theta2(j) * t +
                   std::sqrt(draws.sigma2_omega(j)) * rng.normal();
            for (Index x = 0; x < M; ++x) {
                const double mean = draws.alpha(x, j) + draws.beta(x, j) * kap;
                logmu_draws((h - 1) * M + x, jj) =
                    mean + std::sqrt(draws.sigma2_eps(j)) * rng.normal();
            }
        }
    }

    ForecastResult result;
    result.horizon = horizon;
    result.mean_logmu.resize(M, H);
    result.hpd_lo.resize(M, H);
    result.hpd_hi.resize(M, H);
    std::vector<double> cell(static_cast<std::size_t>(J));
    for (Index h = 0; h < H; ++h) {
        for (Index x = 0; x < M; ++x) {
            const auto row = logmu_draws.row(h * M + x);
            for (Index j = 0; j < J; ++j) {
                cell[static_cast<std::size_t>(j)] = row(j);
            }
            result.mean_logmu(x, h) = row.mean();
            const auto [lo, hi] = hpd_interval(cell, 0.95);
            result.hpd_lo(x, h) = lo;
            result.hpd_hi(x, h) = hi;
        }
    }
    if (keep_draws) {
        result.draws = std::move(logmu_draws);
        result.has_draws = true;
    }
    return result;
}

} // namespace plnlc
