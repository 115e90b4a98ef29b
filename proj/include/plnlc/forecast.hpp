#ifndef PLNLC_FORECAST_HPP
#define PLNLC_FORECAST_HPP

#include "plnlc/rng.hpp"
#include "plnlc/sampler.hpp"
#include "plnlc/types.hpp"

#include <utility>
#include <vector>

namespace plnlc {

/// Column-per-draw view of the chain quantities forecasting needs; built
/// either from an in-memory ChainStore or from exported trace files.
struct PosteriorDraws {
    Matrix alpha; // M x J
    Matrix beta;  // M x J
    Matrix kappa; // (N+1) x J, row 0 = kappa0
    Vector theta1;
    Vector theta2;
    Vector sigma2_eps;
    Vector sigma2_omega;
    std::vector<int> z;

    Index num_draws() const { return theta1.size(); }
    Index num_ages() const { return alpha.rows(); }
    Index num_years() const { return kappa.rows() - 1; }
};

PosteriorDraws to_draws(const ChainStore &chain);

/// Predictive log-mortality summaries per future cell.
struct ForecastResult {
    int horizon = 0;
    Matrix mean_logmu; // M x H
    Matrix hpd_lo;     // M x H
    Matrix hpd_hi;     // M x H
    Matrix draws;      // (M*H) x J raw predictive draws, kept only on request
    bool has_draws = false;
};

/// Shortest window containing ceil(level * n) consecutive order statistics;
/// ties resolved toward the lowest window.
std::pair<double, double> hpd_interval(std::vector<double> sample, double level);

/// Posterior predictive projection: per structure-consistent draw j, kappa
/// is iterated H steps past year N (adding theta2 * t under the trend
/// structure), and one log mu draw is taken per cell.
ForecastResult forecast(const PosteriorDraws &draws, TimeStructure structure, int horizon,
                        RngStream &rng, bool keep_draws = false);

} // namespace plnlc

#endif // PLNLC_FORECAST_HPP
