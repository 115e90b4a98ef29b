#ifndef PLNLC_SAMPLER_HPP
#define PLNLC_SAMPLER_HPP

#include "plnlc/conditionals.hpp"
#include "plnlc/dataset.hpp"
#include "plnlc/model.hpp"
#include "plnlc/state_space.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace plnlc {

struct SamplerConfig {
    int n_iter = 2000; // recorded draws (post burn-in)
    int n_burn = 100;
    int tune_cycles = 20;
    int tune_cycle_length = 100;
    int pilot_iter = 500;
    int thin = 1;
    std::uint64_t seed = 0;
    bool dump_filter_moments = false;

    void validate() const;
};

/// Post burn-in draws plus acceptance bookkeeping.
struct ChainStore {
    std::vector<ParamState> draws; // thinned
    std::vector<int> z_trace;      // aligned with draws
    Eigen::ArrayXXi recorded_accepts;
    Eigen::ArrayXXi recorded_attempts;
    ArrayXX sigma2_prop;      // frozen proposal variances used for the record
    ArrayXX tune_cycle_rates; // acceptance rates in the last tuning cycle
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;

    /// Acceptance rate per cell over the recorded sweeps (NaN where never
    /// attempted).
    ArrayXX acceptance_rate() const;
};

enum class TimeStructure { RandomWalkDrift, DriftPlusTrend };

std::string to_string(TimeStructure s);
std::optional<TimeStructure> time_structure_from_string(const std::string &s);

using MomentsSink = std::function<void(int iteration, const FilterMoments &)>;

/// One full Metropolis-within-Gibbs sweep in the fixed scan order:
/// log mu, (alpha, beta), sigma2_alpha/beta, kappa, theta1, (z, theta2),
/// zeta, sigma2_omega, sigma2_eps.
FilterMoments gibbs_sweep(ParamState &state, const MortalityDataset &ds, const Hyperparams &hp,
                          const ArrayXX &sigma2_prop, RngStream &rng,
                          Eigen::ArrayXXi *accepts = nullptr,
                          Eigen::ArrayXXi *attempts = nullptr);

/// Pre-burn-in proposal tuning, burn-in, then n_iter recorded sweeps.
/// Deterministic given (ds, hp, cfg, init). Throws NumericError naming the
/// iteration on a non-finite state.
ChainStore run_chain(const MortalityDataset &ds, const Hyperparams &hp, const SamplerConfig &cfg,
                     const ParamState &init, const MomentsSink &sink = nullptr);

/// Posterior-mean model choice on the z trace; strict majority selects the
/// trend structure.
TimeStructure select_time_structure(const ChainStore &chain);

struct SummaryRow {
    std::string param;
    std::optional<long> index; // age/year label for vector parameters
    double mean = 0.0;
    double hpd_lo = 0.0;
    double hpd_hi = 0.0;
};

/// Posterior means and 95% HPD intervals over the draws whose z matches the
/// selected structure. Throws if no draw matches.
std::vector<SummaryRow> summarize(const ChainStore &chain, TimeStructure structure,
                                  const MortalityDataset &ds, double level = 0.95);

} // namespace plnlc

#endif // PLNLC_SAMPLER_HPP
