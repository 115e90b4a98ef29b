#ifndef PLNLC_CONDITIONALS_HPP
#define PLNLC_CONDITIONALS_HPP

#include "plnlc/dataset.hpp"
#include "plnlc/model.hpp"
#include "plnlc/rng.hpp"
#include "plnlc/types.hpp"

#include <utility>

namespace plnlc {

/// Per-cell random-walk proposal variances with trial-and-error adaptation:
/// every cycle_length iterations, cells accepting above 0.5 get their
/// variance doubled and cells below 0.15 halved, for at most max_cycles
/// cycles. Frozen afterwards.
struct ProposalTuner {
    ArrayXX sigma2_prop;
    Eigen::ArrayXXi accept_counts;
    Eigen::ArrayXXi attempt_counts;
    ArrayXX last_cycle_rates; // rates observed in the most recent finished cycle
    int cycle_length = 100;
    int cycles_done = 0;
    int max_cycles = 20;

    static ProposalTuner make(Index num_ages, Index num_years, double initial_value = 0.01,
                              int cycle_length = 100, int max_cycles = 20);

    bool finished() const { return cycles_done >= max_cycles; }
};

/// Log of the unnormalized full conditional of log mu at an observed cell:
/// D l - E e^l - (l - a)^2 / (2 s2e), with a = alpha_x + beta_x kappa_t.
double log_mu_log_kernel(double log_mu, double deaths, double exposure, double lin_pred,
                         double sigma2_eps);

/// Metropolis sweep over all observed cells; missing cells untouched.
/// Non-finite acceptance ratios count as rejections. Pass null counters to
/// skip bookkeeping.
void update_log_mu(ParamState &state, const MortalityDataset &ds, const ArrayXX &sigma2_prop,
                   RngStream &rng, Eigen::ArrayXXi *accepts = nullptr,
                   Eigen::ArrayXXi *attempts = nullptr);

/// One tuner adjustment at a cycle boundary; resets counts. Cells with zero
/// attempts (unobserved) are skipped. No-op once finished.
void tune_proposals(ProposalTuner &tuner);

/// Joint conjugate draw of (alpha_{-M}, beta_{-M}) from its normal full
/// conditional, then completion of alpha_M, beta_M from the constraints.
/// `prior` must be current for the iteration's sigma2_alpha/sigma2_beta.
void update_alpha_beta(ParamState &state, const MortalityDataset &ds,
                       const ConstrainedPrior &prior, RngStream &rng);

void update_sigma2_alpha(ParamState &state, const Hyperparams &hp, RngStream &rng);
void update_sigma2_beta(ParamState &state, const Hyperparams &hp, RngStream &rng);
void update_zeta(ParamState &state, const Hyperparams &hp, RngStream &rng);
void update_sigma2_omega(ParamState &state, RngStream &rng);
/// Degenerate all-residuals-zero case keeps the current value floored at
/// 1e-12 and logs a warning instead of drawing.
void update_sigma2_eps(ParamState &state, const MortalityDataset &ds, RngStream &rng);

/// All scale draws in one call: sigma2_alpha, sigma2_beta, zeta,
/// sigma2_omega, sigma2_eps.
void update_scale_params(ParamState &state, const MortalityDataset &ds, const Hyperparams &hp,
                         RngStream &rng);

/// Gaussian drift draw from N((kappa_N - kappa_0 - theta2 sum t)/N, s2w/N).
void update_theta1(ParamState &state, RngStream &rng);

/// Posterior inclusion probability of the linear trend, evaluated in log
/// space.
double spike_probability(const ParamState &state, const Hyperparams &hp);

/// Mean and variance of theta2's slab conditional (z = 1 branch).
std::pair<double, double> slab_moments(const ParamState &state);

/// Draw z ~ Bernoulli(p~), then theta2 from the slab if z = 1, else 0.
void update_spike(ParamState &state, const Hyperparams &hp, RngStream &rng);

} // namespace plnlc

#endif // PLNLC_CONDITIONALS_HPP
