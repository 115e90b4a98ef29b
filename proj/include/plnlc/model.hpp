#ifndef PLNLC_MODEL_HPP
#define PLNLC_MODEL_HPP

#include "plnlc/dataset.hpp"
#include "plnlc/types.hpp"

namespace plnlc {

/// One full MCMC state of the extended Poisson log-normal Lee-Carter model.
///
/// Constraints sum(alpha) = 0 and sum(beta) = 1 hold throughout; z = 0
/// forces theta2 = 0 exactly.
struct ParamState {
    Vector alpha; // M
    Vector beta;  // M
    Vector kappa; // N, internal years 1..N
    double kappa0 = 0.0;
    Matrix log_mu; // M x N latent log rates
    double theta1 = 0.0;
    double theta2 = 0.0;
    int z = 0;
    double zeta = 1.0;
    double sigma2_alpha = 1.0;
    double sigma2_beta = 1.0;
    double sigma2_eps = 1.0;
    double sigma2_omega = 1.0;

    Index num_ages() const { return alpha.size(); }
    Index num_years() const { return kappa.size(); }
};

/// Pre-specified prior constants.
struct Hyperparams {
    Vector mu_alpha; // M
    Vector mu_beta;  // M
    double a_sigma_alpha = 0.01;
    double b_sigma_alpha = 0.01;
    double a_sigma_beta = 0.01;
    double b_sigma_beta = 0.01;
    double a_zeta = 0.1;
    double b_zeta = 0.1;
    double p0 = 0.5;
    double mu_kappa0 = 0.0;
    double sigma2_kappa0 = 10.0;
    // When false, initialization replaces the kappa0 moments with values
    // estimated from the SVD kappa sequence.
    bool kappa0_specified = false;

    static Hyperparams defaults(Index num_ages);
};

/// Joint normal prior of (alpha_{-M}, beta_{-M}) after conditioning the
/// unconstrained prior on sum(alpha) = 0 and sum(beta) = 1.
struct ConstrainedPrior {
    Vector mu_p;    // 2(M-1)
    Matrix sigma_p; // 2(M-1) x 2(M-1), SPD
    // Scales the prior was built from; precision() uses them to invert
    // sigma_p in closed form.
    double sigma2_alpha = 1.0;
    double sigma2_beta = 1.0;

    /// Closed-form inverse of sigma_p: block-diagonal (I + J J^T) / sigma2.
    Matrix precision() const;
};

ConstrainedPrior constrained_prior(const Hyperparams &hp, double sigma2_alpha,
                                   double sigma2_beta);

/// Unnormalized log posterior; observed-cell terms only. Diagnostics and
/// test use; throws NumericError when the state yields a non-finite value.
double log_joint_density(const ParamState &state, const MortalityDataset &ds,
                         const Hyperparams &hp);

/// Throws NumericError naming the offending field if the state violates any
/// invariant (constraint sums, positivity, finiteness, z/theta2 coupling).
void validate_state(const ParamState &state, const char *context = "");

} // namespace plnlc

#endif // PLNLC_MODEL_HPP
