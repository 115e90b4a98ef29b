#ifndef PLNLC_STATE_SPACE_HPP
#define PLNLC_STATE_SPACE_HPP

#include "plnlc/dataset.hpp"
#include "plnlc/model.hpp"
#include "plnlc/rng.hpp"

namespace plnlc {

/// Scalar filtered mean/variance of kappa.
///
/// The 3-vector dynamic-linear-model state (1, kappa_t, t+1) has two
/// deterministic components, so only the kappa moments are carried and the
/// drift/trend shift is absorbed into the transition.
struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

/// Filtered moments for t = 0..N; entry 0 is the kappa0 prior.
struct FilterMoments {
    std::vector<Moments> at; // size N + 1

    Index num_years() const { return static_cast<Index>(at.size()) - 1; }
};

/// Measurement update against a fully observed year: y = alpha + beta kappa + eps.
/// The M x M innovation covariance inverse reduces to a rank-one
/// Sherman-Morrison form, making the update O(M). `t` is the 1-based year.
Moments filter_year_complete(Moments prev, const Eigen::Ref<const Vector> &y,
                             const ParamState &state, Index t);

/// One-at-a-time scalar updates over ages; missing cells pass the moments
/// through unchanged. Handles fully missing years (pure propagation).
Moments filter_year_sequential(Moments prev, const Eigen::Ref<const Vector> &y,
                               const Eigen::Ref<const Eigen::ArrayXi> &mask_col,
                               const ParamState &state, Index t);

/// Forward pass over all years, switching per year between the batch filter
/// (complete years) and the sequential filter (any missing cell).
FilterMoments forward_filter(const ParamState &state, const MortalityDataset &ds,
                             const Hyperparams &hp);

/// Backward sampling pass: draws kappa_N from the last filtered moments,
/// then kappa_{N-1}..kappa_1 and kappa_0 conditionally; writes into state.
void backward_sample(const FilterMoments &moments, ParamState &state, RngStream &rng);

/// Full FFBS draw of (kappa_0, kappa); returns the forward moments so
/// callers can dump them.
FilterMoments update_kappa(ParamState &state, const MortalityDataset &ds, const Hyperparams &hp,
                           RngStream &rng);

} // namespace plnlc

#endif // PLNLC_STATE_SPACE_HPP
