#ifndef PLNLC_LC_INIT_HPP
#define PLNLC_LC_INIT_HPP

#include "plnlc/dataset.hpp"
#include "plnlc/model.hpp"
#include "plnlc/sampler.hpp"

namespace plnlc {

/// Classic SVD Lee-Carter fit under sum(alpha) = 0, sum(beta) = 1.
struct LcFit {
    Vector alpha;
    Vector beta;
    Vector kappa;
    double residual_sd = 0.0;
};

/// Imputation result: the completed table plus the original observedness.
struct ImputedDataset {
    MortalityDataset completed; // mask all ones
    MaskGrid observed;          // the input's mask
};

/// Year-wise linear interpolation of missing deaths and exposures per age
/// row; boundary gaps use nearest-observed constant extrapolation. Imputed
/// deaths are rounded to integers. Requires each age row to have at least
/// one observed cell.
ImputedDataset linear_interpolate_impute(const MortalityDataset &ds);

/// Row means plus the leading singular triplet of the row-centered grid,
/// rescaled so sum(beta) = 1 and shifted so sum(alpha) = 0 (the shift moves
/// into kappa and leaves fitted rates unchanged).
LcFit fit_lc_svd(const Matrix &log_rates);

/// Refine the imputation: originally-missing deaths are replaced by
/// round(exp(alpha + beta kappa) * E); observed cells are untouched.
ImputedDataset svd_impute(const ImputedDataset &ds, const LcFit &fit);

/// Build a ParamState at the SVD estimates for a completed dataset, with
/// log mu at log((D + 0.5)/E).
ParamState state_from_fit(const LcFit &fit, const MortalityDataset &completed);

struct InitialValues {
    ParamState state;
    LcFit fit;
    Hyperparams hyperparams; // input with kappa0 moments resolved
};

/// Three-stage starting-point search: linear interpolation, SVD refit and
/// re-imputation, then a pilot chain on the completed data whose posterior
/// means become the initial values. kappa0 prior moments are estimated from
/// the SVD kappa sequence unless the caller pinned them.
InitialValues initial_values(const MortalityDataset &ds, Hyperparams hp,
                             const SamplerConfig &cfg);

} // namespace plnlc

#endif // PLNLC_LC_INIT_HPP
