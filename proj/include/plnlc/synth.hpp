#ifndef PLNLC_SYNTH_HPP
#define PLNLC_SYNTH_HPP

#include "plnlc/dataset.hpp"
#include "plnlc/model.hpp"
#include "plnlc/rng.hpp"

#include <utility>
#include <vector>

namespace plnlc {

/// Generator settings: model truth plus a missingness pattern.
struct SynthSpec {
    Index num_ages = 10;
    Index num_years = 20;
    long first_age = 0;
    long first_year = 1995;
    double exposure = 1e5;

    // Empty alpha/beta pick built-in age profiles scaled to the constraints.
    Vector alpha;
    Vector beta;
    double kappa0 = 0.0; // 0 selects -4.2 * M
    bool kappa0_set = false;
    double theta1 = 0.0; // 0 selects -0.01 * M
    bool theta1_set = false;
    double theta2 = 0.0;
    double sigma2_eps = 0.01;
    double sigma2_omega = 0.0; // 0 selects (0.02 * M)^2
    double sigma2_kappa0 = 0.0; // draw kappa0 exactly at the mean when 0

    enum class Pattern { None, Sporadic, Block } pattern = Pattern::None;
    double sporadic_p = 0.1;
    // Block pattern: cells at (age in a range) x (listed years) are missing.
    std::vector<std::pair<long, long>> block_age_ranges; // inclusive label ranges
    std::vector<long> block_years;                       // year labels

    /// Figure-style preset: 100 ages x 22 years from 1995, five complete
    /// survey years, adolescent and senile age bands missing elsewhere.
    static SynthSpec census_block_preset();

    void resolve_defaults();
};

struct SynthResult {
    MortalityDataset data;       // masked per the pattern
    MortalityDataset full_data;  // same draws, mask all ones
    ParamState truth;            // generating parameters and log mu surface
};

/// Simulate deaths from the model: kappa path, log-normal rates, Poisson
/// counts. The mask never hides data that was not generated; the complete
/// grid is always returned alongside. At least one fully observed year is
/// guaranteed (the loader requires one).
SynthResult generate_synthetic(const SynthSpec &spec, RngStream &rng);

/// Continue a true kappa path `horizon` steps and produce one future
/// log-rate surface per replicate; used by forecast-coverage checks.
Matrix simulate_future_log_mu(const ParamState &truth, int horizon, RngStream &rng);

} // namespace plnlc

#endif // PLNLC_SYNTH_HPP
