#ifndef PLNLC_DATASET_HPP
#define PLNLC_DATASET_HPP

#include "plnlc/types.hpp"

#include <filesystem>
#include <vector>

namespace plnlc {

/// Age-by-year death/exposure table with explicit missingness.
///
/// Rows are age groups, columns are calendar years. Cells with mask 0 carry
/// no data; their deaths/exposures entries are zero-filled and must not be
/// read. Ages and years are internally indexed 1..M and 1..N (the time
/// covariate uses the internal year index); the original labels are kept
/// for output only. Immutable after construction.
struct MortalityDataset {
    Matrix deaths;    // M x N, integer-valued where observed
    Matrix exposures; // M x N, positive where observed
    MaskGrid mask;    // M x N
    std::vector<long> age_labels;  // M
    std::vector<long> year_labels; // N

    Index num_ages() const { return deaths.rows(); }
    Index num_years() const { return deaths.cols(); }

    bool year_complete(Index t) const { return mask.col(t).sum() == num_ages(); }
    bool year_all_missing(Index t) const { return mask.col(t).sum() == 0; }
};

/// Parse and validate a delimited dataset file (header age,year,deaths,exposure).
/// Missing cells are rows with both value fields empty, or absent rows.
/// Throws DataError on any invariant violation.
MortalityDataset load_dataset(const std::filesystem::path &path);

/// Mirror of the input format; observed values round-trip exactly.
void write_dataset(const MortalityDataset &ds, const std::filesystem::path &path);

/// Fraction of cells with mask 0.
double missing_fraction(const MortalityDataset &ds);

/// Run all structural invariant checks on an in-memory dataset.
void validate_dataset(const MortalityDataset &ds);

} // namespace plnlc

#endif // PLNLC_DATASET_HPP
