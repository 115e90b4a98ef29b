#ifndef PLNLC_IO_HPP
#define PLNLC_IO_HPP

#include "plnlc/dataset.hpp"
#include "plnlc/forecast.hpp"
#include "plnlc/sampler.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace plnlc {

/// Shortest decimal round-tripping a double exactly (17 significant digits).
std::string fmt_g17(double v);

/// Write alpha.csv / beta.csv / kappa.csv / scalars.csv under `dir`.
/// kappa.csv includes kappa0 at label (first year - 1).
void write_traces(const std::filesystem::path &dir, const ChainStore &chain,
                  const MortalityDataset &ds);

/// Rebuild the draws needed for forecasting from trace files. Returns the
/// draws plus the age labels and last data year read from the files.
struct LoadedTraces {
    PosteriorDraws draws;
    std::vector<long> age_labels;
    std::vector<long> kappa_labels; // N+1 labels, first is the kappa0 slot
    long last_year = 0;
};
LoadedTraces read_traces(const std::filesystem::path &dir);

void write_summary(const std::filesystem::path &path, const std::vector<SummaryRow> &rows);

/// Observed cells only: age, year, sigma2_prop, accept_rate (last tuning
/// cycle rates alongside frozen variances).
void write_acceptance(const std::filesystem::path &path, const ChainStore &chain,
                      const MortalityDataset &ds);

void write_forecast(const std::filesystem::path &path, const ForecastResult &result,
                    const std::vector<long> &age_labels, long first_forecast_year);

void write_forecast_draws(const std::filesystem::path &path, const ForecastResult &result,
                          const std::vector<long> &age_labels, long first_forecast_year);

void write_truth(const std::filesystem::path &path, const ParamState &truth,
                 const MortalityDataset &ds);

struct DiagnosticRow {
    std::string param;
    std::optional<long> index;
    double mean = 0.0;
    double sd = 0.0;
    double acf1 = 0.0;
    double ess = 0.0;
};

/// Mean, SD, lag-1 autocorrelation, and initial-positive-sequence effective
/// sample size of one trace.
DiagnosticRow trace_diagnostics(const std::string &param, std::optional<long> index,
                                const std::vector<double> &trace);

void write_diagnostics(const std::filesystem::path &path, const std::vector<DiagnosticRow> &rows);

} // namespace plnlc

#endif // PLNLC_IO_HPP
