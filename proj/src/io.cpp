#include "plnlc/io.hpp"

#include "plnlc/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace plnlc {

namespace {

std::ofstream open_out(const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write file: " + path.string());
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open file: " + path.string() +
                        " (run 'fit' first or check the directory)");
    }
    return in;
}

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

/// draw-indexed vector trace: draw,label,value
struct VectorTrace {
    std::vector<long> labels;
    Matrix values; // labels x draws
};

VectorTrace read_vector_trace(const std::filesystem::path &path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty trace file: " + path.string());
    }
    std::map<long, std::map<long, double>> by_label; // label -> draw -> value
    long max_draw = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != 3) {
            throw DataError("malformed trace row in " + path.string() + ": '" + line + "'");
        }
        const long draw = std::stol(f[0]);
        const long label = std::stol(f[1]);
        by_label[label][draw] = std::stod(f[2]);
        max_draw = std::max(max_draw, draw);
    }
    VectorTrace trace;
    trace.values.resize(static_cast<Index>(by_label.size()), max_draw);
    Index row = 0;
    for (const auto &[label, draws] : by_label) {
        trace.labels.push_back(label);
        if (static_cast<long>(draws.size()) != max_draw) {
            throw DataError("trace " + path.string() + " is ragged at label " +
                            std::to_string(label));
        }
        for (const auto &[draw, value] : draws) {
            trace.values(row, draw - 1) = value;
        }
        ++row;
    }
    return trace;
}

} // namespace

std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_traces(const std::filesystem::path &dir, const ChainStore &chain,
                  const MortalityDataset &ds) {
    const Index M = ds.num_ages();
    const Index N = ds.num_years();
    {
        auto out = open_out(dir / "alpha.csv");
        out << "draw,age,value\n";
        for (std::size_t j = 0; j < chain.draws.size(); ++j) {
            for (Index x = 0; x < M; ++x) {
                out << (j + 1) << ',' << ds.age_labels[x] << ','
                    << fmt_g17(chain.draws[j].alpha(x)) << '\n';
            }
        }
    }
    {
        auto out = open_out(dir / "beta.csv");
        out << "draw,age,value\n";
        for (std::size_t j = 0; j < chain.draws.size(); ++j) {
            for (Index x = 0; x < M; ++x) {
                out << (j + 1) << ',' << ds.age_labels[x] << ','
                    << fmt_g17(chain.draws[j].beta(x)) << '\n';
            }
        }
    }
    {
        auto out = open_out(dir / "kappa.csv");
        out << "draw,year,value\n";
        for (std::size_t j = 0; j < chain.draws.size(); ++j) {
            out << (j + 1) << ',' << (ds.year_labels.front() - 1) << ','
                << fmt_g17(chain.draws[j].kappa0) << '\n';
            for (Index t = 0; t < N; ++t) {
                out << (j + 1) << ',' << ds.year_labels[t] << ','
                    << fmt_g17(chain.draws[j].kappa(t)) << '\n';
            }
        }
    }
    {
        auto out = open_out(dir / "scalars.csv");
        out << "draw,theta1,theta2,z,zeta,sigma2_alpha,sigma2_beta,sigma2_eps,sigma2_omega\n";
        for (std::size_t j = 0; j < chain.draws.size(); ++j) {
            const ParamState &s = chain.draws[j];
            out << (j + 1) << ',' << fmt_g17(s.theta1) << ',' << fmt_g17(s.theta2) << ',' << s.z
                << ',' << fmt_g17(s.zeta) << ',' << fmt_g17(s.sigma2_alpha) << ','
                << fmt_g17(s.sigma2_beta) << ',' << fmt_g17(s.sigma2_eps) << ','
                << fmt_g17(s.sigma2_omega) << '\n';
        }
    }
}

LoadedTraces read_traces(const std::filesystem::path &dir) {
    const VectorTrace alpha = read_vector_trace(dir / "alpha.csv");
    const VectorTrace beta = read_vector_trace(dir / "beta.csv");
    const VectorTrace kappa = read_vector_trace(dir / "kappa.csv");

    auto in = open_in(dir / "scalars.csv");
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty scalars.csv");
    }
    const auto header = split(line);
    const std::vector<std::string> expected = {"draw",         "theta1",      "theta2",
                                               "z",            "zeta",        "sigma2_alpha",
                                               "sigma2_beta",  "sigma2_eps",  "sigma2_omega"};
    if (header != expected) {
        throw DataError("unexpected scalars.csv header");
    }
    std::vector<std::array<double, 8>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != 9) {
            throw DataError("malformed scalars.csv row: '" + line + "'");
        }
        std::array<double, 8> row{};
        for (int i = 0; i < 8; ++i) {
            row[static_cast<std::size_t>(i)] = std::stod(f[static_cast<std::size_t>(i) + 1]);
        }
        rows.push_back(row);
    }
    const Index J = static_cast<Index>(rows.size());
    if (J == 0 || alpha.values.cols() != J || beta.values.cols() != J ||
        kappa.values.cols() != J) {
        throw DataError("trace files disagree on the number of draws");
    }
    if (alpha.labels != beta.labels) {
        throw DataError("alpha.csv and beta.csv disagree on age labels");
    }

    LoadedTraces loaded;
    loaded.age_labels = alpha.labels;
    loaded.kappa_labels = kappa.labels;
    loaded.last_year = kappa.labels.back();
    loaded.draws.alpha = alpha.values;
    loaded.draws.beta = beta.values;
    loaded.draws.kappa = kappa.values; // row 0 is kappa0 (smallest label)
    loaded.draws.theta1.resize(J);
    loaded.draws.theta2.resize(J);
    loaded.draws.sigma2_eps.resize(J);
    loaded.draws.sigma2_omega.resize(J);
    loaded.draws.z.resize(static_cast<std::size_t>(J));
    for (Index j = 0; j < J; ++j) {
        const auto &row = rows[static_cast<std::size_t>(j)];
        loaded.draws.theta1(j) = row[0];
        loaded.draws.theta2(j) = row[1];
        loaded.draws.z[static_cast<std::size_t>(j)] = static_cast<int>(row[2]);
        loaded.draws.sigma2_eps(j) = row[6];
        loaded.draws.sigma2_omega(j) = row[7];
    }
    return loaded;
}

void write_summary(const std::filesystem::path &path, const std::vector<SummaryRow> &rows) {
    auto out = open_out(path);
    out << "param,index,mean,hpd_lo,hpd_hi\n";
    for (const auto &row : rows) {
        out << row.param << ',';
        if (row.index) {
            out << *row.index;
        }
        out << ',' << fmt_g17(row.mean) << ',' << fmt_g17(row.hpd_lo) << ','
            << fmt_g17(row.hpd_hi) << '\n';
    }
}

void write_acceptance(const std::filesystem::path &path, const ChainStore &chain,
                      const MortalityDataset &ds) {
    auto out = open_out(path);
    out << "age,year,sigma2_prop,accept_rate\n";
    for (Index x = 0; x < ds.num_ages(); ++x) {
        for (Index t = 0; t < ds.num_years(); ++t) {
            if (ds.mask(x, t) == 0) {
                continue;
            }
            out << ds.age_labels[x] << ',' << ds.year_labels[t] << ','
                << fmt_g17(chain.sigma2_prop(x, t)) << ','
                << fmt_g17(chain.tune_cycle_rates(x, t)) << '\n';
        }
    }
}

void write_forecast(const std::filesystem::path &path, const ForecastResult &result,
                    const std::vector<long> &age_labels, long first_forecast_year) {
    auto out = open_out(path);
    out << "age,year,pred_mean_logmu,hpd_lo,hpd_hi\n";
    const Index M = result.mean_logmu.rows();
    for (Index x = 0; x < M; ++x) {
        for (int h = 0; h < result.horizon; ++h) {
            out << age_labels[static_cast<std::size_t>(x)] << ',' << (first_forecast_year + h)
                << ',' << fmt_g17(result.mean_logmu(x, h)) << ',' << fmt_g17(result.hpd_lo(x, h))
                << ',' << fmt_g17(result.hpd_hi(x, h)) << '\n';
        }
    }
}

void write_forecast_draws(const std::filesystem::path &path, const ForecastResult &result,
                          const std::vector<long> &age_labels, long first_forecast_year) {
    if (!result.has_draws) {
        throw NumericError("forecast draws were not retained");
    }
    auto out = open_out(path);
    out << "draw,age,year,logmu\n";
    const Index M = static_cast<Index>(age_labels.size());
    for (Index j = 0; j < result.draws.cols(); ++j) {
        for (int h = 0; h < result.horizon; ++h) {
            for (Index x = 0; x < M; ++x) {
                out << (j + 1) << ',' << age_labels[static_cast<std::size_t>(x)] << ','
                    << (first_forecast_year + h) << ',' << fmt_g17(result.draws(h * M + x, j))
                    << '\n';
            }
        }
    }
}

void write_truth(const std::filesystem::path &path, const ParamState &truth,
                 const MortalityDataset &ds) {
    auto out = open_out(path);
    out << "param,index,value\n";
    for (Index x = 0; x < truth.num_ages(); ++x) {
        out << "alpha," << ds.age_labels[x] << ',' << fmt_g17(truth.alpha(x)) << '\n';
    }
    for (Index x = 0; x < truth.num_ages(); ++x) {
        out << "beta," << ds.age_labels[x] << ',' << fmt_g17(truth.beta(x)) << '\n';
    }
    out << "kappa," << (ds.year_labels.front() - 1) << ',' << fmt_g17(truth.kappa0) << '\n';
    for (Index t = 0; t < truth.num_years(); ++t) {
        out << "kappa," << ds.year_labels[t] << ',' << fmt_g17(truth.kappa(t)) << '\n';
    }
    out << "theta1,," << fmt_g17(truth.theta1) << '\n';
    out << "theta2,," << fmt_g17(truth.theta2) << '\n';
    out << "z,," << truth.z << '\n';
    out << "sigma2_eps,," << fmt_g17(truth.sigma2_eps) << '\n';
    out << "sigma2_omega,," << fmt_g17(truth.sigma2_omega) << '\n';
}

DiagnosticRow trace_diagnostics(const std::string &param, std::optional<long> index,
                                const std::vector<double> &trace) {
    const std::size_t n = trace.size();
    DiagnosticRow row;
    row.param = param;
    row.index = index;
    if (n == 0) {
        throw DataError("empty trace for " + param);
    }
    double mean = 0.0;
    for (double v : trace) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    row.mean = mean;

    const auto autocov = [&](std::size_t lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) {
            acc += (trace[i] - mean) * (trace[i + lag] - mean);
        }
        return acc / static_cast<double>(n);
    };
    const double g0 = autocov(0);
    row.sd = std::sqrt(g0 * static_cast<double>(n) / std::max<double>(1.0, n - 1.0));
    if (!(g0 > 0.0)) {
        row.acf1 = 0.0;
        row.ess = static_cast<double>(n);
        return row;
    }
    row.acf1 = autocov(1) / g0;

    // Geyer initial positive sequence: accumulate paired autocovariances
    // while the pair sums stay positive.
    double tail = 0.0;
    for (std::size_t m = 0;; ++m) {
        const std::size_t l1 = 2 * m + 1;
        const std::size_t l2 = 2 * m + 2;
        if (l2 >= n) {
            break;
        }
        const double pair = autocov(l1) + autocov(l2);
        if (pair <= 0.0) {
            break;
        }
        tail += pair;
    }
    const double tau = 1.0 + 2.0 * tail / g0;
    row.ess = static_cast<double>(n) / std::max(tau, 1e-12);
    row.ess = std::min(row.ess, static_cast<double>(n));
    return row;
}

void write_diagnostics(const std::filesystem::path &path,
                       const std::vector<DiagnosticRow> &rows) {
    auto out = open_out(path);
    out << "param,index,mean,sd,acf1,ess\n";
    for (const auto &row : rows) {
        out << row.param << ',';
        if (row.index) {
            out << *row.index;
        }
        out << ',' << fmt_g17(row.mean) << ',' << fmt_g17(row.sd) << ',' << fmt_g17(row.acf1)
            << ',' << fmt_g17(row.ess) << '\n';
    }
}

} // namespace plnlc
