#include "plnlc/dataset.hpp"

#include "plnlc/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

namespace plnlc {

namespace {

std::string trim(const std::string &s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) {
        return "";
    }
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

long parse_label(const std::string &s, const char *what, int line_no) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DataError("line " + std::to_string(line_no) + ": malformed " + what + " '" + s + "'");
    }
    return v;
}

double parse_real(const std::string &s, const char *what, int line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size() || !std::isfinite(v)) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception &) {
        throw DataError("line " + std::to_string(line_no) + ": malformed " + what + " '" + s + "'");
    }
}

} // namespace

MortalityDataset load_dataset(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open dataset file: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty dataset file: " + path.string());
    }
    {
        const auto header = split_fields(line);
        if (header.size() != 4 || header[0] != "age" || header[1] != "year" ||
            header[2] != "deaths" || header[3] != "exposure") {
            throw DataError("expected header 'age,year,deaths,exposure' in " + path.string());
        }
    }

    struct Cell {
        bool observed;
        double deaths;
        double exposure;
    };
    std::map<std::pair<long, long>, Cell> cells;
    std::set<long> ages;
    std::set<long> years;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto f = split_fields(line);
        if (f.size() != 4) {
            throw DataError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                            std::to_string(f.size()));
        }
        const long age = parse_label(f[0], "age", line_no);
        const long year = parse_label(f[1], "year", line_no);
        const bool d_empty = f[2].empty();
        const bool e_empty = f[3].empty();
        if (d_empty != e_empty) {
            throw DataError("line " + std::to_string(line_no) +
                            ": half-observed cell (exactly one of deaths/exposure empty)");
        }
        Cell cell{false, 0.0, 0.0};
        if (!d_empty) {
            const long long d = static_cast<long long>(parse_label(f[2], "deaths", line_no));
            const double e = parse_real(f[3], "exposure", line_no);
            if (d < 0) {
                throw DataError("line " + std::to_string(line_no) + ": negative death count");
            }
            if (!(e > 0.0)) {
                throw DataError("line " + std::to_string(line_no) +
                                ": nonpositive exposure on an observed cell");
            }
            if (static_cast<double>(d) > e) {
                throw DataError("line " + std::to_string(line_no) +
                                ": deaths exceed exposure (data error)");
            }
            cell = Cell{true, static_cast<double>(d), e};
        }
        const auto key = std::make_pair(age, year);
        if (cells.count(key)) {
            throw DataError("line " + std::to_string(line_no) + ": duplicate cell (age " +
                            std::to_string(age) + ", year " + std::to_string(year) + ")");
        }
        cells.emplace(key, cell);
        ages.insert(age);
        years.insert(year);
    }

    MortalityDataset ds;
    ds.age_labels.assign(ages.begin(), ages.end());
    ds.year_labels.assign(years.begin(), years.end());
    const Index M = static_cast<Index>(ds.age_labels.size());
    const Index N = static_cast<Index>(ds.year_labels.size());
    if (M < 2 || N < 2) {
        throw DataError("dataset needs at least 2 ages and 2 years, got " + std::to_string(M) +
                        " x " + std::to_string(N));
    }
    ds.deaths = Matrix::Zero(M, N);
    ds.exposures = Matrix::Zero(M, N);
    ds.mask = MaskGrid::Zero(M, N);
    for (Index x = 0; x < M; ++x) {
        for (Index t = 0; t < N; ++t) {
            const auto it = cells.find({ds.age_labels[x], ds.year_labels[t]});
            if (it == cells.end() || !it->second.observed) {
                continue;
            }
            ds.deaths(x, t) = it->second.deaths;
            ds.exposures(x, t) = it->second.exposure;
            ds.mask(x, t) = 1;
        }
    }
    validate_dataset(ds);
    return ds;
}

void validate_dataset(const MortalityDataset &ds) {
    const Index M = ds.num_ages();
    const Index N = ds.num_years();
    if (M < 2 || N < 2) {
        throw DataError("dataset needs at least 2 ages and 2 years");
    }
    if (ds.exposures.rows() != M || ds.exposures.cols() != N || ds.mask.rows() != M ||
        ds.mask.cols() != N) {
        throw DataError("dataset grids have inconsistent shapes");
    }
    if (static_cast<Index>(ds.age_labels.size()) != M ||
        static_cast<Index>(ds.year_labels.size()) != N) {
        throw DataError("dataset labels do not match grid shape");
    }
    bool any_complete_year = false;
    for (Index t = 0; t < N; ++t) {
        if (ds.year_complete(t)) {
            any_complete_year = true;
        }
    }
    for (Index x = 0; x < M; ++x) {
        for (Index t = 0; t < N; ++t) {
            if (ds.mask(x, t) == 1) {
                const double d = ds.deaths(x, t);
                const double e = ds.exposures(x, t);
                if (!(d >= 0.0) || d != std::floor(d)) {
                    throw DataError("observed deaths must be nonnegative integers");
                }
                if (!(e > 0.0) || !std::isfinite(e)) {
                    throw DataError("observed exposures must be positive and finite");
                }
                if (d > e) {
                    throw DataError("deaths exceed exposure (data error)");
                }
            } else if (ds.mask(x, t) != 0) {
                throw DataError("mask entries must be 0 or 1");
            }
        }
    }
    if (!any_complete_year) {
        throw DataError("dataset has no fully-observed year (required for initialization)");
    }
}

void write_dataset(const MortalityDataset &ds, const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write dataset file: " + path.string());
    }
    out << "age,year,deaths,exposure\n";
    char buf[64];
    for (Index x = 0; x < ds.num_ages(); ++x) {
        for (Index t = 0; t < ds.num_years(); ++t) {
            out << ds.age_labels[x] << ',' << ds.year_labels[t] << ',';
            if (ds.mask(x, t) == 1) {
                out << static_cast<long long>(ds.deaths(x, t)) << ',';
                std::snprintf(buf, sizeof buf, "%.17g", ds.exposures(x, t));
                out << buf;
            } else {
                out << ','; // both fields empty
            }
            out << '\n';
        }
    }
    if (!out) {
        throw DataError("failed writing dataset file: " + path.string());
    }
}

double missing_fraction(const MortalityDataset &ds) {
    const Index total = ds.num_ages() * ds.num_years();
    const Index observed = ds.mask.sum();
    return static_cast<double>(total - observed) / static_cast<double>(total);
}

} // namespace plnlc
