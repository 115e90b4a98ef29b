#include "plnlc/cli.hpp"

#include "plnlc/config.hpp"
#include "plnlc/dataset.hpp"
#include "plnlc/errors.hpp"
#include "plnlc/forecast.hpp"
#include "plnlc/io.hpp"
#include "plnlc/lc_init.hpp"
#include "plnlc/sampler.hpp"
#include "plnlc/synth.hpp"

#include <CLI11.hpp>

#include <exception>
#include <fstream>
#include <iostream>
#include <thread>

namespace plnlc {

namespace {

namespace fs = std::filesystem;

fs::path require_out_dir(const KeyValueConfig &cfg) {
    const fs::path dir = cfg.require_string("out_dir");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ConfigError("out_dir is not a writable directory: " + dir.string());
    }
    return dir;
}

SamplerConfig sampler_config(const KeyValueConfig &cfg) {
    SamplerConfig scfg;
    scfg.n_iter = static_cast<int>(cfg.get_long("n_iter", 2000));
    scfg.n_burn = static_cast<int>(cfg.get_long("n_burn", 100));
    scfg.tune_cycles = static_cast<int>(cfg.get_long("tune_cycles", 20));
    scfg.tune_cycle_length = static_cast<int>(cfg.get_long("tune_cycle_length", 100));
    scfg.pilot_iter = static_cast<int>(cfg.get_long("pilot_iter", 500));
    scfg.thin = static_cast<int>(cfg.get_long("thin", 1));
    scfg.seed = cfg.get_u64("seed", 0);
    scfg.dump_filter_moments = cfg.get_bool("dump_filter_moments", false);
    scfg.validate();
    return scfg;
}

/// Consume and validate the hyperparameter keys; the age-profile prior means
/// are sized once the dataset is known.
Hyperparams hyperparams(const KeyValueConfig &cfg) {
    Hyperparams hp;
    hp.a_sigma_alpha = cfg.get_double("a_sigma_alpha", hp.a_sigma_alpha);
    hp.b_sigma_alpha = cfg.get_double("b_sigma_alpha", hp.b_sigma_alpha);
    hp.a_sigma_beta = cfg.get_double("a_sigma_beta", hp.a_sigma_beta);
    hp.b_sigma_beta = cfg.get_double("b_sigma_beta", hp.b_sigma_beta);
    hp.a_zeta = cfg.get_double("a_zeta", hp.a_zeta);
    hp.b_zeta = cfg.get_double("b_zeta", hp.b_zeta);
    hp.p0 = cfg.get_double("p0", hp.p0);
    if (const auto mu = cfg.get_optional_double("mu_kappa0")) {
        hp.mu_kappa0 = *mu;
        hp.kappa0_specified = true;
    }
    if (const auto s2 = cfg.get_optional_double("sigma2_kappa0")) {
        if (!(*s2 > 0.0)) {
            throw ConfigError("sigma2_kappa0 must be positive");
        }
        hp.sigma2_kappa0 = *s2;
        if (!cfg.has("mu_kappa0")) {
            throw ConfigError("sigma2_kappa0 requires mu_kappa0 as well");
        }
    } else if (cfg.has("mu_kappa0")) {
        throw ConfigError("mu_kappa0 requires sigma2_kappa0 as well");
    }
    for (double v : {hp.a_sigma_alpha, hp.b_sigma_alpha, hp.a_sigma_beta, hp.b_sigma_beta,
                     hp.a_zeta, hp.b_zeta}) {
        if (!(v > 0.0)) {
            throw ConfigError("inverse-gamma hyperparameters must be positive");
        }
    }
    if (!(hp.p0 > 0.0) || !(hp.p0 < 1.0)) {
        throw ConfigError("p0 must lie in the open interval (0, 1)");
    }
    return hp;
}

struct EchoWriter {
    std::vector<std::string> comments;
    std::vector<std::pair<std::string, std::string>> keys;

    void key(const std::string &k, const std::string &v) { keys.emplace_back(k, v); }
    void key(const std::string &k, long v) { key(k, std::to_string(v)); }
    void key(const std::string &k, std::uint64_t v) { key(k, std::to_string(v)); }
    void key(const std::string &k, bool v) { key(k, v ? std::string("true") : std::string("false")); }
    void key(const std::string &k, double v) { key(k, fmt_g17(v)); }

    void write(const fs::path &path) const {
        std::ofstream out(path);
        if (!out) {
            throw DataError("cannot write manifest: " + path.string());
        }
        for (const auto &c : comments) {
            out << "# " << c << '\n';
        }
        for (const auto &[k, v] : keys) {
            out << k << " = " << v << '\n';
        }
    }
};

struct ChainOutcome {
    TimeStructure structure;
    double mean_z;
};

ChainOutcome fit_one_chain(const MortalityDataset &ds, const Hyperparams &hp,
                           SamplerConfig scfg, const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    const InitialValues init = initial_values(ds, hp, scfg);

    std::ofstream moments_file;
    MomentsSink sink;
    if (scfg.dump_filter_moments) {
        moments_file.open(dir / "filter_moments.csv");
        moments_file << "t,mean_k,var_k\n";
        sink = [&moments_file](int, const FilterMoments &m) {
            for (std::size_t t = 0; t < m.at.size(); ++t) {
                moments_file << t << ',' << fmt_g17(m.at[t].mean) << ',' << fmt_g17(m.at[t].var)
                             << '\n';
            }
        };
    }

    const ChainStore chain = run_chain(ds, init.hyperparams, scfg, init.state, sink);
    const TimeStructure structure = select_time_structure(chain);
    const auto rows = summarize(chain, structure, ds);

    write_traces(dir, chain, ds);
    write_summary(dir / "summary.csv", rows);
    write_acceptance(dir / "acceptance.csv", chain, ds);

    double mean_z = 0.0;
    for (int z : chain.z_trace) {
        mean_z += z;
    }
    mean_z /= static_cast<double>(chain.z_trace.size());
    return ChainOutcome{structure, mean_z};
}

int cmd_fit(const fs::path &config_path) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
    const std::string dataset_path = cfg.require_string("dataset");
    const fs::path out_dir = require_out_dir(cfg);
    const SamplerConfig scfg = sampler_config(cfg);
    const long chains = cfg.get_long("chains", 1);
    if (chains < 1) {
        throw ConfigError("chains must be >= 1");
    }

    Hyperparams hp = hyperparams(cfg);
    cfg.reject_unread();

    const MortalityDataset ds = load_dataset(dataset_path);
    const Hyperparams age_defaults = Hyperparams::defaults(ds.num_ages());
    hp.mu_alpha = age_defaults.mu_alpha;
    hp.mu_beta = age_defaults.mu_beta;

    std::vector<ChainOutcome> outcomes(static_cast<std::size_t>(chains),
                                       ChainOutcome{TimeStructure::RandomWalkDrift, 0.0});
    if (chains == 1) {
        outcomes[0] = fit_one_chain(ds, hp, scfg, out_dir);
    } else {
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
        for (long c = 0; c < chains; ++c) {
            workers.emplace_back([&, c]() {
                try {
                    SamplerConfig chain_cfg = scfg;
                    chain_cfg.seed = RngStream::derive_seed(scfg.seed, static_cast<std::uint64_t>(c));
                    const fs::path dir = out_dir / ("chain_" + std::to_string(c));
                    outcomes[static_cast<std::size_t>(c)] = fit_one_chain(ds, hp, chain_cfg, dir);
                } catch (...) {
                    errors[static_cast<std::size_t>(c)] = std::current_exception();
                }
            });
        }
        for (auto &w : workers) {
            w.join();
        }
        for (const auto &err : errors) {
            if (err) {
                std::rethrow_exception(err);
            }
        }
    }

    EchoWriter manifest;
    manifest.comments.push_back("plnlc fit manifest");
    if (chains == 1) {
        manifest.comments.push_back("selected_structure = " + to_string(outcomes[0].structure));
        manifest.comments.push_back("mean_z = " + fmt_g17(outcomes[0].mean_z));
    } else {
        for (long c = 0; c < chains; ++c) {
            const auto &o = outcomes[static_cast<std::size_t>(c)];
            manifest.comments.push_back("chain_" + std::to_string(c) + ": selected_structure = " +
                                        to_string(o.structure) + ", mean_z = " +
                                        fmt_g17(o.mean_z));
        }
    }
    manifest.key("dataset", dataset_path);
    manifest.key("out_dir", out_dir.string());
    manifest.key("seed", scfg.seed);
    manifest.key("chains", chains);
    manifest.key("n_iter", static_cast<long>(scfg.n_iter));
    manifest.key("n_burn", static_cast<long>(scfg.n_burn));
    manifest.key("tune_cycles", static_cast<long>(scfg.tune_cycles));
    manifest.key("tune_cycle_length", static_cast<long>(scfg.tune_cycle_length));
    manifest.key("pilot_iter", static_cast<long>(scfg.pilot_iter));
    manifest.key("thin", static_cast<long>(scfg.thin));
    manifest.key("dump_filter_moments", scfg.dump_filter_moments);
    manifest.key("a_sigma_alpha", hp.a_sigma_alpha);
    manifest.key("b_sigma_alpha", hp.b_sigma_alpha);
    manifest.key("a_sigma_beta", hp.a_sigma_beta);
    manifest.key("b_sigma_beta", hp.b_sigma_beta);
    manifest.key("a_zeta", hp.a_zeta);
    manifest.key("b_zeta", hp.b_zeta);
    manifest.key("p0", hp.p0);
    if (hp.kappa0_specified) {
        manifest.key("mu_kappa0", hp.mu_kappa0);
        manifest.key("sigma2_kappa0", hp.sigma2_kappa0);
    }
    manifest.write(out_dir / "manifest.txt");

    std::cout << "fit complete: " << out_dir.string() << "\n";
    if (chains == 1) {
        std::cout << "selected structure: " << to_string(outcomes[0].structure)
                  << " (mean z = " << outcomes[0].mean_z << ")\n";
    }
    return 0;
}

int cmd_forecast(const fs::path &config_path) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
    const fs::path out_dir = require_out_dir(cfg);
    const fs::path fit_dir = cfg.get_string("fit_dir", out_dir.string());
    const long horizon = cfg.get_long("horizon", 23);
    const std::uint64_t seed = cfg.get_u64("seed", 0);
    const bool keep_draws = cfg.get_bool("write_draws", false);
    const std::string structure_override = cfg.get_string("structure", "");
    cfg.reject_unread();

    if (horizon < 0) {
        throw ConfigError("horizon must be >= 0");
    }
    if (horizon == 0) {
        std::cout << "horizon = 0: nothing to forecast\n";
        return 0;
    }

    const LoadedTraces traces = read_traces(fit_dir);
    TimeStructure structure;
    if (!structure_override.empty()) {
        const auto parsed = time_structure_from_string(structure_override);
        if (!parsed) {
            throw ConfigError("structure must be RandomWalkDrift or DriftPlusTrend");
        }
        structure = *parsed;
    } else {
        double mean_z = 0.0;
        for (int z : traces.draws.z) {
            mean_z += z;
        }
        mean_z /= static_cast<double>(traces.draws.z.size());
        structure =
            mean_z > 0.5 ? TimeStructure::DriftPlusTrend : TimeStructure::RandomWalkDrift;
    }

    RngStream rng(seed);
    const ForecastResult result =
        forecast(traces.draws, structure, static_cast<int>(horizon), rng, keep_draws);
    write_forecast(out_dir / "forecast.csv", result, traces.age_labels, traces.last_year + 1);
    if (keep_draws) {
        write_forecast_draws(out_dir / "forecast_draws.csv", result, traces.age_labels,
                             traces.last_year + 1);
    }
    std::cout << "forecast complete: " << (out_dir / "forecast.csv").string() << " ("
              << to_string(structure) << ", horizon " << horizon << ")\n";
    return 0;
}

int cmd_impute(const fs::path &config_path) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
    const std::string dataset_path = cfg.require_string("dataset");
    const fs::path out_dir = require_out_dir(cfg);
    cfg.reject_unread();

    const MortalityDataset ds = load_dataset(dataset_path);
    const ImputedDataset interpolated = linear_interpolate_impute(ds);
    const Matrix log_rates =
        ((interpolated.completed.deaths.array() + 0.5) / interpolated.completed.exposures.array())
            .log()
            .matrix();
    const LcFit fit = fit_lc_svd(log_rates);
    const ImputedDataset refined = svd_impute(interpolated, fit);
    write_dataset(refined.completed, out_dir / "imputed.csv");

    std::ofstream out(out_dir / "lc_fit.csv");
    out << "param,index,value\n";
    for (Index x = 0; x < ds.num_ages(); ++x) {
        out << "alpha," << ds.age_labels[x] << ',' << fmt_g17(fit.alpha(x)) << '\n';
    }
    for (Index x = 0; x < ds.num_ages(); ++x) {
        out << "beta," << ds.age_labels[x] << ',' << fmt_g17(fit.beta(x)) << '\n';
    }
    for (Index t = 0; t < ds.num_years(); ++t) {
        out << "kappa," << ds.year_labels[t] << ',' << fmt_g17(fit.kappa(t)) << '\n';
    }
    out << "residual_sd,," << fmt_g17(fit.residual_sd) << '\n';

    std::cout << "imputed dataset: " << (out_dir / "imputed.csv").string() << "\n";
    return 0;
}

int cmd_synth(const fs::path &config_path) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
    const fs::path out_dir = require_out_dir(cfg);

    SynthSpec spec;
    const std::string preset = cfg.get_string("preset", "none");
    if (preset == "census_block") {
        spec = SynthSpec::census_block_preset();
    } else if (preset != "none") {
        throw ConfigError("unknown preset '" + preset + "' (use none or census_block)");
    }
    spec.num_ages = cfg.get_long("M", spec.num_ages);
    spec.num_years = cfg.get_long("N", spec.num_years);
    spec.first_age = cfg.get_long("first_age", spec.first_age);
    spec.first_year = cfg.get_long("first_year", spec.first_year);
    spec.exposure = cfg.get_double("exposure", spec.exposure);
    if (const auto v = cfg.get_optional_double("kappa0")) {
        spec.kappa0 = *v;
        spec.kappa0_set = true;
    }
    if (const auto v = cfg.get_optional_double("theta1")) {
        spec.theta1 = *v;
        spec.theta1_set = true;
    }
    spec.theta2 = cfg.get_double("theta2", spec.theta2);
    spec.sigma2_eps = cfg.get_double("sigma2_eps", spec.sigma2_eps);
    spec.sigma2_omega = cfg.get_double("sigma2_omega", spec.sigma2_omega);

    const std::string pattern = cfg.get_string(
        "missing_pattern", spec.pattern == SynthSpec::Pattern::Block ? "block" : "none");
    if (pattern == "none") {
        spec.pattern = SynthSpec::Pattern::None;
    } else if (pattern == "sporadic") {
        spec.pattern = SynthSpec::Pattern::Sporadic;
        spec.sporadic_p = cfg.get_double("missing_p", spec.sporadic_p);
        if (!(spec.sporadic_p >= 0.0) || !(spec.sporadic_p < 1.0)) {
            throw ConfigError("missing_p must lie in [0, 1)");
        }
    } else if (pattern == "block") {
        spec.pattern = SynthSpec::Pattern::Block;
        if (cfg.has("block_ages")) {
            spec.block_age_ranges = parse_label_ranges(cfg.require_string("block_ages"));
        }
        if (cfg.has("block_years")) {
            spec.block_years = parse_label_list(cfg.require_string("block_years"));
        }
        if (spec.block_age_ranges.empty() || spec.block_years.empty()) {
            throw ConfigError("block pattern needs block_ages and block_years");
        }
    } else {
        throw ConfigError("missing_pattern must be none, sporadic, or block");
    }
    const std::uint64_t seed = cfg.get_u64("seed", 1);
    cfg.reject_unread();

    RngStream rng(seed);
    const SynthResult result = generate_synthetic(spec, rng);
    write_dataset(result.data, out_dir / "synthetic.csv");
    write_truth(out_dir / "truth.csv", result.truth, result.data);
    std::cout << "synthetic dataset: " << (out_dir / "synthetic.csv").string()
              << " (missing fraction " << missing_fraction(result.data) << ")\n";
    return 0;
}

int cmd_diagnose(const fs::path &config_path) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
    const fs::path out_dir = require_out_dir(cfg);
    const fs::path fit_dir = cfg.get_string("fit_dir", out_dir.string());
    cfg.reject_unread();

    const LoadedTraces traces = read_traces(fit_dir);
    const Index J = traces.draws.num_draws();
    std::vector<DiagnosticRow> rows;
    std::vector<double> buf(static_cast<std::size_t>(J));
    const auto add_matrix = [&](const std::string &name, const Matrix &values,
                                const std::vector<long> &labels) {
        for (Index i = 0; i < values.rows(); ++i) {
            for (Index j = 0; j < J; ++j) {
                buf[static_cast<std::size_t>(j)] = values(i, j);
            }
            rows.push_back(trace_diagnostics(name, labels[static_cast<std::size_t>(i)], buf));
        }
    };
    add_matrix("alpha", traces.draws.alpha, traces.age_labels);
    add_matrix("beta", traces.draws.beta, traces.age_labels);
    add_matrix("kappa", traces.draws.kappa, traces.kappa_labels);
    const auto add_vector = [&](const std::string &name, const Vector &values) {
        for (Index j = 0; j < J; ++j) {
            buf[static_cast<std::size_t>(j)] = values(j);
        }
        rows.push_back(trace_diagnostics(name, std::nullopt, buf));
    };
    add_vector("theta1", traces.draws.theta1);
    add_vector("theta2", traces.draws.theta2);
    add_vector("sigma2_eps", traces.draws.sigma2_eps);
    add_vector("sigma2_omega", traces.draws.sigma2_omega);
    {
        for (Index j = 0; j < J; ++j) {
            buf[static_cast<std::size_t>(j)] =
                static_cast<double>(traces.draws.z[static_cast<std::size_t>(j)]);
        }
        rows.push_back(trace_diagnostics("z", std::nullopt, buf));
    }
    write_diagnostics(out_dir / "diagnostics.csv", rows);
    std::cout << "diagnostics: " << (out_dir / "diagnostics.csv").string() << "\n";
    return 0;
}

} // namespace

int run_cli(int argc, const char *const *argv) {
    CLI::App app{"Bayesian mortality projection for incomplete death-count tables"};
    app.require_subcommand(1);

    std::string config_path;
    const auto add = [&](const std::string &name, const std::string &desc) {
        CLI::App *sub = app.add_subcommand(name, desc);
        sub->add_option("config", config_path, "key = value config file")->required();
        return sub;
    };
    CLI::App *synth = add("synth", "generate a synthetic dataset plus its truth file");
    CLI::App *impute = add("impute", "linear + SVD imputation only; writes a completed table");
    CLI::App *fit = add("fit", "run the MCMC sampler and write traces and summaries");
    CLI::App *forecast_cmd = add("forecast", "posterior predictive projection from a fit");
    CLI::App *diagnose = add("diagnose", "per-parameter trace statistics from a fit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(config_path);
        }
        if (impute->parsed()) {
            return cmd_impute(config_path);
        }
        if (fit->parsed()) {
            return cmd_fit(config_path);
        }
        if (forecast_cmd->parsed()) {
            return cmd_forecast(config_path);
        }
        if (diagnose->parsed()) {
            return cmd_diagnose(config_path);
        }
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError &e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError &e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 4;
    }
    return 2;
}

} // namespace plnlc
