#include "plnlc/sampler.hpp"

#include "plnlc/errors.hpp"
#include "plnlc/forecast.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace plnlc {

void SamplerConfig::validate() const {
    if (n_iter <= 0 || n_burn < 0 || tune_cycles < 0 || tune_cycle_length <= 0 ||
        pilot_iter <= 0 || thin < 1) {
        throw ConfigError("sampler counts must be positive (n_burn/tune_cycles may be 0)");
    }
    if (n_iter % thin != 0) {
        throw ConfigError("thin must divide n_iter");
    }
}

ArrayXX ChainStore::acceptance_rate() const {
    ArrayXX rate = recorded_accepts.cast<double>() / recorded_attempts.cast<double>();
    return rate;
}

std::string to_string(TimeStructure s) {
    return s == TimeStructure::DriftPlusTrend ? "DriftPlusTrend" : "RandomWalkDrift";
}

std::optional<TimeStructure> time_structure_from_string(const std::string &s) {
    if (s == "DriftPlusTrend") {
        return TimeStructure::DriftPlusTrend;
    }
    if (s == "RandomWalkDrift") {
        return TimeStructure::RandomWalkDrift;
    }
    return std::nullopt;
}

FilterMoments gibbs_sweep(ParamState &state, const MortalityDataset &ds, const Hyperparams &hp,
                          const ArrayXX &sigma2_prop, RngStream &rng, Eigen::ArrayXXi *accepts,
                          Eigen::ArrayXXi *attempts) {
    update_log_mu(state, ds, sigma2_prop, rng, accepts, attempts);
    const ConstrainedPrior prior = constrained_prior(hp, state.sigma2_alpha, state.sigma2_beta);
    update_alpha_beta(state, ds, prior, rng);
    update_sigma2_alpha(state, hp, rng);
    update_sigma2_beta(state, hp, rng);
    FilterMoments moments = update_kappa(state, ds, hp, rng);
    update_theta1(state, rng);
    update_spike(state, hp, rng);
    update_zeta(state, hp, rng);
    update_sigma2_omega(state, rng);
    update_sigma2_eps(state, ds, rng);
    return moments;
}

ChainStore run_chain(const MortalityDataset &ds, const Hyperparams &hp, const SamplerConfig &cfg,
                     const ParamState &init, const MomentsSink &sink) {
    cfg.validate();
    validate_state(init, "initial state");
    const auto start = std::chrono::steady_clock::now();

    const Index M = ds.num_ages();
    const Index N = ds.num_years();
    ParamState state = init;
    RngStream rng(cfg.seed);
    ProposalTuner tuner =
        ProposalTuner::make(M, N, 0.01, cfg.tune_cycle_length, cfg.tune_cycles);

    char label[96];
    for (int cycle = 0; cycle < cfg.tune_cycles; ++cycle) {
        for (int i = 0; i < cfg.tune_cycle_length; ++i) {
            gibbs_sweep(state, ds, hp, tuner.sigma2_prop, rng, &tuner.accept_counts,
                        &tuner.attempt_counts);
            std::snprintf(label, sizeof label, "tuning cycle %d iteration %d", cycle + 1, i + 1);
            validate_state(state, label);
        }
        tune_proposals(tuner);
    }

    for (int i = 0; i < cfg.n_burn; ++i) {
        gibbs_sweep(state, ds, hp, tuner.sigma2_prop, rng);
        std::snprintf(label, sizeof label, "burn-in iteration %d", i + 1);
        validate_state(state, label);
    }

    ChainStore store;
    store.seed = cfg.seed;
    store.sigma2_prop = tuner.sigma2_prop;
    store.tune_cycle_rates = tuner.last_cycle_rates;
    store.recorded_accepts = Eigen::ArrayXXi::Zero(M, N);
    store.recorded_attempts = Eigen::ArrayXXi::Zero(M, N);
    store.draws.reserve(static_cast<std::size_t>(cfg.n_iter / cfg.thin));
    for (int i = 0; i < cfg.n_iter; ++i) {
        const FilterMoments moments = gibbs_sweep(state, ds, hp, tuner.sigma2_prop, rng,
                                                  &store.recorded_accepts,
                                                  &store.recorded_attempts);
        std::snprintf(label, sizeof label, "recorded iteration %d", i + 1);
        validate_state(state, label);
        if (sink) {
            sink(i + 1, moments);
        }
        if ((i + 1) % cfg.thin == 0) {
            store.draws.push_back(state);
            store.z_trace.push_back(state.z);
        }
    }

    store.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return store;
}

TimeStructure select_time_structure(const ChainStore &chain) {
    if (chain.z_trace.empty()) {
        throw NumericError("cannot select time structure from an empty chain");
    }
    double mean_z = 0.0;
    for (int z : chain.z_trace) {
        mean_z += z;
    }
    mean_z /= static_cast<double>(chain.z_trace.size());
    return mean_z > 0.5 ? TimeStructure::DriftPlusTrend : TimeStructure::RandomWalkDrift;
}

namespace {

SummaryRow summarize_component(const std::string &name, std::optional<long> index,
                               const std::vector<double> &sample, double level) {
    SummaryRow row;
    row.param = name;
    row.index = index;
    double mean = 0.0;
    for (double v : sample) {
        mean += v;
    }
    row.mean = mean / static_cast<double>(sample.size());
    const auto [lo, hi] = hpd_interval(sample, level);
    row.hpd_lo = lo;
    row.hpd_hi = hi;
    return row;
}

} // namespace

std::vector<SummaryRow> summarize(const ChainStore &chain, TimeStructure structure,
                                  const MortalityDataset &ds, double level) {
    const int want_z = structure == TimeStructure::DriftPlusTrend ? 1 : 0;
    std::vector<const ParamState *> kept;
    for (const ParamState &s : chain.draws) {
        if (s.z == want_z) {
            kept.push_back(&s);
        }
    }
    if (kept.empty()) {
        throw NumericError("no draws consistent with the selected time structure (" +
                           to_string(structure) + "); run a longer chain");
    }
    const std::size_t J = kept.size();
    std::vector<double> sample(J);
    std::vector<SummaryRow> rows;
    const auto collect = [&](auto getter) {
        for (std::size_t j = 0; j < J; ++j) {
            sample[j] = getter(*kept[j]);
        }
        return sample;
    };

    const Index M = ds.num_ages();
    const Index N = ds.num_years();
    for (Index x = 0; x < M; ++x) {
        rows.push_back(summarize_component(
            "alpha", ds.age_labels[x], collect([x](const ParamState &s) { return s.alpha(x); }),
            level));
    }
    for (Index x = 0; x < M; ++x) {
        rows.push_back(summarize_component(
            "beta", ds.age_labels[x], collect([x](const ParamState &s) { return s.beta(x); }),
            level));
    }
    rows.push_back(summarize_component(
        "kappa", ds.year_labels.front() - 1,
        collect([](const ParamState &s) { return s.kappa0; }), level));
    for (Index t = 0; t < N; ++t) {
        rows.push_back(summarize_component(
            "kappa", ds.year_labels[t], collect([t](const ParamState &s) { return s.kappa(t); }),
            level));
    }
    rows.push_back(summarize_component(
        "theta1", std::nullopt, collect([](const ParamState &s) { return s.theta1; }), level));
    rows.push_back(summarize_component(
        "theta2", std::nullopt, collect([](const ParamState &s) { return s.theta2; }), level));
    rows.push_back(summarize_component(
        "zeta", std::nullopt, collect([](const ParamState &s) { return s.zeta; }), level));
    rows.push_back(summarize_component(
        "sigma2_alpha", std::nullopt,
        collect([](const ParamState &s) { return s.sigma2_alpha; }), level));
    rows.push_back(summarize_component(
        "sigma2_beta", std::nullopt, collect([](const ParamState &s) { return s.sigma2_beta; }),
        level));
    rows.push_back(summarize_component(
        "sigma2_eps", std::nullopt, collect([](const ParamState &s) { return s.sigma2_eps; }),
        level));
    rows.push_back(summarize_component(
        "sigma2_omega", std::nullopt,
        collect([](const ParamState &s) { return s.sigma2_omega; }), level));
    return rows;
}

} // namespace plnlc
