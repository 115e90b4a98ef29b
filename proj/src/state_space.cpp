#include "plnlc/state_space.hpp"

#include "plnlc/errors.hpp"

#include <cmath>

namespace plnlc {

Moments filter_year_complete(Moments prev, const Eigen::Ref<const Vector> &y,
                             const ParamState &state, Index t) {
    const double pred_mean = prev.mean + state.theta1 + state.theta2 * static_cast<double>(t);
    const double pred_var = prev.var + state.sigma2_omega;
    const double s2e = state.sigma2_eps;
    if (!(pred_var > 0.0) && !(s2e > 0.0)) {
        throw NumericError("degenerate filter: zero prediction variance and zero sigma2_eps");
    }
    // K = R beta^T (s2e I + R beta beta^T)^{-1}; Sherman-Morrison collapses the
    // correction to scalars: mean += R (beta^T e) / (s2e + R |beta|^2).
    const Vector innovation = y - state.alpha - state.beta * pred_mean;
    const double bb = state.beta.squaredNorm();
    const double denom = s2e + pred_var * bb;
    Moments out;
    out.mean = pred_mean + pred_var * state.beta.dot(innovation) / denom;
    out.var = pred_var * s2e / denom;
    return out;
}

Moments filter_year_sequential(Moments prev, const Eigen::Ref<const Vector> &y,
                               const Eigen::Ref<const Eigen::ArrayXi> &mask_col,
                               const ParamState &state, Index t) {
    double mean = prev.mean + state.theta1 + state.theta2 * static_cast<double>(t);
    double var = prev.var + state.sigma2_omega;
    const double s2e = state.sigma2_eps;
    const Index M = y.size();
    for (Index x = 0; x < M; ++x) {
        if (mask_col(x) == 0) {
            continue; // gain and innovation are zero; moments pass through
        }
        if (!(var > 0.0)) {
            if (!(s2e > 0.0)) {
                throw NumericError("degenerate sequential filter: zero variances");
            }
            continue; // point mass already; observations cannot sharpen it
        }
        const double b = state.beta(x);
        const double innovation = y(x) - state.alpha(x) - b * mean;
        const double gain = b / (b * b + s2e / var);
        mean += gain * innovation;
        // (1 - gain b) var in the product form that cannot round negative
        var = var * s2e / (b * b * var + s2e);
    }
    Moments out;
    out.mean = mean;
    out.var = var;
    return out;
}

FilterMoments forward_filter(const ParamState &state, const MortalityDataset &ds,
                             const Hyperparams &hp) {
    const Index N = ds.num_years();
    FilterMoments moments;
    moments.at.resize(N + 1);
    moments.at[0] = Moments{hp.mu_kappa0, hp.sigma2_kappa0};
    for (Index t = 1; t <= N; ++t) {
        const auto y = state.log_mu.col(t - 1);
        if (ds.year_complete(t - 1)) {
            moments.at[t] = filter_year_complete(moments.at[t - 1], y, state, t);
        } else {
            moments.at[t] =
                filter_year_sequential(moments.at[t - 1], y, ds.mask.col(t - 1), state, t);
        }
    }
    return moments;
}

void backward_sample(const FilterMoments &moments, ParamState &state, RngStream &rng) {
    const Index N = moments.num_years();
    const double s2w = state.sigma2_omega;
    double next = rng.normal(moments.at[N].mean, moments.at[N].var);
    state.kappa(N - 1) = next;
    for (Index t = N - 1; t >= 0; --t) {
        const Moments &m = moments.at[t];
        const double denom = m.var + s2w;
        if (!(denom > 0.0)) {
            throw NumericError("degenerate smoother: var_t + sigma2_omega = 0");
        }
        const double shift = state.theta1 + state.theta2 * static_cast<double>(t + 1);
        const double cond_mean = m.mean + m.var * (next - m.mean - shift) / denom;
        // var - var^2/denom in the product form that cannot round negative
        const double cond_var = m.var * s2w / denom;
        next = rng.normal(cond_mean, cond_var);
        if (t == 0) {
            state.kappa0 = next;
        } else {
            state.kappa(t - 1) = next;
        }
    }
}

FilterMoments update_kappa(ParamState &state, const MortalityDataset &ds, const Hyperparams &hp,
                           RngStream &rng) {
    FilterMoments moments = forward_filter(state, ds, hp);
    backward_sample(moments, state, rng);
    return moments;
}

} // namespace plnlc
