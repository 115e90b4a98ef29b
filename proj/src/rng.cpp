#include "plnlc/rng.hpp"

#include "plnlc/errors.hpp"

#include <cmath>

namespace plnlc {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
} // namespace

double RngStream::normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double RngStream::normal(double mean, double variance) {
    return mean + std::sqrt(variance) * normal();
}

double RngStream::gamma(double shape) {
    if (!(shape > 0.0)) {
        throw NumericError("gamma draw requires shape > 0");
    }
    if (shape < 1.0) {
        // Boost to shape + 1 and scale back.
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform_pos(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        if (u < 1.0 - 0.0331 * x * x * x * x) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

double RngStream::inv_gamma(double shape, double rate) {
    if (!(rate > 0.0)) {
        throw NumericError("inverse-gamma draw requires rate > 0");
    }
    return rate / gamma(shape);
}

long long RngStream::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw NumericError("poisson draw requires a finite nonnegative mean");
    }
    if (mean == 0.0) {
        return 0;
    }
    if (mean < 10.0) {
        // Inversion by sequential search.
        const double l = std::exp(-mean);
        long long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform_pos();
        } while (p > l);
        return k - 1;
    }
    // Hormann's PTRD transformed rejection.
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u = uniform() - 0.5;
        const double v = uniform_pos();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<long long>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        const double log_accept = std::log(v * inv_alpha / (a / (us * us) + b));
        if (log_accept <= k * std::log(mean) - mean - std::lgamma(k + 1.0)) {
            return static_cast<long long>(k);
        }
    }
}

std::uint64_t RngStream::derive_seed(std::uint64_t x, std::uint64_t salt) {
    x += 0x9e3779b97f4a7c15ULL * (salt + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace plnlc
