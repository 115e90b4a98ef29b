#ifndef PLNLC_RNG_HPP
#define PLNLC_RNG_HPP

#include <cstdint>
#include <random>

namespace plnlc {

/// Seeded random stream with hand-rolled variate transforms.
///
/// std::mt19937_64 output is pinned by the standard, but the standard
/// library distributions are not, so every transform here is implemented
/// directly on the raw 64-bit stream: one seed gives one draw sequence on
/// every platform.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Mix a salt into a seed; used to derive independent streams (one per
    /// chain, one for the pilot, ...).
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

    /// Derive an independent child stream.
    RngStream child(std::uint64_t salt) const { return RngStream(derive_seed(seed_, salt)); }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal();

    double normal(double mean, double variance);

    bool bernoulli(double p) { return uniform() < p; }

    /// Gamma(shape, scale = 1) by Marsaglia-Tsang squeeze.
    double gamma(double shape);

    /// Inverse-gamma with density proportional to x^{-a-1} exp(-b/x).
    double inv_gamma(double shape, double rate);

    /// Poisson counts; inversion for small means, PTRD rejection otherwise.
    long long poisson(double mean);

  private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

} // namespace plnlc

#endif // PLNLC_RNG_HPP
