#include "plnlc/forecast.hpp"

#include "plnlc/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace plnlc;

TEST_CASE("hpd window examples from enumerated order statistics") {
    // symmetric 5-point sample, level 0.6: all 3-point windows tie at width
    // 2; the earliest wins
    auto [lo, hi] = hpd_interval({-2.0, -1.0, 0.0, 1.0, 2.0}, 0.6);
    CHECK(lo == -2.0);
    CHECK(hi == 0.0);

    // outlier on the right: windows (0..2)=2, (1..3)=2, (2..10)=8
    std::tie(lo, hi) = hpd_interval({0.0, 1.0, 2.0, 3.0, 10.0}, 0.6);
    CHECK(lo == 0.0);
    CHECK(hi == 2.0);

    // constant sample collapses to a point
    std::tie(lo, hi) = hpd_interval({3.5, 3.5, 3.5, 3.5}, 0.5);
    CHECK(lo == 3.5);
    CHECK(hi == 3.5);

    // unsorted input is handled
    std::tie(lo, hi) = hpd_interval({10.0, 0.0, 3.0, 2.0, 1.0}, 0.6);
    CHECK(lo == 0.0);
    CHECK(hi == 2.0);
}

TEST_CASE("hpd rejects empty and undersized samples") {
    CHECK_THROWS_AS(hpd_interval({}, 0.9), NumericError);
    CHECK_THROWS_AS(hpd_interval({1.0}, 0.9), NumericError);
    CHECK_THROWS_AS(hpd_interval({1.0, 2.0}, 0.3), NumericError); // level*n < 1
}

TEST_CASE("hpd window mass is ceil(level n) of n points") {
    RngStream rng(81);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 50 + static_cast<std::size_t>(rng.uniform() * 500);
        std::vector<double> sample(n);
        for (auto &v : sample) {
            v = rng.normal();
        }
        const double level = 0.5 + 0.45 * rng.uniform();
        const auto [lo, hi] = hpd_interval(sample, level);
        std::size_t inside = 0;
        for (double v : sample) {
            if (v >= lo && v <= hi) {
                ++inside;
            }
        }
        const auto want = static_cast<std::size_t>(
            std::ceil(level * static_cast<double>(n)));
        CHECK(inside >= want);
        CHECK(lo <= hi);
    }
}

TEST_CASE("hpd is never wider than the equal-tailed interval") {
    RngStream rng(82);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 200;
        std::vector<double> sample(n);
        for (auto &v : sample) {
            // skewed sample: exponentiated normal
            v = std::exp(rng.normal()) + 0.2 * rng.normal();
        }
        const double level = 0.9;
        const auto [lo, hi] = hpd_interval(sample, level);

        std::vector<double> sorted = sample;
        std::sort(sorted.begin(), sorted.end());
        const auto cut = static_cast<std::size_t>(
            std::floor((1.0 - level) / 2.0 * static_cast<double>(n)));
        const double et_lo = sorted[cut];
        const double et_hi = sorted[n - 1 - cut];
        CHECK(hi - lo <= et_hi - et_lo + 1e-12);
    }
}

namespace {

PosteriorDraws constant_draws(Index m, Index n, Index j, double kappa_n, double theta1,
                              double s2w, double s2e) {
    PosteriorDraws d;
    d.alpha = Matrix::Zero(m, j);
    d.beta = Matrix::Constant(m, j, 1.0 / static_cast<double>(m));
    d.kappa = Matrix::Constant(n + 1, j, kappa_n);
    d.theta1 = Vector::Constant(j, theta1);
    d.theta2 = Vector::Zero(j);
    d.sigma2_eps = Vector::Constant(j, s2e);
    d.sigma2_omega = Vector::Constant(j, s2w);
    d.z.assign(static_cast<std::size_t>(j), 0);
    return d;
}

} // namespace

TEST_CASE("noiseless forecast is the deterministic drift recursion") {
    const Index m = 3;
    PosteriorDraws d = constant_draws(m, 4, 2, -10.0, -0.5, 0.0, 0.0);
    d.alpha.col(0) << 0.3, 0.0, -0.3;
    d.alpha.col(1) << 0.3, 0.0, -0.3;
    RngStream rng(83);
    const ForecastResult result = forecast(d, TimeStructure::RandomWalkDrift, 3, rng);
    for (int h = 1; h <= 3; ++h) {
        const double kappa = -10.0 - 0.5 * h;
        for (Index x = 0; x < m; ++x) {
            const double expect = d.alpha(x, 0) + kappa / static_cast<double>(m);
            CHECK(result.mean_logmu(x, h - 1) == doctest::Approx(expect).epsilon(1e-12));
            CHECK(result.hpd_lo(x, h - 1) == doctest::Approx(expect).epsilon(1e-12));
            CHECK(result.hpd_hi(x, h - 1) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("two-step predictive moments match the random-walk analytics") {
    // single parameter draw replicated: predictive of kappa_{N+2} is
    // N(kappa_N + 2 theta1, 2 s2w); with beta = 1, alpha = 0, s2e = 0 the
    // forecast draws expose kappa directly
    const Index j = 1000000;
    const double kappa_n = -4.0;
    const double theta1 = -0.25;
    const double s2w = 0.09;
    PosteriorDraws d = constant_draws(1, 3, j, kappa_n, theta1, s2w, 0.0);
    d.beta.setOnes();
    RngStream rng(84);
    const ForecastResult result = forecast(d, TimeStructure::RandomWalkDrift, 2, rng, true);
    REQUIRE(result.has_draws);
    const auto row = result.draws.row(1); // h = 2, x = 0
    double mean = 0.0;
    double second = 0.0;
    for (Index i = 0; i < j; ++i) {
        mean += row(i);
        second += row(i) * row(i);
    }
    mean /= j;
    const double var = second / j - mean * mean;
    const double expect_mean = kappa_n + 2.0 * theta1;
    const double expect_var = 2.0 * s2w;
    const double se_mean = std::sqrt(expect_var / j);
    const double se_var = expect_var * std::sqrt(2.0 / j);
    CHECK(std::fabs(mean - expect_mean) < 3.0 * se_mean);
    CHECK(std::fabs(var - expect_var) < 3.0 * se_var);
}

TEST_CASE("trend draws feed the recursion under DriftPlusTrend") {
    PosteriorDraws d = constant_draws(1, 2, 2, 5.0, 1.0, 0.0, 0.0);
    d.beta.setOnes();
    d.theta2.setConstant(0.5);
    d.z.assign(2, 1);
    RngStream rng(85);
    const ForecastResult result = forecast(d, TimeStructure::DriftPlusTrend, 2, rng);
    // internal years continue at t = 3, 4: kappa_3 = 5 + 1 + 1.5, kappa_4 = +1 + 2
    CHECK(result.mean_logmu(0, 0) == doctest::Approx(7.5));
    CHECK(result.mean_logmu(0, 1) == doctest::Approx(10.5));
}

TEST_CASE("structure-inconsistent chains cannot forecast") {
    PosteriorDraws d = constant_draws(2, 3, 4, -1.0, 0.0, 0.1, 0.1);
    RngStream rng(86);
    CHECK_THROWS_AS(forecast(d, TimeStructure::DriftPlusTrend, 2, rng), NumericError);
    CHECK_THROWS_AS(forecast(d, TimeStructure::RandomWalkDrift, 0, rng), ConfigError);
}

TEST_CASE("predictive variance grows with the horizon") {
    const Index j = 20000;
    PosteriorDraws d = constant_draws(2, 3, j, -8.0, -0.1, 0.25, 0.01);
    RngStream rng(87);
    const ForecastResult result = forecast(d, TimeStructure::RandomWalkDrift, 6, rng, true);
    for (Index x = 0; x < 2; ++x) {
        double prev = 0.0;
        for (int h = 0; h < 6; ++h) {
            const auto row = result.draws.row(h * 2 + x);
            double mean = 0.0;
            double second = 0.0;
            for (Index i = 0; i < j; ++i) {
                mean += row(i);
                second += row(i) * row(i);
            }
            mean /= j;
            const double var = second / j - mean * mean;
            CHECK(var > prev);
            prev = var;
        }
    }
}
