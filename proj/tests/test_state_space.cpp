#include "plnlc/state_space.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace plnlc;

TEST_CASE("zero innovation leaves the filtered mean at the prediction") {
    ParamState s;
    s.alpha = Vector::Constant(3, -1.0);
    s.beta = Vector::Constant(3, 0.4);
    s.theta1 = 0.3;
    s.theta2 = 0.0;
    s.sigma2_eps = 0.5;
    s.sigma2_omega = 0.2;
    const Moments prev{2.0, 0.7};
    const double pred = prev.mean + s.theta1;
    const Vector y = s.alpha + s.beta * pred; // exactly the predicted observation
    const Moments out = filter_year_complete(prev, y, s, 1);
    CHECK(out.mean == doctest::Approx(pred).epsilon(1e-14));
    CHECK(out.var < prev.var + s.sigma2_omega); // information still tightens
}

TEST_CASE("scalar conditioning example: M=1, R=1, s2e=1, y=2") {
    ParamState s;
    s.alpha = Vector::Zero(1);
    s.beta = Vector::Ones(1);
    s.theta1 = 0.0;
    s.theta2 = 0.0;
    s.sigma2_eps = 1.0;
    s.sigma2_omega = 1.0;
    const Moments prev{0.0, 0.0}; // prediction variance = 0 + 1 = 1
    const Vector y = Vector::Constant(1, 2.0);
    const Moments out = filter_year_complete(prev, y, s, 1);
    CHECK(out.mean == doctest::Approx(1.0));
    CHECK(out.var == doctest::Approx(0.5));
}

TEST_CASE("batch filter matches dense joint-Gaussian conditioning (M=2, N=3)") {
    RngStream rng(61);
    for (int rep = 0; rep < 50; ++rep) {
        test::RandomInstance inst = test::random_instance(rng, 2, 3, 0.0);
        inst.mask.setOnes();
        const ParamState s = test::to_param_state(inst);
        const Hyperparams hp = test::to_hyperparams(inst);
        const MortalityDataset ds = test::to_dataset(inst);
        const FilterMoments moments = forward_filter(s, ds, hp);
        const auto cells = test::observed_cells(inst);
        for (Index t = 1; t <= inst.y.cols(); ++t) {
            const auto [mean, var] = test::oracle_filtered(inst.params, inst.y.cols(), cells, t);
            CHECK(moments.at[static_cast<std::size_t>(t)].mean == doctest::Approx(mean).epsilon(1e-8));
            CHECK(moments.at[static_cast<std::size_t>(t)].var ==
                  doctest::Approx(var).epsilon(1e-8));
        }
    }
}

TEST_CASE("fully missing year propagates the state untouched") {
    ParamState s;
    s.alpha = Vector::Constant(4, -1.0);
    s.beta = Vector::Constant(4, 0.25);
    s.theta1 = -0.4;
    s.theta2 = 0.1;
    s.sigma2_eps = 0.3;
    s.sigma2_omega = 0.6;
    const Moments prev{1.5, 0.9};
    const Vector y = Vector::Zero(4);
    const Eigen::ArrayXi mask = Eigen::ArrayXi::Zero(4);
    const Moments out = filter_year_sequential(prev, y, mask, s, 3);
    CHECK(out.mean == doctest::Approx(prev.mean + s.theta1 + s.theta2 * 3.0));
    CHECK(out.var == doctest::Approx(prev.var + s.sigma2_omega));
}

TEST_CASE("sequential equals batch on fully observed years (randomized)") {
    RngStream rng(62);
    for (int rep = 0; rep < 1000; ++rep) {
        test::RandomInstance inst = test::random_instance(rng, 5, 4, 0.0);
        inst.mask.setOnes();
        const ParamState s = test::to_param_state(inst);
        const Index t = 1;
        const Moments prev{inst.params.mu_kappa0, inst.params.sigma2_kappa0};
        const Moments batch = filter_year_complete(prev, inst.y.col(0), s, t);
        const Moments seq =
            filter_year_sequential(prev, inst.y.col(0), inst.mask.col(0), s, t);
        CHECK(std::fabs(batch.mean - seq.mean) < 1e-8);
        CHECK(std::fabs(batch.var - seq.var) < 1e-8);
    }
}

TEST_CASE("sequential filtering matches dense conditioning with a missing cell (M=2)") {
    RngStream rng(63);
    for (int rep = 0; rep < 200; ++rep) {
        test::RandomInstance inst = test::random_instance(rng, 2, 1, 0.0);
        if (inst.y.rows() < 2) {
            continue;
        }
        inst.mask.setOnes();
        inst.mask(1, 0) = 0;
        const ParamState s = test::to_param_state(inst);
        const Hyperparams hp = test::to_hyperparams(inst);
        const MortalityDataset ds = test::to_dataset(inst);
        const FilterMoments moments = forward_filter(s, ds, hp);
        const auto cells = test::observed_cells(inst);
        const auto [mean, var] = test::oracle_filtered(inst.params, inst.y.cols(), cells, 1);
        CHECK(moments.at[1].mean == doctest::Approx(mean).epsilon(1e-8));
        CHECK(moments.at[1].var == doctest::Approx(var).epsilon(1e-8));
    }
}

TEST_CASE("age scan order does not change the final sequential moments") {
    RngStream rng(64);
    for (int rep = 0; rep < 200; ++rep) {
        test::RandomInstance inst = test::random_instance(rng, 5, 1, 0.3);
        const Index m = inst.y.rows();
        const ParamState s = test::to_param_state(inst);
        const Moments prev{inst.params.mu_kappa0, inst.params.sigma2_kappa0};
        const Moments fwd = filter_year_sequential(prev, inst.y.col(0), inst.mask.col(0), s, 1);

        // reverse the age order everywhere
        test::RandomInstance rev = inst;
        for (Index x = 0; x < m; ++x) {
            rev.params.alpha(x) = inst.params.alpha(m - 1 - x);
            rev.params.beta(x) = inst.params.beta(m - 1 - x);
            rev.y(x, 0) = inst.y(m - 1 - x, 0);
            rev.mask(x, 0) = inst.mask(m - 1 - x, 0);
        }
        const ParamState s2 = test::to_param_state(rev);
        const Moments bwd =
            filter_year_sequential(prev, rev.y.col(0), rev.mask.col(0), s2, 1);
        CHECK(fwd.mean == doctest::Approx(bwd.mean).epsilon(1e-10));
        CHECK(fwd.var == doctest::Approx(bwd.var).epsilon(1e-10));
    }
}

TEST_CASE("monotone information: observing one more cell never raises the variance") {
    RngStream rng(65);
    for (int rep = 0; rep < 300; ++rep) {
        test::RandomInstance inst = test::random_instance(rng, 5, 1, 0.5);
        const Index m = inst.y.rows();
        const ParamState s = test::to_param_state(inst);
        const Moments prev{inst.params.mu_kappa0, inst.params.sigma2_kappa0};
        const Moments base = filter_year_sequential(prev, inst.y.col(0), inst.mask.col(0), s, 1);

        Eigen::ArrayXi more = inst.mask.col(0);
        bool flipped = false;
        for (Index x = 0; x < m; ++x) {
            if (more(x) == 0) {
                more(x) = 1;
                flipped = true;
                break;
            }
        }
        if (!flipped) {
            continue;
        }
        const Moments richer = filter_year_sequential(prev, inst.y.col(0), more, s, 1);
        CHECK(richer.var <= base.var + 1e-12);
        CHECK(richer.var < prev.var + s.sigma2_omega); // strictly below propagation
    }
}

TEST_CASE("gain times loading stays in [0, 1] on observed cells") {
    RngStream rng(66);
    for (int rep = 0; rep < 300; ++rep) {
        const double beta = -2.0 + 4.0 * rng.uniform();
        const double var = 0.01 + 2.0 * rng.uniform();
        const double s2e = 0.01 + rng.uniform();
        const double gain = beta / (beta * beta + s2e / var);
        CHECK(gain * beta >= 0.0);
        CHECK(gain * beta <= 1.0);
    }
}

TEST_CASE("smoother limits: vanishing state noise and point-mass filtered state") {
    ParamState s;
    s.alpha = Vector::Zero(1);
    s.beta = Vector::Ones(1);
    s.kappa = Vector::Zero(2);
    s.theta1 = 0.7;
    s.theta2 = 0.2;

    SUBCASE("sigma2_omega -> 0 makes the back-step deterministic") {
        s.sigma2_omega = 1e-14;
        FilterMoments m;
        m.at = {{0.0, 0.5}, {1.0, 0.5}, {2.0, 0.5}};
        RngStream rng(71);
        backward_sample(m, s, rng);
        // kappa_1 must equal kappa_2 - theta1 - theta2 * 2 (exact back-step)
        CHECK(s.kappa(0) ==
              doctest::Approx(s.kappa(1) - s.theta1 - s.theta2 * 2.0).epsilon(1e-6));
    }

    SUBCASE("zero filtered variance keeps the filtered point mass") {
        s.sigma2_omega = 0.3;
        FilterMoments m;
        m.at = {{-0.5, 0.0}, {0.4, 0.0}, {1.1, 0.25}};
        RngStream rng(72);
        backward_sample(m, s, rng);
        CHECK(s.kappa(0) == doctest::Approx(0.4));
        CHECK(s.kappa0 == doctest::Approx(-0.5));
    }
}

TEST_CASE("FFBS draws reproduce the exact joint posterior (M=2, N=3)") {
    RngStream rng(67);
    test::RandomInstance inst = test::random_instance(rng, 2, 3, 0.0);
    while (inst.y.rows() < 2 || inst.y.cols() < 3) {
        inst = test::random_instance(rng, 2, 3, 0.0);
    }
    inst.mask.setOnes();
    ParamState s = test::to_param_state(inst);
    const Hyperparams hp = test::to_hyperparams(inst);
    const MortalityDataset ds = test::to_dataset(inst);
    const Index n = inst.y.cols();

    const auto cells = test::observed_cells(inst);
    const test::GaussianPosterior post =
        test::oracle_kappa_posterior(inst.params, n, cells);

    const int reps = 100000;
    Vector mean = Vector::Zero(n + 1);
    Matrix second = Matrix::Zero(n + 1, n + 1);
    RngStream draw_rng(68);
    for (int i = 0; i < reps; ++i) {
        update_kappa(s, ds, hp, draw_rng);
        Vector k(n + 1);
        k(0) = s.kappa0;
        k.tail(n) = s.kappa;
        mean += k;
        second += k * k.transpose();
    }
    mean /= reps;
    const Matrix cov = second / reps - mean * mean.transpose();

    for (Index i = 0; i <= n; ++i) {
        const double se = std::sqrt(post.cov(i, i) / reps);
        CHECK(std::fabs(mean(i) - post.mean(i)) < 3.5 * se);
        for (Index j = 0; j <= n; ++j) {
            const double cov_se = std::sqrt(
                (post.cov(i, i) * post.cov(j, j) + post.cov(i, j) * post.cov(i, j)) / reps);
            CHECK(std::fabs(cov(i, j) - post.cov(i, j)) < 4.0 * cov_se);
        }
    }
}

TEST_CASE("mixed complete/incomplete years agree with the dense oracle (M=3, N=4)") {
    RngStream rng(69);
    test::RandomInstance inst = test::random_instance(rng, 3, 4, 0.0);
    while (inst.y.rows() != 3 || inst.y.cols() != 4) {
        inst = test::random_instance(rng, 3, 4, 0.0);
    }
    // years alternate: complete, holey, complete, fully missing
    inst.mask.setOnes();
    inst.mask(1, 1) = 0;
    inst.mask.col(3).setZero();
    ParamState s = test::to_param_state(inst);
    const Hyperparams hp = test::to_hyperparams(inst);
    const MortalityDataset ds = test::to_dataset(inst);

    const auto cells = test::observed_cells(inst);
    const test::GaussianPosterior post = test::oracle_kappa_posterior(inst.params, 4, cells);

    const int reps = 100000;
    Vector mean = Vector::Zero(5);
    Vector var = Vector::Zero(5);
    RngStream draw_rng(70);
    for (int i = 0; i < reps; ++i) {
        update_kappa(s, ds, hp, draw_rng);
        Vector k(5);
        k(0) = s.kappa0;
        k.tail(4) = s.kappa;
        mean += k;
        var += k.cwiseProduct(k);
    }
    mean /= reps;
    var = var / reps - mean.cwiseProduct(mean);
    for (Index i = 0; i <= 4; ++i) {
        const double se = std::sqrt(post.cov(i, i) / reps);
        CHECK(std::fabs(mean(i) - post.mean(i)) < 3.5 * se);
        CHECK(std::fabs(var(i) - post.cov(i, i)) < 4.0 * post.cov(i, i) * std::sqrt(2.0 / reps));
    }

    // the fully missing year has strictly larger filtered variance than its
    // complete neighbour years
    const FilterMoments moments = forward_filter(s, ds, hp);
    CHECK(moments.at[4].var > moments.at[3].var);
    // and larger marginal posterior variance than the complete years
    CHECK(post.cov(4, 4) > post.cov(3, 3));
}
