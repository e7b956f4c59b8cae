#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sancdyn/stochastic.hpp"

using namespace sancdyn;

TEST_CASE("noise spec validation") {
    CHECK_NOTHROW(NoiseSpec(0.0, 0.0));
    CHECK_NOTHROW(NoiseSpec(0.3, 1.1, NoiseDistribution::Uniform));
    CHECK_THROWS_AS(NoiseSpec(-0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSpec(0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSpec(std::nan(""), 0.0), std::invalid_argument);
}

TEST_CASE("averaged gain") {
    CHECK(averaged_gain({ModelParams(1, 1), NoiseSpec(0, 0)}) == 1.0);
    // pure-noise limit: vanishing strategies leave sigma_x^2 sigma_y^2
    CHECK(averaged_gain({ModelParams(1e-9, 1e-9), NoiseSpec(1, 1)}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(averaged_gain({ModelParams(0.8, 0.8), NoiseSpec(0.3, 0.3)}) ==
          doctest::Approx(0.5329).epsilon(1e-12));

    // with zero noise the averaged gain is the squared total gain
    for (const double a : {0.2, 0.9, 1.7}) {
        for (const double b : {0.4, 1.0, 1.9}) {
            const StochasticParams params{ModelParams(a, b), NoiseSpec(0, 0)};
            const double q = total_gain(params.base);
            CHECK(averaged_gain(params) == doctest::Approx(q * q).epsilon(1e-12));
        }
    }
}

TEST_CASE("minimum achievable gain") {
    CHECK(min_achievable_gain(NoiseSpec(0.0, 123.0)) == 0.0);
    CHECK(min_achievable_gain(NoiseSpec(1.0, 1.0)) == 1.0);
    CHECK(min_achievable_gain(NoiseSpec(1.1, 1.1)) == doctest::Approx(1.4641).epsilon(1e-12));
    // the floor is the infimum of the averaged gain over strategies
    const NoiseSpec noise(0.6, 0.8);
    const double floor = min_achievable_gain(noise);
    for (const double a : {1e-6, 1e-3, 0.1}) {
        CHECK(averaged_gain({ModelParams(a, a), noise}) > floor);
    }
}

TEST_CASE("mean-square classification") {
    CHECK(classify_mean_square({ModelParams(0.8, 0.8), NoiseSpec(0.3, 0.3)}).cls ==
          StabilityClass::Stable);
    CHECK(classify_mean_square({ModelParams(1, 1), NoiseSpec(0, 0)}).cls ==
          StabilityClass::Marginal);
    CHECK(classify_mean_square({ModelParams(1, 1), NoiseSpec(0.5, 0.5)}).cls ==
          StabilityClass::Unstable);
    CHECK(classify_mean_square({ModelParams(1, 1), NoiseSpec(0.5, 0.5)}).gain ==
          doctest::Approx(1.5625).epsilon(1e-12));
}

TEST_CASE("step_stochastic") {
    const StochasticParams params{ModelParams(0.8, 1.2), NoiseSpec(0.3, 0.4)};

    // the zero state survives any noise realization
    NoiseChannels noise(RandomSource{1, 0});
    const IncrementState z = step_stochastic(IncrementState(0, 0, 1), params, noise);
    CHECK(z.v == 0.0);
    CHECK(z.w == 0.0);
    CHECK(z.stage == 2);

    // zero sigmas reproduce the deterministic step bit for bit
    const StochasticParams quiet{ModelParams(0.8, 1.2), NoiseSpec(0, 0)};
    NoiseChannels quiet_noise(RandomSource{99, 7});
    const IncrementState input(0.37, -1.42, 3);
    const IncrementState a = step_stochastic(input, quiet, quiet_noise);
    const IncrementState b = step_increments(input, quiet.base);
    CHECK(a.v == b.v);
    CHECK(a.w == b.w);

    // identical source, identical outputs
    NoiseChannels n1(RandomSource{123, 4});
    NoiseChannels n2(RandomSource{123, 4});
    const IncrementState s1 = step_stochastic(input, params, n1);
    const IncrementState s2 = step_stochastic(input, params, n2);
    CHECK(s1.v == s2.v);
    CHECK(s1.w == s2.w);
}

TEST_CASE("simulate_stochastic") {
    const PressureState initial(0, 1, 0, 1, 1);
    const StochasticParams params{ModelParams(0.8, 0.8), NoiseSpec(0.3, 0.3)};

    const Trajectory t0 = simulate_stochastic(initial, params, 0, RandomSource{5, 0});
    CHECK(t0.records.size() == 1);

    // same seed and stream: identical paths; different stream: different path
    const Trajectory a = simulate_stochastic(initial, params, 40, RandomSource{5, 0});
    const Trajectory b = simulate_stochastic(initial, params, 40, RandomSource{5, 0});
    const Trajectory c = simulate_stochastic(initial, params, 40, RandomSource{5, 1});
    REQUIRE(a.records.size() == b.records.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].v == b.records[i].v);
        CHECK(a.records[i].x == b.records[i].x);
        differs = differs || a.records[i].v != c.records[i].v;
    }
    CHECK(differs);

    // noise-free degeneration equals the deterministic path bit for bit
    const StochasticParams quiet{ModelParams(0.8, 0.8), NoiseSpec(0, 0)};
    const Trajectory s = simulate_stochastic(initial, quiet, 100, RandomSource{17, 0});
    const Trajectory d = simulate_deterministic(initial, quiet.base, 100);
    REQUIRE(s.records.size() == d.records.size());
    for (std::size_t i = 0; i < s.records.size(); ++i) {
        CHECK(s.records[i].x == d.records[i].x);
        CHECK(s.records[i].y == d.records[i].y);
        CHECK(s.records[i].v == d.records[i].v);
        CHECK(s.records[i].w == d.records[i].w);
    }
}

TEST_CASE("sample paths with qbar < 1 decay in the median") {
    const StochasticParams params{ModelParams(0.8, 0.8), NoiseSpec(0.3, 0.3)};
    const PressureState initial(0, 1, 0, 1, 1);
    std::vector<double> late_abs;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const Trajectory t = simulate_stochastic(initial, params, 51, RandomSource{2024, s});
        late_abs.push_back(std::abs(t.records.back().v));
    }
    std::nth_element(late_abs.begin(), late_abs.begin() + 500, late_abs.end());
    CHECK(late_abs[500] < 0.1);  // |v_1| = 1 at the start
}

TEST_CASE("noise realization statistics") {
    for (const auto dist : {NoiseDistribution::Gaussian, NoiseDistribution::Uniform}) {
        const double sigma = 0.7;
        NoiseStream stream(RandomSource{31337, 0}.channel_seed(0));
        const int n = 1'000'000;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double draw = stream.draw(dist, sigma);
            sum += draw;
            sum_sq += draw * draw;
        }
        const double mean = sum / n;
        const double var = sum_sq / n - mean * mean;
        CHECK(std::abs(mean) <= 4.0 * sigma / 1000.0);
        CHECK(std::abs(var / (sigma * sigma) - 1.0) <= 0.02);
    }
}

TEST_CASE("xi and eta channels are uncorrelated") {
    NoiseChannels noise(RandomSource{90210, 0});
    const NoiseSpec spec(1.0, 1.0);
    const int n = 1'000'000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double xi = noise.draw_xi(spec);
        const double eta = noise.draw_eta(spec);
        sx += xi;
        sy += eta;
        sxx += xi * xi;
        syy += eta * eta;
        sxy += xi * eta;
    }
    const double mx = sx / n, my = sy / n;
    const double corr =
        (sxy / n - mx * my) / std::sqrt((sxx / n - mx * mx) * (syy / n - my * my));
    CHECK(std::abs(corr) <= 4e-3);
}

TEST_CASE("monte carlo degenerates exactly without noise") {
    const StochasticParams params{ModelParams(0.5, 0.5), NoiseSpec(0, 0)};
    const MonteCarloReport report =
        monte_carlo_ms_growth(params, MonteCarloConfig{5000, 11}, RandomSource{42, 0});
    CHECK(report.empirical_ms_ratio == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(report.ci_low == report.empirical_ms_ratio);
    CHECK(report.ci_high == report.empirical_ms_ratio);
    CHECK(report.analytic_qbar == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(report.verdict.cls == StabilityClass::Stable);
    CHECK(report.master_seed == 42);
    CHECK(report.n_trajectories == 5000);
    CHECK(report.horizon == 11);
}

TEST_CASE("monte carlo estimate brackets the analytic averaged gain") {
    const StochasticParams params{ModelParams(0.8, 0.8), NoiseSpec(0.3, 0.3)};
    const MonteCarloReport report =
        monte_carlo_ms_growth(params, MonteCarloConfig{20000, 11}, RandomSource{7, 0});
    CHECK(report.ci_low <= report.empirical_ms_ratio);
    CHECK(report.empirical_ms_ratio <= report.ci_high);
    CHECK(report.ci_low <= report.analytic_qbar);
    CHECK(report.analytic_qbar <= report.ci_high);
    CHECK(report.ci_high - report.ci_low < 0.1);
}

TEST_CASE("monte carlo is independent of the thread count") {
    const StochasticParams params{ModelParams(0.9, 1.1), NoiseSpec(0.25, 0.4)};
    MonteCarloConfig serial{30000, 9};
    serial.threads = 1;
    MonteCarloConfig parallel = serial;
    parallel.threads = 4;
    const MonteCarloReport a = monte_carlo_ms_growth(params, serial, RandomSource{555, 0});
    const MonteCarloReport b = monte_carlo_ms_growth(params, parallel, RandomSource{555, 0});
    CHECK(a.empirical_ms_ratio == b.empirical_ms_ratio);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
}

TEST_CASE("monte carlo input validation and degenerate trajectories") {
    const StochasticParams params{ModelParams(0.8, 0.8), NoiseSpec(0.3, 0.3)};
    CHECK_THROWS_AS(
        monte_carlo_ms_growth(params, MonteCarloConfig{1, 11}, RandomSource{1, 0}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        monte_carlo_ms_growth(params, MonteCarloConfig{100, 10}, RandomSource{1, 0}),
        std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_ms_growth(params, MonteCarloConfig{100, 1}, RandomSource{1, 0}),
                    std::invalid_argument);

    MonteCarloConfig zeroed{100, 11};
    zeroed.v1 = 0.0;
    zeroed.w1 = 0.0;
    CHECK_THROWS_AS(monte_carlo_ms_growth(params, zeroed, RandomSource{1, 0}), estimation_error);
}

TEST_CASE("bootstrap interval below the normal-approximation threshold") {
    const StochasticParams params{ModelParams(0.8, 0.8), NoiseSpec(0.3, 0.3)};
    const MonteCarloReport a =
        monte_carlo_ms_growth(params, MonteCarloConfig{500, 11}, RandomSource{2718, 0});
    const MonteCarloReport b =
        monte_carlo_ms_growth(params, MonteCarloConfig{500, 11}, RandomSource{2718, 0});
    CHECK(a.ci_low <= a.empirical_ms_ratio);
    CHECK(a.empirical_ms_ratio <= a.ci_high);
    CHECK(a.ci_low < a.ci_high);
    CHECK(a.ci_low == b.ci_low);    // resampling is seeded, so reruns agree
    CHECK(a.ci_high == b.ci_high);
}

TEST_CASE("estimator error shrinks with the trajectory count") {
    const StochasticParams params{ModelParams(0.8, 0.8), NoiseSpec(0.3, 0.3)};
    const double qbar = averaged_gain(params);
    std::vector<double> errs;
    for (const std::int64_t n : {std::int64_t{1000}, std::int64_t{10000}, std::int64_t{100000}}) {
        std::vector<double> seed_errs;
        for (std::uint64_t s = 0; s < 5; ++s) {
            const MonteCarloReport report =
                monte_carlo_ms_growth(params, MonteCarloConfig{n, 11}, RandomSource{600 + s, 0});
            seed_errs.push_back(std::abs(report.empirical_ms_ratio - qbar));
        }
        std::nth_element(seed_errs.begin(), seed_errs.begin() + 2, seed_errs.end());
        errs.push_back(seed_errs[2]);
    }
    CHECK(errs[1] <= errs[0]);
    CHECK(errs[2] <= errs[1]);
}

TEST_CASE("confidence interval coverage over 100 master seeds") {
    const StochasticParams params{ModelParams(0.8, 0.8), NoiseSpec(0.3, 0.3)};
    const double qbar = averaged_gain(params);
    int hits = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const MonteCarloReport report =
            monte_carlo_ms_growth(params, MonteCarloConfig{5000, 11}, RandomSource{7000 + s, 0});
        if (report.ci_low <= qbar && qbar <= report.ci_high) ++hits;
    }
    CHECK(hits >= 95);
}
