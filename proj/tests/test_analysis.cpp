#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sancdyn/analysis.hpp"

using namespace sancdyn;

namespace {

std::vector<double> linspace(double start, double stop, std::size_t count) {
    std::vector<double> axis(count);
    for (std::size_t i = 0; i < count; ++i) {
        axis[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    axis.back() = stop;
    return axis;
}

}  // namespace

TEST_CASE("single-cell sweep") {
    const StabilityGrid grid =
        sweep_stability_region({0.5}, {0.5}, SweepMode::Deterministic);
    REQUIRE(grid.cells.size() == 1);
    CHECK(grid.at(0, 0).verdict == StabilityClass::Stable);
    CHECK(grid.at(0, 0).gain == 0.25);
}

TEST_CASE("sweep validation") {
    CHECK_THROWS_AS(sweep_stability_region({}, {0.5}, SweepMode::Deterministic),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep_stability_region({0.5, 0.4}, {0.5}, SweepMode::Deterministic),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep_stability_region({0.5, 0.5}, {0.5}, SweepMode::Deterministic),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep_stability_region({-0.5, 0.5}, {0.5}, SweepMode::Deterministic),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep_stability_region({0.5}, {0.5}, SweepMode::MeanSquare),
                    std::invalid_argument);
}

TEST_CASE("grid is the pointwise image of the classifier") {
    const auto axis = linspace(0.01, 2.0, 101);
    const StabilityGrid grid = sweep_stability_region(axis, axis, SweepMode::Deterministic);
    REQUIRE(grid.cells.size() == 101 * 101);
    for (std::size_t i = 0; i < axis.size(); ++i) {
        for (std::size_t j = 0; j < axis.size(); ++j) {
            const double q = axis[i] * axis[j];
            CHECK(grid.at(i, j).gain == q);
            CHECK(grid.at(i, j).verdict == classify_stability(q).cls);
            const bool stable_predicate = q < 1.0 - 1e-9;
            CHECK((grid.at(i, j).verdict == StabilityClass::Stable) == stable_predicate);
        }
    }
    // q is symmetric in (alpha, beta): the verdict matrix equals its transpose
    for (std::size_t i = 0; i < axis.size(); ++i) {
        for (std::size_t j = 0; j < axis.size(); ++j) {
            CHECK(grid.at(i, j).verdict == grid.at(j, i).verdict);
        }
    }
}

TEST_CASE("mean-square stable region is strictly inside the deterministic one") {
    const auto axis = linspace(0.01, 2.0, 51);
    const StabilityGrid det = sweep_stability_region(axis, axis, SweepMode::Deterministic);
    const StabilityGrid ms =
        sweep_stability_region(axis, axis, SweepMode::MeanSquare, NoiseSpec(0.5, 0.5));
    bool strictly_smaller = false;
    for (std::size_t i = 0; i < axis.size(); ++i) {
        for (std::size_t j = 0; j < axis.size(); ++j) {
            CHECK(ms.at(i, j).gain >= det.at(i, j).gain * det.at(i, j).gain);
            if (ms.at(i, j).verdict == StabilityClass::Stable) {
                CHECK(det.at(i, j).verdict == StabilityClass::Stable);
            } else if (det.at(i, j).verdict == StabilityClass::Stable) {
                strictly_smaller = true;
            }
        }
    }
    CHECK(strictly_smaller);
}

TEST_CASE("growing noise never stabilizes a cell") {
    const auto axis = linspace(0.05, 1.8, 30);
    const StabilityGrid small =
        sweep_stability_region(axis, axis, SweepMode::MeanSquare, NoiseSpec(0.2, 0.3));
    const StabilityGrid large =
        sweep_stability_region(axis, axis, SweepMode::MeanSquare, NoiseSpec(0.6, 0.7));
    for (std::size_t k = 0; k < small.cells.size(); ++k) {
        CHECK(large.cells[k].gain >= small.cells[k].gain);
        // verdict can only move toward Unstable as the noise grows
        CHECK(static_cast<int>(large.cells[k].verdict) >=
              static_cast<int>(small.cells[k].verdict));
    }
}

TEST_CASE("growth rate of deterministic trajectories") {
    const PressureState initial(0, 1, 0, 1, 1);

    const Trajectory stable = simulate_deterministic(initial, ModelParams(0.5, 0.5), 100);
    const GrowthEstimate g = estimate_growth_rate(stable);
    CHECK(g.lyapunov == doctest::Approx(0.5 * std::log(0.25)).epsilon(1e-12));
    CHECK(g.analytic == doctest::Approx(-0.6931471805599453).epsilon(1e-12));
    CHECK(g.residual < 1e-9);

    const Trajectory marginal = simulate_deterministic(initial, ModelParams(1.0, 1.0), 100);
    const GrowthEstimate m = estimate_growth_rate(marginal);
    CHECK(std::abs(m.lyapunov) < 1e-12);

    const Trajectory growing = simulate_deterministic(initial, ModelParams(1.2, 1.5), 60);
    const GrowthEstimate u = estimate_growth_rate(growing);
    CHECK(u.lyapunov == doctest::Approx(0.5 * std::log(1.8)).epsilon(1e-12));
    CHECK(u.residual < 1e-9);
}

TEST_CASE("growth rate uses the usable parity class") {
    // v1 = 0 keeps every odd-stage increment at zero; the even class carries
    // the decay
    const PressureState initial(1, 1, 0, 1, 1);
    const Trajectory t = simulate_deterministic(initial, ModelParams(0.6, 0.6), 80);
    const GrowthEstimate g = estimate_growth_rate(t);
    CHECK(g.residual < 1e-9);
}

TEST_CASE("growth rate errors") {
    const PressureState still(1, 1, 1, 1, 1);
    const Trajectory zeros = simulate_deterministic(still, ModelParams(0.5, 0.5), 50);
    CHECK_THROWS_AS(estimate_growth_rate(zeros), estimation_error);

    const Trajectory tiny = simulate_deterministic(PressureState(0, 1, 0, 1, 1),
                                                   ModelParams(0.5, 0.5), 5);
    CHECK_THROWS_AS(estimate_growth_rate(tiny), std::invalid_argument);
}

TEST_CASE("stochastic paths with qbar < 1 have a negative median exponent") {
    const StochasticParams params{ModelParams(0.8, 0.8), NoiseSpec(0.3, 0.3)};
    const PressureState initial(0, 1, 0, 1, 1);
    std::vector<double> exponents;
    for (std::uint64_t s = 0; s < 1001; ++s) {
        const Trajectory t = simulate_stochastic(initial, params, 200, RandomSource{909, s});
        exponents.push_back(estimate_growth_rate(t).lyapunov);
    }
    std::nth_element(exponents.begin(), exponents.begin() + 500, exponents.end());
    CHECK(exponents[500] < 0.0);
}

TEST_CASE("empirical/analytic comparison") {
    // noise-free: exact agreement with a zero-width interval
    const StochasticParams quiet{ModelParams(0.5, 0.5), NoiseSpec(0, 0)};
    const ComparisonRecord exact =
        compare_empirical_analytic(quiet, MonteCarloConfig{2000, 11}, RandomSource{3, 0});
    CHECK(exact.agreement);
    CHECK(exact.report.ci_low == exact.report.ci_high);

    const StochasticParams params{ModelParams(0.8, 0.8), NoiseSpec(0.3, 0.3)};
    const ComparisonRecord mc =
        compare_empirical_analytic(params, MonteCarloConfig{20000, 11}, RandomSource{11, 0});
    CHECK(mc.agreement);
    CHECK(mc.report.analytic_qbar == doctest::Approx(0.5329).epsilon(1e-12));

    // instability driven by noise on a marginal base
    const StochasticParams hot{ModelParams(1.0, 1.0), NoiseSpec(0.5, 0.5)};
    const ComparisonRecord u =
        compare_empirical_analytic(hot, MonteCarloConfig{20000, 11}, RandomSource{13, 0});
    CHECK(u.report.analytic_qbar == doctest::Approx(1.5625).epsilon(1e-12));
    CHECK(u.report.empirical_ms_ratio > 1.0);
    CHECK(u.report.verdict.cls == StabilityClass::Unstable);
}
