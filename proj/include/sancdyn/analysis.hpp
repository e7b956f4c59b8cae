// Parameter-space stability sweeps, empirical growth-rate estimation, and
// empirical-vs-analytic comparison of the mean-square criterion.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sancdyn/core.hpp"
#include "sancdyn/stochastic.hpp"

namespace sancdyn {

enum class SweepMode { Deterministic, MeanSquare };

struct GridCell {
    double gain;  // q in deterministic mode, qbar in mean-square mode
    StabilityClass verdict;
};

/// Pointwise image of the stability classifier over an (alpha, beta)
/// grid; cells are row-major in (alpha, beta).
struct StabilityGrid {
    std::vector<double> alpha_axis;
    std::vector<double> beta_axis;
    SweepMode mode;
    std::optional<NoiseSpec> noise;
    double tolerance;
    std::vector<GridCell> cells;

    const GridCell& at(std::size_t i, std::size_t j) const {
        return cells[i * beta_axis.size() + j];
    }
};

/// Classifies every grid point. Axes must be non-empty, strictly
/// increasing and positive; MeanSquare mode requires a noise spec
/// (std::invalid_argument otherwise).
StabilityGrid sweep_stability_region(std::vector<double> alpha_axis,
                                     std::vector<double> beta_axis, SweepMode mode,
                                     std::optional<NoiseSpec> noise = std::nullopt,
                                     double tolerance = kDefaultTolerance);

/// Per-stage log growth of |v| with the deterministic reference value.
struct GrowthEstimate {
    double lyapunov;  // least-squares slope of ln |v_n| against n
    double analytic;  // 0.5 * ln q of the generating params
    double residual;  // |lyapunov - analytic|
};

/// Fits the slope over the final 80% of stages on a single parity class
/// (the one with more usable nonzero increments; parities evolve
/// independently). Requires >= 10 records; throws estimation_error when
/// no parity class has two nonzero increments.
GrowthEstimate estimate_growth_rate(const Trajectory& trajectory);

struct ComparisonRecord {
    MonteCarloReport report;
    bool agreement;  // analytic qbar inside the empirical CI
};

/// Runs the Monte Carlo estimator and flags whether the analytic averaged
/// gain lies inside the empirical confidence interval.
ComparisonRecord compare_empirical_analytic(const StochasticParams& params,
                                            const MonteCarloConfig& config,
                                            const RandomSource& source);

}  // namespace sancdyn
