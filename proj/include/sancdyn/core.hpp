// Deterministic sanction-pressure dynamics: coupled pressure recurrence,
// increment form, two-stage decoupling, closed-form solutions, and the
// discrete Lanchester attrition baseline.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sancdyn {

// Half-width of the band around gain 1 treated as marginal.
inline constexpr double kDefaultTolerance = 1e-9;

/// Thrown when a requested limit does not exist (total gain >= 1).
struct divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an empirical estimate cannot be formed (degenerate input,
/// overflowed moments).
struct estimation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Cross-gain strategy parameters of the two opponents. Both must be
/// strictly positive and their product finite.
struct ModelParams {
    double alpha;
    double beta;

    ModelParams(double alpha, double beta);
};

/// Total gain q = alpha * beta, the single parameter governing stability
/// of the deterministic recurrence.
double total_gain(const ModelParams& params);

enum class StabilityClass { Stable, Marginal, Unstable };

std::string_view to_string(StabilityClass cls);

/// Trichotomy around gain 1:
///   Stable    gain < 1 - tolerance
///   Marginal  |gain - 1| <= tolerance
///   Unstable  gain > 1 + tolerance
struct StabilityVerdict {
    StabilityClass cls;
    double gain;
    double tolerance;
};

/// Classifies a non-negative gain. Throws std::domain_error for negative
/// gain and std::invalid_argument for negative tolerance.
StabilityVerdict classify_stability(double gain, double tolerance = kDefaultTolerance);

/// Two consecutive pressure samples per opponent. stage is the index of
/// the *_curr values; the *_prev values belong to stage - 1.
struct PressureState {
    double x_prev;
    double x_curr;
    double y_prev;
    double y_curr;
    std::int64_t stage;

    PressureState(double x_prev, double x_curr, double y_prev, double y_curr,
                  std::int64_t stage = 1);

    double v() const { return x_curr - x_prev; }
    double w() const { return y_curr - y_prev; }
};

/// First differences of the pressures at one stage.
struct IncrementState {
    double v;
    double w;
    std::int64_t stage;

    IncrementState(double v, double w, std::int64_t stage = 1);
};

/// One step of the coupled pressure recurrence:
///   x' = x + alpha * (y - y_prev),  y' = y + beta * (x - x_prev).
/// Throws std::invalid_argument if the step overflows to a non-finite value.
PressureState step_pressures(const PressureState& state, const ModelParams& params);

/// One step of the increment recurrence: (v', w') = (alpha * w, beta * v).
IncrementState step_increments(const IncrementState& state, const ModelParams& params);

/// Two-stage decoupled recurrence: the increment two stages later is
/// gain * increment. Throws std::invalid_argument for gain <= 0.
double decoupled_step(double increment, double gain);

struct TrajectoryRecord {
    std::int64_t stage;
    double x;
    double y;
    double v;
    double w;
};

/// Simulation output: per-stage pressures and increments, stages
/// consecutive from the initial one. The v, w columns are propagated by
/// the increment recurrence (numerically exact two-stage ratios); x, y
/// are their cumulative sums, so a stored pressure difference matches the
/// stored increment to within one rounding of the summation.
struct Trajectory {
    ModelParams params;
    std::vector<TrajectoryRecord> records;
    // Stage at which a non-finite value was produced; records stop before it.
    std::optional<std::int64_t> truncated_at;
};

/// Iterates the pressure recurrence for `steps` steps; the result holds
/// steps + 1 records unless overflow truncates it.
Trajectory simulate_deterministic(const PressureState& initial, const ModelParams& params,
                                  std::int64_t steps);

/// Non-iterative increments at `stage` (>= 1) given the stage-1 increments:
///   odd  stage 2k+1:  v = q^k v1,          w = q^k w1
///   even stage 2k+2:  v = q^k alpha * w1,  w = q^k beta * v1
std::pair<double, double> closed_form_increments(double v1, double w1,
                                                 const ModelParams& params,
                                                 std::int64_t stage);

/// Limits of the pressure sequences for q < 1, by geometric summation of
/// the increment series:
///   x_inf = x1 + (alpha w1 + q v1) / (1 - q)
///   y_inf = y1 + (beta  v1 + q w1) / (1 - q)
/// Throws divergence_error when q >= 1.
std::pair<double, double> cumulative_limit(const PressureState& initial,
                                           const ModelParams& params);

/// Force levels of the two opposing sides and the sampling interval of the
/// discrete attrition baseline.
struct LanchesterState {
    double r;
    double g;
    double dt;

    LanchesterState(double r, double g, double dt);
};

/// One Euler step of the attrition equations:
///   r' = r - alpha * dt * g,  g' = g - beta * dt * r.
LanchesterState lanchester_step(const LanchesterState& state, const ModelParams& params);

struct LanchesterRecord {
    std::int64_t stage;
    double r;
    double g;
};

struct LanchesterRun {
    std::vector<LanchesterRecord> records;
    std::optional<std::int64_t> truncated_at;
};

/// Iterates lanchester_step; stages run 0..steps unless truncated.
LanchesterRun simulate_lanchester(const LanchesterState& initial, const ModelParams& params,
                                  std::int64_t steps);

}  // namespace sancdyn
