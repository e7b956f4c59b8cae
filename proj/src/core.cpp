#include "sancdyn/core.hpp"

#include <cmath>

namespace sancdyn {

namespace {

void require(bool cond, const char* message) {
    if (!cond) throw std::invalid_argument(message);
}

}  // namespace

ModelParams::ModelParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    require(std::isfinite(alpha) && alpha > 0, "alpha must be a finite positive real");
    require(std::isfinite(beta) && beta > 0, "beta must be a finite positive real");
    require(std::isfinite(alpha * beta), "total gain alpha*beta must be finite");
}

double total_gain(const ModelParams& params) { return params.alpha * params.beta; }

std::string_view to_string(StabilityClass cls) {
    switch (cls) {
        case StabilityClass::Stable: return "stable";
        case StabilityClass::Marginal: return "marginal";
        case StabilityClass::Unstable: return "unstable";
    }
    return "unstable";
}

StabilityVerdict classify_stability(double gain, double tolerance) {
    if (!(gain >= 0)) throw std::domain_error("gain must be non-negative");
    require(std::isfinite(gain), "gain must be finite");
    require(std::isfinite(tolerance) && tolerance >= 0, "tolerance must be non-negative");
    StabilityClass cls;
    if (gain < 1.0 - tolerance) {
        cls = StabilityClass::Stable;
    } else if (gain > 1.0 + tolerance) {
        cls = StabilityClass::Unstable;
    } else {
        cls = StabilityClass::Marginal;
    }
    return StabilityVerdict{cls, gain, tolerance};
}

PressureState::PressureState(double x_prev_, double x_curr_, double y_prev_, double y_curr_,
                             std::int64_t stage_)
    : x_prev(x_prev_), x_curr(x_curr_), y_prev(y_prev_), y_curr(y_curr_), stage(stage_) {
    require(std::isfinite(x_prev) && std::isfinite(x_curr) && std::isfinite(y_prev) &&
                std::isfinite(y_curr),
            "pressures must be finite reals");
    require(stage >= 0, "stage must be non-negative");
}

IncrementState::IncrementState(double v_, double w_, std::int64_t stage_)
    : v(v_), w(w_), stage(stage_) {
    require(std::isfinite(v) && std::isfinite(w), "increments must be finite reals");
    require(stage >= 0, "stage must be non-negative");
}

PressureState step_pressures(const PressureState& state, const ModelParams& params) {
    const double x_next = state.x_curr + params.alpha * (state.y_curr - state.y_prev);
    const double y_next = state.y_curr + params.beta * (state.x_curr - state.x_prev);
    return PressureState(state.x_curr, x_next, state.y_curr, y_next, state.stage + 1);
}

IncrementState step_increments(const IncrementState& state, const ModelParams& params) {
    return IncrementState(params.alpha * state.w, params.beta * state.v, state.stage + 1);
}

double decoupled_step(double increment, double gain) {
    require(std::isfinite(gain) && gain > 0, "gain must be a finite positive real");
    return gain * increment;
}

Trajectory simulate_deterministic(const PressureState& initial, const ModelParams& params,
                                  std::int64_t steps) {
    require(steps >= 0, "steps must be non-negative");
    Trajectory traj{params, {}, std::nullopt};
    traj.records.reserve(static_cast<std::size_t>(steps) + 1);

    double x = initial.x_curr, y = initial.y_curr;
    double v = initial.v(), w = initial.w();
    traj.records.push_back({initial.stage, x, y, v, w});

    for (std::int64_t i = 1; i <= steps; ++i) {
        const double v_next = params.alpha * w;
        const double w_next = params.beta * v;
        const double x_next = x + v_next;
        const double y_next = y + w_next;
        if (!std::isfinite(v_next) || !std::isfinite(w_next) || !std::isfinite(x_next) ||
            !std::isfinite(y_next)) {
            traj.truncated_at = initial.stage + i;
            break;
        }
        v = v_next;
        w = w_next;
        x = x_next;
        y = y_next;
        traj.records.push_back({initial.stage + i, x, y, v, w});
    }
    return traj;
}

std::pair<double, double> closed_form_increments(double v1, double w1,
                                                 const ModelParams& params,
                                                 std::int64_t stage) {
    require(stage >= 1, "stage must be >= 1");
    require(std::isfinite(v1) && std::isfinite(w1), "increments must be finite reals");
    const double q = total_gain(params);
    if (stage % 2 == 1) {
        const double qk = std::pow(q, static_cast<double>((stage - 1) / 2));
        return {qk * v1, qk * w1};
    }
    const double qk = std::pow(q, static_cast<double>((stage - 2) / 2));
    return {qk * params.alpha * w1, qk * params.beta * v1};
}

std::pair<double, double> cumulative_limit(const PressureState& initial,
                                           const ModelParams& params) {
    const double q = total_gain(params);
    if (q >= 1.0) {
        throw divergence_error("no finite limit: total gain " + std::to_string(q) + " >= 1");
    }
    const double v1 = initial.v(), w1 = initial.w();
    const double x_inf = initial.x_curr + (params.alpha * w1 + q * v1) / (1.0 - q);
    const double y_inf = initial.y_curr + (params.beta * v1 + q * w1) / (1.0 - q);
    return {x_inf, y_inf};
}

LanchesterState::LanchesterState(double r_, double g_, double dt_) : r(r_), g(g_), dt(dt_) {
    require(std::isfinite(r) && std::isfinite(g), "force levels must be finite reals");
    require(std::isfinite(dt) && dt > 0, "dt must be a finite positive real");
}

LanchesterState lanchester_step(const LanchesterState& state, const ModelParams& params) {
    return LanchesterState(state.r - params.alpha * state.dt * state.g,
                           state.g - params.beta * state.dt * state.r, state.dt);
}

LanchesterRun simulate_lanchester(const LanchesterState& initial, const ModelParams& params,
                                  std::int64_t steps) {
    require(steps >= 0, "steps must be non-negative");
    LanchesterRun run;
    run.records.reserve(static_cast<std::size_t>(steps) + 1);
    run.records.push_back({0, initial.r, initial.g});

    double r = initial.r, g = initial.g;
    for (std::int64_t i = 1; i <= steps; ++i) {
        const double r_next = r - params.alpha * initial.dt * g;
        const double g_next = g - params.beta * initial.dt * r;
        if (!std::isfinite(r_next) || !std::isfinite(g_next)) {
            run.truncated_at = i;
            break;
        }
        r = r_next;
        g = g_next;
        run.records.push_back({i, r, g});
    }
    return run;
}

}  // namespace sancdyn
