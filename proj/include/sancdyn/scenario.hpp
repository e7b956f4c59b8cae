// Scenario documents: a single JSON object with a "model" discriminator.
// Field presence is exact per model kind; unknown keys are errors and all
// numeric constraints are re-checked at parse time.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "sancdyn/core.hpp"
#include "sancdyn/random.hpp"

#include <json.hpp>

namespace sancdyn {

enum class ModelKind { Deterministic, Stochastic, Lanchester };

std::string_view to_string(ModelKind kind);

struct Scenario {
    ModelKind model = ModelKind::Deterministic;
    double alpha = 0;
    double beta = 0;
    std::int64_t steps = 0;

    // deterministic / stochastic
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;

    // stochastic
    double sigma_x = 0, sigma_y = 0;
    NoiseDistribution distribution = NoiseDistribution::Gaussian;
    std::uint64_t seed = 0;
    std::optional<std::int64_t> trajectories;  // Monte Carlo runs only

    // lanchester
    double r0 = 0, g0 = 0, dt = 0;

    ModelParams params() const { return ModelParams(alpha, beta); }
    PressureState initial_pressures() const { return PressureState(x0, x1, y0, y1, 1); }
};

/// Parses and validates a scenario document. Throws std::invalid_argument
/// naming the offending field.
Scenario parse_scenario(std::string_view text);

/// Canonical JSON echo of a scenario (only the fields of its model kind).
nlohmann::json scenario_to_json(const Scenario& scenario);

}  // namespace sancdyn
