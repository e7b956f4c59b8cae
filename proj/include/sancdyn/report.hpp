// Result serialization: trajectory/grid CSV and the canonical run-report
// JSON (sorted keys, compact, shortest round-trip numbers) so identical
// runs produce identical bytes.
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "sancdyn/analysis.hpp"
#include "sancdyn/core.hpp"
#include "sancdyn/scenario.hpp"
#include "sancdyn/stochastic.hpp"

#include <json.hpp>

namespace sancdyn {

/// Shortest decimal representation that parses back to exactly `value`.
std::string format_double(double value);

/// Header `n,x,y,v,w`, one row per stage, LF endings; a trailing comment
/// line records overflow truncation.
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& sink);

/// Header `n,r,g` for attrition-baseline runs.
void write_lanchester_csv(const LanchesterRun& run, std::ostream& sink);

/// Header `alpha,beta,gain,verdict`, row-major in (alpha, beta).
void write_grid_csv(const StabilityGrid& grid, std::ostream& sink);

nlohmann::json trajectory_to_json(const Trajectory& trajectory);
nlohmann::json lanchester_to_json(const LanchesterRun& run);
nlohmann::json grid_to_json(const StabilityGrid& grid);

/// Everything a finished run reports. Every numeric field is reproducible
/// from the scenario plus the seed.
struct RunReport {
    std::string command;
    Scenario scenario;
    double q = 0;
    std::optional<StabilityVerdict> verdict;  // absent for lanchester runs
    std::optional<double> q_bar;
    std::optional<double> noise_floor;
    std::optional<StabilityVerdict> ms_verdict;
    std::optional<MonteCarloReport> monte_carlo;
    std::optional<bool> agreement;
    std::optional<GrowthEstimate> growth;
    std::map<std::string, std::string> outputs;  // label -> path written
};

nlohmann::json report_to_json(const RunReport& report);

/// Canonical serialization of the report (schema "sancdyn-report-v1").
void write_report_json(const RunReport& report, std::ostream& sink);

}  // namespace sancdyn
