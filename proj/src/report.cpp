#include "sancdyn/report.hpp"

#include <charconv>
#include <ostream>
#include <system_error>

namespace sancdyn {

namespace {

using nlohmann::json;

json verdict_json(const StabilityVerdict& verdict) {
    return json(std::string(to_string(verdict.cls)));
}

void put_row(std::ostream& sink, std::int64_t stage, const double* values, std::size_t count) {
    sink << stage;
    for (std::size_t i = 0; i < count; ++i) sink << ',' << format_double(values[i]);
    sink << '\n';
}

}  // namespace

std::string format_double(double value) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, result.ptr);
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& sink) {
    sink << "n,x,y,v,w\n";
    for (const auto& rec : trajectory.records) {
        const double values[] = {rec.x, rec.y, rec.v, rec.w};
        put_row(sink, rec.stage, values, 4);
    }
    if (trajectory.truncated_at) {
        sink << "# truncated: overflow at n=" << *trajectory.truncated_at << '\n';
    }
    if (!sink) throw std::runtime_error("trajectory CSV: write failed");
}

void write_lanchester_csv(const LanchesterRun& run, std::ostream& sink) {
    sink << "n,r,g\n";
    for (const auto& rec : run.records) {
        const double values[] = {rec.r, rec.g};
        put_row(sink, rec.stage, values, 2);
    }
    if (run.truncated_at) {
        sink << "# truncated: overflow at n=" << *run.truncated_at << '\n';
    }
    if (!sink) throw std::runtime_error("lanchester CSV: write failed");
}

void write_grid_csv(const StabilityGrid& grid, std::ostream& sink) {
    sink << "alpha,beta,gain,verdict\n";
    for (std::size_t i = 0; i < grid.alpha_axis.size(); ++i) {
        for (std::size_t j = 0; j < grid.beta_axis.size(); ++j) {
            const GridCell& cell = grid.at(i, j);
            sink << format_double(grid.alpha_axis[i]) << ',' << format_double(grid.beta_axis[j])
                 << ',' << format_double(cell.gain) << ',' << to_string(cell.verdict) << '\n';
        }
    }
    if (!sink) throw std::runtime_error("grid CSV: write failed");
}

json trajectory_to_json(const Trajectory& trajectory) {
    json doc;
    doc["alpha"] = trajectory.params.alpha;
    doc["beta"] = trajectory.params.beta;
    doc["truncated_at"] =
        trajectory.truncated_at ? json(*trajectory.truncated_at) : json(nullptr);
    json records = json::array();
    for (const auto& rec : trajectory.records) {
        records.push_back(
            {{"n", rec.stage}, {"x", rec.x}, {"y", rec.y}, {"v", rec.v}, {"w", rec.w}});
    }
    doc["records"] = std::move(records);
    return doc;
}

json lanchester_to_json(const LanchesterRun& run) {
    json doc;
    doc["truncated_at"] = run.truncated_at ? json(*run.truncated_at) : json(nullptr);
    json records = json::array();
    for (const auto& rec : run.records) {
        records.push_back({{"n", rec.stage}, {"r", rec.r}, {"g", rec.g}});
    }
    doc["records"] = std::move(records);
    return doc;
}

json grid_to_json(const StabilityGrid& grid) {
    json doc;
    doc["mode"] = grid.mode == SweepMode::Deterministic ? "deterministic" : "meansquare";
    doc["alpha_axis"] = grid.alpha_axis;
    doc["beta_axis"] = grid.beta_axis;
    doc["tolerance"] = grid.tolerance;
    if (grid.noise) {
        doc["sigma_x"] = grid.noise->sigma_x;
        doc["sigma_y"] = grid.noise->sigma_y;
    }
    json cells = json::array();
    for (std::size_t i = 0; i < grid.alpha_axis.size(); ++i) {
        for (std::size_t j = 0; j < grid.beta_axis.size(); ++j) {
            const GridCell& cell = grid.at(i, j);
            cells.push_back({{"alpha", grid.alpha_axis[i]},
                             {"beta", grid.beta_axis[j]},
                             {"gain", cell.gain},
                             {"verdict", std::string(to_string(cell.verdict))}});
        }
    }
    doc["cells"] = std::move(cells);
    return doc;
}

json report_to_json(const RunReport& report) {
    json doc;
    doc["schema"] = "sancdyn-report-v1";
    doc["command"] = report.command;
    doc["scenario"] = scenario_to_json(report.scenario);
    doc["q"] = report.q;
    if (report.verdict) doc["verdict"] = verdict_json(*report.verdict);
    if (report.q_bar) doc["q_bar"] = *report.q_bar;
    if (report.noise_floor) doc["noise_floor"] = *report.noise_floor;
    if (report.ms_verdict) doc["ms_verdict"] = verdict_json(*report.ms_verdict);
    if (report.monte_carlo) {
        const MonteCarloReport& mc = *report.monte_carlo;
        doc["monte_carlo"] = {{"n_trajectories", mc.n_trajectories},
                              {"horizon", mc.horizon},
                              {"empirical_ms_ratio", mc.empirical_ms_ratio},
                              {"ci_low", mc.ci_low},
                              {"ci_high", mc.ci_high},
                              {"analytic_qbar", mc.analytic_qbar},
                              {"verdict", verdict_json(mc.verdict)},
                              {"master_seed", mc.master_seed}};
    }
    if (report.agreement) doc["agreement"] = *report.agreement;
    if (report.growth) {
        doc["growth"] = {{"lyapunov", report.growth->lyapunov},
                         {"analytic", report.growth->analytic},
                         {"residual", report.growth->residual}};
    }
    if (!report.outputs.empty()) {
        json outputs;
        for (const auto& [label, path] : report.outputs) outputs[label] = path;
        doc["outputs"] = std::move(outputs);
    }
    return doc;
}

void write_report_json(const RunReport& report, std::ostream& sink) {
    sink << report_to_json(report).dump() << '\n';
    if (!sink) throw std::runtime_error("report JSON: write failed");
}

}  // namespace sancdyn
