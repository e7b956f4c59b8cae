#include "sancdyn/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "sancdyn/analysis.hpp"
#include "sancdyn/core.hpp"
#include "sancdyn/report.hpp"
#include "sancdyn/scenario.hpp"
#include "sancdyn/stochastic.hpp"

#include <CLI11.hpp>

namespace sancdyn {

namespace {

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& label,
                const std::function<void(std::ostream&)>& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + label + " output file: " + path);
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

// start:stop:count inclusive linear spacing; the endpoint is assigned
// exactly.
std::vector<double> parse_axis(const std::string& text, const std::string& flag) {
    const auto bad = [&]() -> std::vector<double> {
        fail(flag + ": expected start:stop:count, got \"" + text + "\"");
    };
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) return bad();
    double start = 0, stop = 0;
    std::int64_t count = 0;
    try {
        std::size_t used = 0;
        start = std::stod(text.substr(0, c1), &used);
        if (used != c1) return bad();
        const std::string mid = text.substr(c1 + 1, c2 - c1 - 1);
        stop = std::stod(mid, &used);
        if (used != mid.size()) return bad();
        const std::string tail = text.substr(c2 + 1);
        count = std::stoll(tail, &used);
        if (used != tail.size()) return bad();
    } catch (const std::exception&) {
        return bad();
    }
    if (!std::isfinite(start) || !std::isfinite(stop) || start <= 0) {
        fail(flag + ": axis start must be positive and finite");
    }
    if (count < 1) fail(flag + ": axis count must be >= 1");
    if (count == 1) {
        if (stop != start) fail(flag + ": a single-point axis requires start == stop");
        return {start};
    }
    if (stop <= start) fail(flag + ": axis stop must exceed start");
    std::vector<double> axis(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) {
        axis[static_cast<std::size_t>(i)] =
            start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    axis.back() = stop;
    return axis;
}

struct Overrides {
    std::optional<std::int64_t> steps, trajectories;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha, beta, x0, x1, y0, y1, sigma_x, sigma_y, r0, g0, dt;
    std::optional<std::string> distribution;
};

void add_scalar_flags(CLI::App* sub, Overrides& o) {
    sub->add_option("--steps", o.steps, "Override the scenario step/horizon count");
    sub->add_option("--seed", o.seed, "Override the scenario master seed");
    sub->add_option("--trajectories", o.trajectories, "Override the Monte Carlo trajectory count");
    sub->add_option("--alpha", o.alpha, "Override alpha");
    sub->add_option("--beta", o.beta, "Override beta");
    sub->add_option("--x0", o.x0, "Override x0");
    sub->add_option("--x1", o.x1, "Override x1");
    sub->add_option("--y0", o.y0, "Override y0");
    sub->add_option("--y1", o.y1, "Override y1");
    sub->add_option("--sigma-x", o.sigma_x, "Override sigma_x");
    sub->add_option("--sigma-y", o.sigma_y, "Override sigma_y");
    sub->add_option("--distribution", o.distribution, "Override the noise distribution")
        ->check(CLI::IsMember({"gaussian", "uniform"}));
    sub->add_option("--r0", o.r0, "Override r0");
    sub->add_option("--g0", o.g0, "Override g0");
    sub->add_option("--dt", o.dt, "Override dt");
}

// Flag-over-file precedence; overrides obey the same field rules as the
// scenario document.
void apply_overrides(Scenario& s, const Overrides& o) {
    const bool pressures =
        s.model == ModelKind::Deterministic || s.model == ModelKind::Stochastic;
    const bool stochastic = s.model == ModelKind::Stochastic;
    const bool lanchester = s.model == ModelKind::Lanchester;

    if (o.steps) {
        if (*o.steps < 1) fail("steps must be >= 1");
        s.steps = *o.steps;
    }
    if (o.alpha) s.alpha = *o.alpha;
    if (o.beta) s.beta = *o.beta;
    if ((o.alpha || o.beta) && (!(s.alpha > 0) || !(s.beta > 0))) {
        fail(std::string(o.alpha && !(s.alpha > 0) ? "alpha" : "beta") + " must be > 0");
    }

    const auto reject = [&](const char* name) {
        fail(std::string("--") + name + " does not apply to model " +
             std::string(to_string(s.model)));
    };
    if (!pressures && (o.x0 || o.x1 || o.y0 || o.y1)) reject("x0/--x1/--y0/--y1");
    if (!stochastic && (o.sigma_x || o.sigma_y || o.distribution || o.seed || o.trajectories)) {
        reject("sigma-x/--sigma-y/--distribution/--seed/--trajectories");
    }
    if (!lanchester && (o.r0 || o.g0 || o.dt)) reject("r0/--g0/--dt");

    if (o.x0) s.x0 = *o.x0;
    if (o.x1) s.x1 = *o.x1;
    if (o.y0) s.y0 = *o.y0;
    if (o.y1) s.y1 = *o.y1;
    if (o.sigma_x) {
        if (*o.sigma_x < 0) fail("sigma_x must be >= 0");
        s.sigma_x = *o.sigma_x;
    }
    if (o.sigma_y) {
        if (*o.sigma_y < 0) fail("sigma_y must be >= 0");
        s.sigma_y = *o.sigma_y;
    }
    if (o.distribution) {
        s.distribution = *o.distribution == "gaussian" ? NoiseDistribution::Gaussian
                                                       : NoiseDistribution::Uniform;
    }
    if (o.seed) s.seed = *o.seed;
    if (o.trajectories) {
        if (*o.trajectories < 2) fail("trajectories must be >= 2");
        s.trajectories = *o.trajectories;
    }
    if (o.r0) s.r0 = *o.r0;
    if (o.g0) s.g0 = *o.g0;
    if (o.dt) {
        if (!(*o.dt > 0)) fail("dt must be > 0");
        s.dt = *o.dt;
    }
}

Scenario load_scenario(const std::string& path, const Overrides& overrides) {
    Scenario s = parse_scenario(read_file(path));
    apply_overrides(s, overrides);
    return s;
}

StochasticParams stochastic_params(const Scenario& s) {
    return StochasticParams{s.params(), NoiseSpec(s.sigma_x, s.sigma_y, s.distribution)};
}

RunReport base_report(std::string command, const Scenario& s) {
    RunReport report;
    report.command = std::move(command);
    report.scenario = s;
    report.q = total_gain(s.params());
    if (s.model != ModelKind::Lanchester) report.verdict = classify_stability(report.q);
    if (s.model == ModelKind::Stochastic) {
        const StochasticParams params = stochastic_params(s);
        report.q_bar = averaged_gain(params);
        report.noise_floor = min_achievable_gain(params.noise);
        report.ms_verdict = classify_mean_square(params);
    }
    return report;
}

int cmd_simulate(const std::string& scenario_path, const Overrides& overrides,
                 const std::string& out_path, const std::string& format,
                 const std::string& report_path) {
    const Scenario s = load_scenario(scenario_path, overrides);
    RunReport report = base_report("simulate", s);

    std::optional<Trajectory> trajectory;
    std::optional<LanchesterRun> lanchester;
    switch (s.model) {
        case ModelKind::Deterministic:
            trajectory = simulate_deterministic(s.initial_pressures(), s.params(), s.steps);
            break;
        case ModelKind::Stochastic:
            trajectory = simulate_stochastic(s.initial_pressures(), stochastic_params(s), s.steps,
                                             RandomSource{s.seed, 0});
            break;
        case ModelKind::Lanchester:
            lanchester = simulate_lanchester(LanchesterState(s.r0, s.g0, s.dt), s.params(), s.steps);
            break;
    }

    report.outputs["trajectory"] = out_path;
    write_file(out_path, "trajectory", [&](std::ostream& sink) {
        if (format == "csv") {
            if (trajectory) {
                write_trajectory_csv(*trajectory, sink);
            } else {
                write_lanchester_csv(*lanchester, sink);
            }
        } else {
            sink << (trajectory ? trajectory_to_json(*trajectory) : lanchester_to_json(*lanchester))
                        .dump()
                 << '\n';
        }
    });
    if (!report_path.empty()) {
        write_file(report_path, "report",
                   [&](std::ostream& sink) { write_report_json(report, sink); });
    }

    std::cout << "simulate model=" << to_string(s.model) << " q=" << format_double(report.q);
    if (report.verdict) std::cout << " verdict=" << to_string(report.verdict->cls);
    if (report.q_bar) std::cout << " q_bar=" << format_double(*report.q_bar);
    if (report.ms_verdict) std::cout << " ms_verdict=" << to_string(report.ms_verdict->cls);
    const auto* truncated =
        trajectory ? (trajectory->truncated_at ? &*trajectory->truncated_at : nullptr)
                   : (lanchester->truncated_at ? &*lanchester->truncated_at : nullptr);
    if (truncated) std::cout << " truncated_at=" << *truncated;
    std::cout << " steps=" << s.steps << " out=" << out_path << '\n';
    return 0;
}

int cmd_montecarlo(const std::string& scenario_path, const Overrides& overrides,
                   const std::string& out_path, const std::string& format, int threads) {
    if (format != "json") fail("montecarlo emits JSON reports only (--format json)");
    const Scenario s = load_scenario(scenario_path, overrides);
    if (s.model != ModelKind::Stochastic) fail("montecarlo requires a stochastic scenario");
    if (s.steps < 3 || s.steps % 2 == 0) {
        fail("montecarlo: steps (the horizon) must be odd and >= 3");
    }
    if (!s.trajectories) fail("montecarlo: missing required field \"trajectories\"");

    MonteCarloConfig config{*s.trajectories, s.steps, s.x1 - s.x0, s.y1 - s.y0, threads};
    const ComparisonRecord comparison =
        compare_empirical_analytic(stochastic_params(s), config, RandomSource{s.seed, 0});

    RunReport report = base_report("montecarlo", s);
    report.monte_carlo = comparison.report;
    report.agreement = comparison.agreement;
    write_file(out_path, "report", [&](std::ostream& sink) { write_report_json(report, sink); });

    const MonteCarloReport& mc = comparison.report;
    std::cout << "montecarlo q_bar=" << format_double(mc.analytic_qbar)
              << " empirical=" << format_double(mc.empirical_ms_ratio) << " ci=["
              << format_double(mc.ci_low) << "," << format_double(mc.ci_high)
              << "] ms_verdict=" << to_string(mc.verdict.cls)
              << " agreement=" << (comparison.agreement ? "yes" : "no")
              << " trajectories=" << mc.n_trajectories << " out=" << out_path << '\n';
    return 0;
}

int cmd_sweep(const std::string& alpha_spec, const std::string& beta_spec,
              const std::string& mode_name, std::optional<double> sigma_x,
              std::optional<double> sigma_y, double tolerance, const std::string& out_path,
              const std::string& format) {
    const SweepMode mode =
        mode_name == "meansquare" ? SweepMode::MeanSquare : SweepMode::Deterministic;
    std::optional<NoiseSpec> noise;
    if (mode == SweepMode::MeanSquare) {
        if (!sigma_x || !sigma_y) fail("meansquare sweep requires --sigma-x and --sigma-y");
        noise = NoiseSpec(*sigma_x, *sigma_y);
    } else if (sigma_x || sigma_y) {
        fail("--sigma-x/--sigma-y only apply to --mode meansquare");
    }

    const StabilityGrid grid = sweep_stability_region(
        parse_axis(alpha_spec, "--alpha"), parse_axis(beta_spec, "--beta"), mode, noise, tolerance);

    write_file(out_path, "grid", [&](std::ostream& sink) {
        if (format == "csv") {
            write_grid_csv(grid, sink);
        } else {
            sink << grid_to_json(grid).dump() << '\n';
        }
    });

    std::size_t counts[3] = {0, 0, 0};
    for (const GridCell& cell : grid.cells) ++counts[static_cast<std::size_t>(cell.verdict)];
    std::cout << "sweep mode=" << (mode == SweepMode::Deterministic ? "deterministic" : "meansquare")
              << " grid=" << grid.alpha_axis.size() << "x" << grid.beta_axis.size()
              << " stable=" << counts[0] << " marginal=" << counts[1]
              << " unstable=" << counts[2] << " out=" << out_path << '\n';
    return 0;
}

int cmd_analyze(const std::string& scenario_path, const Overrides& overrides,
                const std::string& out_path, const std::string& format, int threads) {
    if (format != "json") fail("analyze emits JSON reports only (--format json)");
    const Scenario s = load_scenario(scenario_path, overrides);
    if (s.model == ModelKind::Lanchester) fail("analyze does not support lanchester scenarios");

    RunReport report = base_report("analyze", s);
    if (s.model == ModelKind::Deterministic) {
        if (s.steps < 9) fail("analyze: steps must be >= 9 (growth fit needs 10 stages)");
        const Trajectory traj = simulate_deterministic(s.initial_pressures(), s.params(), s.steps);
        report.growth = estimate_growth_rate(traj);
    } else {
        if (s.steps < 11 || s.steps % 2 == 0) {
            fail("analyze (stochastic): steps must be odd and >= 11 (horizon and growth fit)");
        }
        if (!s.trajectories) fail("analyze (stochastic): missing required field \"trajectories\"");
        const StochasticParams params = stochastic_params(s);
        const Trajectory traj =
            simulate_stochastic(s.initial_pressures(), params, s.steps, RandomSource{s.seed, 0});
        report.growth = estimate_growth_rate(traj);
        MonteCarloConfig config{*s.trajectories, s.steps, s.x1 - s.x0, s.y1 - s.y0, threads};
        const ComparisonRecord comparison =
            compare_empirical_analytic(params, config, RandomSource{s.seed, 0});
        report.monte_carlo = comparison.report;
        report.agreement = comparison.agreement;
    }
    write_file(out_path, "report", [&](std::ostream& sink) { write_report_json(report, sink); });

    std::cout << "analyze model=" << to_string(s.model) << " q=" << format_double(report.q)
              << " verdict=" << to_string(report.verdict->cls)
              << " lyapunov=" << format_double(report.growth->lyapunov);
    if (report.q_bar) std::cout << " q_bar=" << format_double(*report.q_bar);
    if (report.agreement) std::cout << " agreement=" << (*report.agreement ? "yes" : "no");
    std::cout << " out=" << out_path << '\n';
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"sancdyn: iterated sanctions and counter-sanctions dynamics"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, format = "csv", report_format = "json", report_path;
    std::string alpha_spec, beta_spec, mode_name = "deterministic";
    std::optional<double> sigma_x, sigma_y;
    double tolerance = kDefaultTolerance;
    int threads = 0;
    Overrides overrides;

    CLI::App* simulate = app.add_subcommand("simulate", "Simulate one scenario trajectory");
    simulate->add_option("--scenario", scenario_path, "Scenario JSON path")->required();
    simulate->add_option("--out", out_path, "Trajectory output path")->required();
    simulate->add_option("--format", format, "Trajectory output format")
        ->check(CLI::IsMember({"csv", "json"}));
    simulate->add_option("--report", report_path, "Also write a run-report JSON here");
    add_scalar_flags(simulate, overrides);

    CLI::App* montecarlo =
        app.add_subcommand("montecarlo", "Estimate mean-square growth over many trajectories");
    montecarlo->add_option("--scenario", scenario_path, "Scenario JSON path")->required();
    montecarlo->add_option("--out", out_path, "Report JSON output path")->required();
    montecarlo->add_option("--format", report_format, "Report format (json only)")
        ->check(CLI::IsMember({"csv", "json"}));
    montecarlo->add_option("--threads", threads, "Worker threads (0 = hardware)");
    add_scalar_flags(montecarlo, overrides);

    CLI::App* sweep = app.add_subcommand("sweep", "Map the stability region over a gain grid");
    sweep->add_option("--alpha", alpha_spec, "Alpha axis as start:stop:count")->required();
    sweep->add_option("--beta", beta_spec, "Beta axis as start:stop:count")->required();
    sweep->add_option("--out", out_path, "Grid output path")->required();
    sweep->add_option("--mode", mode_name, "Classification mode")
        ->check(CLI::IsMember({"deterministic", "meansquare"}));
    sweep->add_option("--sigma-x", sigma_x, "Noise sigma_x (meansquare mode)");
    sweep->add_option("--sigma-y", sigma_y, "Noise sigma_y (meansquare mode)");
    sweep->add_option("--tolerance", tolerance, "Marginal band half-width");
    sweep->add_option("--format", format, "Grid output format")
        ->check(CLI::IsMember({"csv", "json"}));

    CLI::App* analyze =
        app.add_subcommand("analyze", "Growth-rate estimate plus empirical/analytic comparison");
    analyze->add_option("--scenario", scenario_path, "Scenario JSON path")->required();
    analyze->add_option("--out", out_path, "Report JSON output path")->required();
    analyze->add_option("--format", report_format, "Report format (json only)")
        ->check(CLI::IsMember({"csv", "json"}));
    analyze->add_option("--threads", threads, "Worker threads (0 = hardware)");
    add_scalar_flags(analyze, overrides);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(simulate)) {
            return cmd_simulate(scenario_path, overrides, out_path, format, report_path);
        }
        if (app.got_subcommand(montecarlo)) {
            return cmd_montecarlo(scenario_path, overrides, out_path, report_format, threads);
        }
        if (app.got_subcommand(sweep)) {
            return cmd_sweep(alpha_spec, beta_spec, mode_name, sigma_x, sigma_y, tolerance,
                             out_path, format);
        }
        if (app.got_subcommand(analyze)) {
            return cmd_analyze(scenario_path, overrides, out_path, report_format, threads);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace sancdyn
