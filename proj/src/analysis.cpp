#include "sancdyn/analysis.hpp"

#include <cmath>
#include <string>

namespace sancdyn {

namespace {

void require(bool cond, const char* message) {
    if (!cond) throw std::invalid_argument(message);
}

void validate_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw std::invalid_argument(std::string(name) + " axis must be non-empty");
    double prev = 0.0;  // axis values must exceed 0, so this is a valid "previous"
    for (const double a : axis) {
        if (!std::isfinite(a) || a <= 0.0) {
            throw std::invalid_argument(std::string(name) + " axis values must be positive reals");
        }
        if (a <= prev) {
            throw std::invalid_argument(std::string(name) + " axis must be strictly increasing");
        }
        prev = a;
    }
}

}  // namespace

StabilityGrid sweep_stability_region(std::vector<double> alpha_axis,
                                     std::vector<double> beta_axis, SweepMode mode,
                                     std::optional<NoiseSpec> noise, double tolerance) {
    validate_axis(alpha_axis, "alpha");
    validate_axis(beta_axis, "beta");
    if (mode == SweepMode::MeanSquare && !noise.has_value()) {
        throw std::invalid_argument("mean-square sweep requires a noise spec");
    }

    StabilityGrid grid{std::move(alpha_axis), std::move(beta_axis), mode,
                       mode == SweepMode::MeanSquare ? noise : std::nullopt, tolerance,
                       {}};
    grid.cells.reserve(grid.alpha_axis.size() * grid.beta_axis.size());
    for (const double alpha : grid.alpha_axis) {
        for (const double beta : grid.beta_axis) {
            double gain;
            if (mode == SweepMode::Deterministic) {
                gain = total_gain(ModelParams(alpha, beta));
            } else {
                gain = averaged_gain(StochasticParams{ModelParams(alpha, beta), *grid.noise});
            }
            grid.cells.push_back({gain, classify_stability(gain, tolerance).cls});
        }
    }
    return grid;
}

GrowthEstimate estimate_growth_rate(const Trajectory& trajectory) {
    const auto& rec = trajectory.records;
    require(rec.size() >= 10, "growth estimation requires at least 10 stages");

    // Final 80% of the records, split by stage parity; the two parity
    // classes evolve independently, so the fit stays on one of them.
    const std::size_t start = rec.size() / 5;
    std::vector<std::pair<double, double>> points[2];  // (stage, ln |v|)
    for (std::size_t i = start; i < rec.size(); ++i) {
        if (rec[i].v == 0.0) continue;
        points[static_cast<std::size_t>(rec[i].stage & 1)].emplace_back(
            static_cast<double>(rec[i].stage), std::log(std::abs(rec[i].v)));
    }
    const auto& cls = points[0].size() >= points[1].size() ? points[0] : points[1];
    if (cls.size() < 2) {
        throw estimation_error("all increments are zero; growth rate undefined");
    }

    double x_mean = 0.0, y_mean = 0.0;
    for (const auto& [x, y] : cls) {
        x_mean += x;
        y_mean += y;
    }
    x_mean /= static_cast<double>(cls.size());
    y_mean /= static_cast<double>(cls.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : cls) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    const double lyapunov = sxy / sxx;
    const double analytic = 0.5 * std::log(total_gain(trajectory.params));
    return GrowthEstimate{lyapunov, analytic, std::abs(lyapunov - analytic)};
}

ComparisonRecord compare_empirical_analytic(const StochasticParams& params,
                                            const MonteCarloConfig& config,
                                            const RandomSource& source) {
    const MonteCarloReport report = monte_carlo_ms_growth(params, config, source);
    const bool agreement =
        report.ci_low <= report.analytic_qbar && report.analytic_qbar <= report.ci_high;
    return ComparisonRecord{report, agreement};
}

}  // namespace sancdyn
