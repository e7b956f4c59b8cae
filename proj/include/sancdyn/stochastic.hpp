// Stochastic pressure dynamics: randomly perturbed cross-gains, the
// averaged-gain mean-square criterion, and Monte Carlo estimation of the
// two-stage mean-square growth factor.
#pragma once

#include <cstdint>
#include <optional>

#include "sancdyn/core.hpp"
#include "sancdyn/random.hpp"

namespace sancdyn {

/// Standard deviations and distribution family of the per-stage
/// perturbations of the two cross-gains. Both families are zero-mean and
/// scaled to the declared standard deviation.
struct NoiseSpec {
    double sigma_x;
    double sigma_y;
    NoiseDistribution distribution = NoiseDistribution::Gaussian;

    NoiseSpec(double sigma_x, double sigma_y,
              NoiseDistribution distribution = NoiseDistribution::Gaussian);
};

struct StochasticParams {
    ModelParams base;
    NoiseSpec noise;
};

/// Averaged gain governing mean-square stability:
///   qbar = (alpha^2 + sigma_x^2) * (beta^2 + sigma_y^2).
/// With zero noise this is q^2, the square of the deterministic gain.
double averaged_gain(const StochasticParams& params);

/// Infimum of the averaged gain over all positive strategies:
/// sigma_x^2 * sigma_y^2. Mean-square stability is achievable by strategy
/// choice iff this floor is < 1. (sigma_x^2 + sigma_y^2 < 1 is sufficient
/// for that, by AM-GM, but not necessary.)
double min_achievable_gain(const NoiseSpec& noise);

/// classify_stability applied to the averaged gain; Stable means the mean
/// square of the increments tends to zero.
StabilityVerdict classify_mean_square(const StochasticParams& params,
                                      double tolerance = kDefaultTolerance);

/// The xi and eta noise channels of one trajectory, derived from a
/// RandomSource. The two channels are independent substreams.
class NoiseChannels {
  public:
    explicit NoiseChannels(const RandomSource& source)
        : xi_(source.channel_seed(0)), eta_(source.channel_seed(1)) {}

    double draw_xi(const NoiseSpec& spec) { return xi_.draw(spec.distribution, spec.sigma_x); }
    double draw_eta(const NoiseSpec& spec) { return eta_.draw(spec.distribution, spec.sigma_y); }

  private:
    NoiseStream xi_;
    NoiseStream eta_;
};

/// One step of the perturbed increment recurrence:
///   (v', w') = ((alpha + xi) w, (beta + eta) v),
/// drawing xi then eta from the channels. With zero sigmas the draws are
/// exactly 0 and the step reproduces step_increments bit-for-bit.
IncrementState step_stochastic(const IncrementState& state, const StochasticParams& params,
                               NoiseChannels& noise);

/// One sample path of the perturbed recurrence. Increments are primary;
/// pressures are reconstructed by cumulative summation from the initial
/// anchors, as in simulate_deterministic.
Trajectory simulate_stochastic(const PressureState& initial, const StochasticParams& params,
                               std::int64_t steps, const RandomSource& source);

struct MonteCarloConfig {
    std::int64_t n_trajectories;
    std::int64_t horizon;  // highest simulated stage; must be odd and >= 3
    double v1 = 1.0;       // stage-1 increments shared by every trajectory
    double w1 = 1.0;
    int threads = 0;       // 0 = hardware concurrency
};

/// Estimated two-stage mean-square growth of v with its 99% confidence
/// interval and the analytic averaged gain it is compared against.
struct MonteCarloReport {
    std::int64_t n_trajectories;
    std::int64_t horizon;
    double empirical_ms_ratio;
    double ci_low;
    double ci_high;
    double analytic_qbar;
    StabilityVerdict verdict;  // classification of analytic_qbar
    std::uint64_t master_seed;
};

/// Simulates n_trajectories independent paths from the fixed initial
/// increments and estimates the per-two-stage ratio of the mean square of
/// v by least squares on the log mean squares over the odd stages
/// 1, 3, ..., horizon (the parity class seeded by v1).
///
/// Trajectory k draws from stream_index = source.stream_index + k, and
/// reductions run over fixed-size chunks combined in index order, so the
/// report is identical for any thread count.
///
/// CI: normal approximation on the log ratio with the delta method over
/// the full cross-stage covariance; percentile bootstrap (2000 resamples)
/// below 1000 trajectories. Throws estimation_error if a stage mean
/// square vanishes or overflows.
MonteCarloReport monte_carlo_ms_growth(const StochasticParams& params,
                                       const MonteCarloConfig& config,
                                       const RandomSource& source);

}  // namespace sancdyn
