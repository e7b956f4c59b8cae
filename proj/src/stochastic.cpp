#include "sancdyn/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <thread>
#include <vector>

namespace sancdyn {

namespace {

void require(bool cond, const char* message) {
    if (!cond) throw std::invalid_argument(message);
}

// 99% two-sided normal quantile.
constexpr double kZ99 = 2.5758293035489004;
constexpr int kBootstrapResamples = 2000;
// Below this many trajectories the normal approximation is replaced by a
// percentile bootstrap.
constexpr std::int64_t kBootstrapThreshold = 1000;
constexpr std::int64_t kChunkSize = 4096;
// Largest stage-square buffer kept in memory; beyond it trajectories are
// regenerated for the covariance pass.
constexpr std::size_t kBufferDoubles = std::size_t{4} << 20;

int resolve_threads(int requested, std::int64_t n_chunks) {
    int t = requested;
    if (t <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        t = hw > 0 ? static_cast<int>(hw) : 1;
    }
    return static_cast<int>(std::min<std::int64_t>(t, n_chunks));
}

// Runs fn(chunk_index) over all chunks. Chunks are claimed dynamically but
// every chunk's output lands in per-chunk storage, so results do not
// depend on the schedule.
template <typename Fn>
void for_each_chunk(std::int64_t n_chunks, int threads, Fn&& fn) {
    if (threads <= 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) fn(c);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                fn(c);
            }
        });
    }
    for (auto& th : pool) th.join();
}

// Squared v at the odd stages 1, 3, ..., horizon of one sample path.
void trajectory_stage_squares(const StochasticParams& params, std::int64_t horizon, double v1,
                              double w1, const RandomSource& source, double* out) {
    NoiseChannels noise(source);
    double v = v1, w = w1;
    out[0] = v * v;
    std::size_t idx = 1;
    for (std::int64_t n = 1; n < horizon; ++n) {
        const double xi = noise.draw_xi(params.noise);
        const double eta = noise.draw_eta(params.noise);
        const double v_next = (params.base.alpha + xi) * w;
        const double w_next = (params.base.beta + eta) * v;
        v = v_next;
        w = w_next;
        if ((n + 1) % 2 == 1) out[idx++] = v * v;
    }
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] + (pos - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

}  // namespace

NoiseSpec::NoiseSpec(double sigma_x_, double sigma_y_, NoiseDistribution distribution_)
    : sigma_x(sigma_x_), sigma_y(sigma_y_), distribution(distribution_) {
    require(std::isfinite(sigma_x) && sigma_x >= 0, "sigma_x must be a finite non-negative real");
    require(std::isfinite(sigma_y) && sigma_y >= 0, "sigma_y must be a finite non-negative real");
}

double averaged_gain(const StochasticParams& params) {
    const double ax = params.base.alpha * params.base.alpha + params.noise.sigma_x * params.noise.sigma_x;
    const double by = params.base.beta * params.base.beta + params.noise.sigma_y * params.noise.sigma_y;
    return ax * by;
}

double min_achievable_gain(const NoiseSpec& noise) {
    return noise.sigma_x * noise.sigma_x * noise.sigma_y * noise.sigma_y;
}

StabilityVerdict classify_mean_square(const StochasticParams& params, double tolerance) {
    return classify_stability(averaged_gain(params), tolerance);
}

IncrementState step_stochastic(const IncrementState& state, const StochasticParams& params,
                               NoiseChannels& noise) {
    const double xi = noise.draw_xi(params.noise);
    const double eta = noise.draw_eta(params.noise);
    return IncrementState((params.base.alpha + xi) * state.w, (params.base.beta + eta) * state.v,
                          state.stage + 1);
}

Trajectory simulate_stochastic(const PressureState& initial, const StochasticParams& params,
                               std::int64_t steps, const RandomSource& source) {
    require(steps >= 0, "steps must be non-negative");
    NoiseChannels noise(source);
    Trajectory traj{params.base, {}, std::nullopt};
    traj.records.reserve(static_cast<std::size_t>(steps) + 1);

    double x = initial.x_curr, y = initial.y_curr;
    double v = initial.v(), w = initial.w();
    traj.records.push_back({initial.stage, x, y, v, w});

    for (std::int64_t i = 1; i <= steps; ++i) {
        const double xi = noise.draw_xi(params.noise);
        const double eta = noise.draw_eta(params.noise);
        const double v_next = (params.base.alpha + xi) * w;
        const double w_next = (params.base.beta + eta) * v;
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

MonteCarloReport monte_carlo_ms_growth(const StochasticParams& params,
                                       const MonteCarloConfig& config,
                                       const RandomSource& source) {
    require(config.n_trajectories >= 2, "n_trajectories must be >= 2");
    require(config.horizon >= 3 && config.horizon % 2 == 1, "horizon must be odd and >= 3");
    require(std::isfinite(config.v1) && std::isfinite(config.w1),
            "initial increments must be finite reals");

    const std::int64_t n = config.n_trajectories;
    const auto n_stages = static_cast<std::size_t>((config.horizon + 1) / 2);
    const std::int64_t n_chunks = (n + kChunkSize - 1) / kChunkSize;
    const int threads = resolve_threads(config.threads, n_chunks);

    // The bootstrap resamples stored rows, so small runs always buffer.
    const bool buffered = static_cast<std::size_t>(n) * n_stages <= kBufferDoubles ||
                          n < kBootstrapThreshold;
    std::vector<double> buffer(buffered ? static_cast<std::size_t>(n) * n_stages : 0);

    struct ChunkMoments {
        std::vector<double> sum, mn, mx;
    };
    std::vector<ChunkMoments> chunk_moments(static_cast<std::size_t>(n_chunks));

    auto stream_for = [&](std::int64_t k) {
        return source.with_stream(source.stream_index + static_cast<std::uint64_t>(k));
    };

    // Pass 1: stage sums plus min/max (exact detection of zero spread).
    for_each_chunk(n_chunks, threads, [&](std::int64_t c) {
        auto& m = chunk_moments[static_cast<std::size_t>(c)];
        m.sum.assign(n_stages, 0.0);
        m.mn.assign(n_stages, std::numeric_limits<double>::infinity());
        m.mx.assign(n_stages, -std::numeric_limits<double>::infinity());
        std::vector<double> row(n_stages);
        const std::int64_t lo = c * kChunkSize;
        const std::int64_t hi = std::min(n, lo + kChunkSize);
        for (std::int64_t k = lo; k < hi; ++k) {
            double* dst = buffered ? buffer.data() + static_cast<std::size_t>(k) * n_stages
                                   : row.data();
            trajectory_stage_squares(params, config.horizon, config.v1, config.w1, stream_for(k),
                                     dst);
            for (std::size_t s = 0; s < n_stages; ++s) {
                m.sum[s] += dst[s];
                m.mn[s] = std::min(m.mn[s], dst[s]);
                m.mx[s] = std::max(m.mx[s], dst[s]);
            }
        }
    });

    std::vector<double> mean(n_stages, 0.0), mn(n_stages, std::numeric_limits<double>::infinity()),
        mx(n_stages, -std::numeric_limits<double>::infinity());
    for (const auto& m : chunk_moments) {
        for (std::size_t s = 0; s < n_stages; ++s) {
            mean[s] += m.sum[s];
            mn[s] = std::min(mn[s], m.mn[s]);
            mx[s] = std::max(mx[s], m.mx[s]);
        }
    }
    bool all_constant = true;
    for (std::size_t s = 0; s < n_stages; ++s) {
        // A stage where every trajectory produced the same value has that
        // value as its exact mean; summation rounding would otherwise leak
        // into the zero-variance case.
        if (mn[s] == mx[s]) {
            mean[s] = mn[s];
        } else {
            mean[s] /= static_cast<double>(n);
            all_constant = false;
        }
        if (!std::isfinite(mean[s])) {
            throw estimation_error("mean square overflowed at stage " +
                                   std::to_string(1 + 2 * s));
        }
        if (mean[s] <= 0.0) {
            throw estimation_error("mean square vanished at stage " + std::to_string(1 + 2 * s) +
                                   " (degenerate trajectories)");
        }
    }

    // OLS slope of ln(mean square) against stage over the odd stages.
    std::vector<double> weight(n_stages), log_mean(n_stages);
    {
        double stage_mean = 0.0;
        for (std::size_t s = 0; s < n_stages; ++s) stage_mean += static_cast<double>(1 + 2 * s);
        stage_mean /= static_cast<double>(n_stages);
        double sxx = 0.0;
        for (std::size_t s = 0; s < n_stages; ++s) {
            const double d = static_cast<double>(1 + 2 * s) - stage_mean;
            sxx += d * d;
        }
        for (std::size_t s = 0; s < n_stages; ++s) {
            weight[s] = (static_cast<double>(1 + 2 * s) - stage_mean) / sxx;
            log_mean[s] = std::log(mean[s]);
        }
    }
    double slope = 0.0;
    for (std::size_t s = 0; s < n_stages; ++s) slope += weight[s] * log_mean[s];
    const double ratio = std::exp(2.0 * slope);

    double ci_low = ratio, ci_high = ratio;
    if (n < kBootstrapThreshold) {
        // Percentile bootstrap over trajectories; the resampling stream is
        // reserved so it never collides with a trajectory stream.
        std::mt19937_64 resampler(
            RandomSource{source.master_seed, std::numeric_limits<std::uint64_t>::max()}
                .channel_seed(2));
        std::vector<double> slopes(kBootstrapResamples);
        std::vector<double> resampled(n_stages);
        for (int r = 0; r < kBootstrapResamples; ++r) {
            std::fill(resampled.begin(), resampled.end(), 0.0);
            for (std::int64_t i = 0; i < n; ++i) {
                const auto k = static_cast<std::size_t>(resampler() % static_cast<std::uint64_t>(n));
                const double* row = buffer.data() + k * n_stages;
                for (std::size_t s = 0; s < n_stages; ++s) resampled[s] += row[s];
            }
            double slope_r = 0.0;
            for (std::size_t s = 0; s < n_stages; ++s) {
                const double m = resampled[s] / static_cast<double>(n);
                if (!(m > 0.0) || !std::isfinite(m)) {
                    throw estimation_error("bootstrap resample degenerated at stage " +
                                           std::to_string(1 + 2 * s));
                }
                slope_r += weight[s] * std::log(m);
            }
            slopes[static_cast<std::size_t>(r)] = slope_r;
        }
        std::sort(slopes.begin(), slopes.end());
        ci_low = std::min(std::exp(2.0 * quantile_sorted(slopes, 0.005)), ratio);
        ci_high = std::max(std::exp(2.0 * quantile_sorted(slopes, 0.995)), ratio);
    } else if (!all_constant) {
        // Delta method: Var(slope) = w^T diag(1/m) Cov diag(1/m) w / n with
        // the sample covariance of the stage squares. Second pass over the
        // trajectories, centered to keep constant stages exactly at zero.
        const std::size_t n_pairs = n_stages * (n_stages + 1) / 2;
        std::vector<std::vector<double>> chunk_cross(static_cast<std::size_t>(n_chunks));
        for_each_chunk(n_chunks, threads, [&](std::int64_t c) {
            auto& cross = chunk_cross[static_cast<std::size_t>(c)];
            cross.assign(n_pairs, 0.0);
            std::vector<double> row(n_stages), centered(n_stages);
            const std::int64_t lo = c * kChunkSize;
            const std::int64_t hi = std::min(n, lo + kChunkSize);
            for (std::int64_t k = lo; k < hi; ++k) {
                const double* src = nullptr;
                if (buffered) {
                    src = buffer.data() + static_cast<std::size_t>(k) * n_stages;
                } else {
                    trajectory_stage_squares(params, config.horizon, config.v1, config.w1,
                                             stream_for(k), row.data());
                    src = row.data();
                }
                for (std::size_t s = 0; s < n_stages; ++s) centered[s] = src[s] - mean[s];
                std::size_t p = 0;
                for (std::size_t s = 0; s < n_stages; ++s) {
                    for (std::size_t t = s; t < n_stages; ++t) {
                        cross[p++] += centered[s] * centered[t];
                    }
                }
            }
        });
        std::vector<double> cross(n_pairs, 0.0);
        for (const auto& c : chunk_cross) {
            for (std::size_t p = 0; p < n_pairs; ++p) cross[p] += c[p];
        }
        double var_slope = 0.0;
        std::size_t p = 0;
        for (std::size_t s = 0; s < n_stages; ++s) {
            for (std::size_t t = s; t < n_stages; ++t) {
                const double cov = cross[p++] / static_cast<double>(n - 1);
                const double term = weight[s] * weight[t] * cov / (mean[s] * mean[t]);
                var_slope += (s == t) ? term : 2.0 * term;
            }
        }
        const double se = std::sqrt(std::max(var_slope, 0.0) / static_cast<double>(n));
        ci_low = std::exp(2.0 * (slope - kZ99 * se));
        ci_high = std::exp(2.0 * (slope + kZ99 * se));
    }

    const double qbar = averaged_gain(params);
    return MonteCarloReport{config.n_trajectories, config.horizon, ratio,          ci_low,
                            ci_high,               qbar,           classify_stability(qbar),
                            source.master_seed};
}

}  // namespace sancdyn
