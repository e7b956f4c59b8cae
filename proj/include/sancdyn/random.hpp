// Seedable counter-style random streams. A (master_seed, stream_index)
// pair names a reproducible stream; distinct indices give statistically
// independent substreams, so aggregate results do not depend on the order
// in which streams are consumed.
#pragma once

#include <cstdint>
#include <random>

namespace sancdyn {

// splitmix64 finalizer; used to spread seed material before feeding the
// engine.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Names one substream of the master seed. Equal values always produce
/// the identical sample sequence.
struct RandomSource {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    /// Engine seed for one channel of this stream (channel 0 = xi,
    /// channel 1 = eta, channel 2 = resampling).
    std::uint64_t channel_seed(std::uint64_t channel) const {
        std::uint64_t s = mix64(master_seed);
        s = mix64(s ^ mix64(stream_index));
        return mix64(s ^ mix64(channel));
    }

    RandomSource with_stream(std::uint64_t index) const {
        return RandomSource{master_seed, index};
    }
};

enum class NoiseDistribution { Gaussian, Uniform };

/// One channel of zero-mean draws over a splitmix64 core. The generator
/// and the transforms are written out (rather than using std:: engines and
/// distributions) so the sample sequence is identical across standard
/// library implementations, and so per-trajectory stream construction
/// stays cheap enough for multi-million-trajectory runs.
class NoiseStream {
  public:
    explicit NoiseStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the second value of each pair is
    /// cached, so draws alternate one/zero engine consumptions.
    double standard_normal();

    /// Zero-mean draw with standard deviation sigma. Uniform draws are on
    /// [-sqrt(3) sigma, sqrt(3) sigma] so the variance is sigma^2.
    double draw(NoiseDistribution dist, double sigma);

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sancdyn
