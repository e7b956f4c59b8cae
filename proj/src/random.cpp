#include "sancdyn/random.hpp"

#include <cmath>
#include <numbers>

namespace sancdyn {

double NoiseStream::standard_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 shifted into (0, 1] so the log is always finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

double NoiseStream::draw(NoiseDistribution dist, double sigma) {
    switch (dist) {
        case NoiseDistribution::Gaussian:
            return sigma * standard_normal();
        case NoiseDistribution::Uniform:
            // (2u - 1) * sqrt(3): zero mean, unit variance.
            return sigma * ((2.0 * uniform01() - 1.0) * std::numbers::sqrt3);
    }
    return 0.0;
}

}  // namespace sancdyn
