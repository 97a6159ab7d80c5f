#include "spikelab/rng.hpp"

#include <cmath>
#include <numbers>

namespace spikelab {

double RngStream::normal(std::uint64_t index) const {
    const double u1 = uniform(index, 1);
    const double u2 = uniform(index, 2);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace spikelab
