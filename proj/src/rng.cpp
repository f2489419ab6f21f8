#include "truckpark/rng.hpp"

#include <cmath>
#include <numbers>

namespace truckpark {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::exponential(double rate) {
    return -std::log(uniform_pos()) / rate;
}

double Rng::normal(double mean, double stddev) {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
}

} // namespace truckpark
