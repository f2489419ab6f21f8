#pragma once

#include <cstdint>
#include <random>

namespace truckpark {

/// Seeded random source with platform-independent variate transforms.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The std:: distributions are not (their algorithms vary between
/// standard libraries), so uniforms, normals and exponentials are derived
/// here from raw engine output. Artifacts therefore stay byte-identical
/// across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1].
    double uniform_pos() { return 1.0 - uniform(); }
    double exponential(double rate);
    /// Box-Muller; one engine pair per call, the second variate is dropped.
    double normal(double mean, double stddev);

private:
    std::mt19937_64 engine_;
};

} // namespace truckpark
