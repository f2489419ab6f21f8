#pragma once

// Inner-loop kernels with a scalar reference and SIMD variants selected at
// runtime. Every variant evaluates the same per-element expression in the
// same order; only the summation order of reductions may differ.

#include <cstddef>
#include <optional>
#include <span>

namespace truckpark::kernels {

/// Cross moments of observations y against a warped, linearly interpolated
/// profile f(t) = profile(beta * (t - tau)).
struct WarpMoments {
    double yf = 0; // sum y * f
    double ff = 0; // sum f * f
};

/// Profile knots sit at multiples of `bin_s`; lookups outside the knot range
/// clamp to the end values. Requires at least two knots.
using WarpMomentsFn = WarpMoments (*)(std::span<const double> profile, double bin_s, std::span<const double> t,
                                      std::span<const double> y, double beta, double tau);

/// out[i] = mean of x[i - window + 1 .. i], shorter at the start. Each sum is
/// accumulated oldest sample first, so all variants agree bit for bit.
using TrailingMeanFn = void (*)(std::span<const double> x, std::size_t window, std::span<double> out);

/// Single interpolated lookup, same arithmetic as the kernels.
double warp_lookup(std::span<const double> profile, double bin_s, double t, double beta, double tau);

WarpMoments warp_moments_scalar(std::span<const double> profile, double bin_s, std::span<const double> t,
                                std::span<const double> y, double beta, double tau);
void trailing_mean_scalar(std::span<const double> x, std::size_t window, std::span<double> out);

#if defined(TRUCKPARK_HAVE_AVX2_KERNELS)
WarpMoments warp_moments_avx2(std::span<const double> profile, double bin_s, std::span<const double> t,
                              std::span<const double> y, double beta, double tau);
void trailing_mean_avx2(std::span<const double> x, std::size_t window, std::span<double> out);
#endif

enum class Backend { Scalar, Avx2 };

const char* backend_name(Backend backend);

struct KernelTable {
    Backend backend;
    WarpMomentsFn warp_moments;
    TrailingMeanFn trailing_mean;
};

/// Best backend the running CPU supports.
Backend detect_backend();
bool backend_available(Backend backend);

/// Kernel table for `backend`; throws if the CPU lacks it.
const KernelTable& table_for(Backend backend);

/// Table used by the library: the override if set, otherwise detected.
const KernelTable& active();

/// Pins the backend for the whole process (tests and benchmarks). Pass
/// nullopt to return to detection.
void set_backend_override(std::optional<Backend> backend);

} // namespace truckpark::kernels
