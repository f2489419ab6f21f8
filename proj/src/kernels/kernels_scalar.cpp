#include <algorithm>
#include <cmath>

#include "truckpark/kernels.hpp"

namespace truckpark::kernels {

double warp_lookup(std::span<const double> profile, double bin_s, double t, double beta, double tau) {
    const double last = static_cast<double>(profile.size() - 1);
    double x = (beta * (t - tau)) / bin_s;
    x = std::min(std::max(x, 0.0), last);
    const double base = std::min(std::floor(x), last - 1.0);
    const double frac = x - base;
    const auto i = static_cast<std::size_t>(base);
    const double v0 = profile[i];
    const double v1 = profile[i + 1];
    return v0 + frac * (v1 - v0);
}

WarpMoments warp_moments_scalar(std::span<const double> profile, double bin_s, std::span<const double> t,
                                std::span<const double> y, double beta, double tau) {
    WarpMoments m;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double f = warp_lookup(profile, bin_s, t[i], beta, tau);
        m.yf += y[i] * f;
        m.ff += f * f;
    }
    return m;
}

void trailing_mean_scalar(std::span<const double> x, std::size_t window, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t len = std::min(window, i + 1);
        double sum = 0;
        for (std::size_t k = i + 1 - len; k <= i; ++k) sum += x[k];
        out[i] = sum / static_cast<double>(len);
    }
}

} // namespace truckpark::kernels
