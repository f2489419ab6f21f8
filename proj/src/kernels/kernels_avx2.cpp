// Built with -mavx2. Nothing here may run before dispatch has confirmed
// AVX2 support, and no inline templates from headers are instantiated here
// (an AVX2 copy could be picked by the linker for scalar callers).

#include <immintrin.h>

#include "truckpark/kernels.hpp"

namespace truckpark::kernels {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

} // namespace

WarpMoments warp_moments_avx2(std::span<const double> profile, double bin_s, std::span<const double> t,
                              std::span<const double> y, double beta, double tau) {
    const std::size_t n = t.size();
    const double last = static_cast<double>(profile.size() - 1);
    const __m256d v_beta = _mm256_set1_pd(beta);
    const __m256d v_tau = _mm256_set1_pd(tau);
    const __m256d v_bin = _mm256_set1_pd(bin_s);
    const __m256d v_zero = _mm256_setzero_pd();
    const __m256d v_last = _mm256_set1_pd(last);
    const __m256d v_last_base = _mm256_set1_pd(last - 1.0);
    const double* knots = profile.data();

    __m256d acc_yf = _mm256_setzero_pd();
    __m256d acc_ff = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vt = _mm256_loadu_pd(t.data() + i);
        const __m256d vy = _mm256_loadu_pd(y.data() + i);
        __m256d x = _mm256_div_pd(_mm256_mul_pd(v_beta, _mm256_sub_pd(vt, v_tau)), v_bin);
        x = _mm256_min_pd(_mm256_max_pd(x, v_zero), v_last);
        const __m256d base = _mm256_min_pd(_mm256_floor_pd(x), v_last_base);
        const __m256d frac = _mm256_sub_pd(x, base);
        const __m128i idx = _mm256_cvttpd_epi32(base);
        const __m256d v0 = _mm256_i32gather_pd(knots, idx, 8);
        const __m256d v1 = _mm256_i32gather_pd(knots + 1, idx, 8);
        const __m256d f = _mm256_add_pd(v0, _mm256_mul_pd(frac, _mm256_sub_pd(v1, v0)));
        acc_yf = _mm256_add_pd(acc_yf, _mm256_mul_pd(vy, f));
        acc_ff = _mm256_add_pd(acc_ff, _mm256_mul_pd(f, f));
    }
    WarpMoments m{hsum(acc_yf), hsum(acc_ff)};
    for (; i < n; ++i) {
        const double f = warp_lookup(profile, bin_s, t[i], beta, tau);
        m.yf += y[i] * f;
        m.ff += f * f;
    }
    return m;
}

void trailing_mean_avx2(std::span<const double> x, std::size_t window, std::span<double> out) {
    const std::size_t n = x.size();
    const std::size_t lead = window > 0 ? window - 1 : 0;
    const std::size_t warm = lead < n ? lead : n;
    trailing_mean_scalar(x.first(warm), window, out.first(warm));

    const __m256d v_len = _mm256_set1_pd(static_cast<double>(window));
    std::size_t i = warm;
    for (; i + 4 <= n; i += 4) {
        __m256d sum = _mm256_setzero_pd();
        for (std::size_t k = 0; k < window; ++k) {
            sum = _mm256_add_pd(sum, _mm256_loadu_pd(x.data() + i + k + 1 - window));
        }
        _mm256_storeu_pd(out.data() + i, _mm256_div_pd(sum, v_len));
    }
    for (; i < n; ++i) {
        double sum = 0;
        for (std::size_t k = i + 1 - window; k <= i; ++k) sum += x[k];
        out[i] = sum / static_cast<double>(window);
    }
}

} // namespace truckpark::kernels
