#include <atomic>
#include <string>

#include "truckpark/error.hpp"
#include "truckpark/kernels.hpp"

namespace truckpark::kernels {

namespace {

constexpr KernelTable kScalar{Backend::Scalar, &warp_moments_scalar, &trailing_mean_scalar};
#if defined(TRUCKPARK_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2{Backend::Avx2, &warp_moments_avx2, &trailing_mean_avx2};
#endif

// -1: no override, otherwise a Backend value.
std::atomic<int> g_override{-1};

} // namespace

const char* backend_name(Backend backend) {
    switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    }
    return "?";
}

bool backend_available(Backend backend) {
    switch (backend) {
    case Backend::Scalar: return true;
    case Backend::Avx2:
#if defined(TRUCKPARK_HAVE_AVX2_KERNELS)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    }
    return false;
}

Backend detect_backend() {
    static const Backend detected = backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
    return detected;
}

const KernelTable& table_for(Backend backend) {
    if (!backend_available(backend)) {
        throw Error(std::string("kernel backend not supported on this CPU: ") + backend_name(backend));
    }
#if defined(TRUCKPARK_HAVE_AVX2_KERNELS)
    if (backend == Backend::Avx2) return kAvx2;
#endif
    return kScalar;
}

const KernelTable& active() {
    const int forced = g_override.load(std::memory_order_relaxed);
    return table_for(forced >= 0 ? static_cast<Backend>(forced) : detect_backend());
}

void set_backend_override(std::optional<Backend> backend) {
    if (backend) table_for(*backend); // throws if unavailable
    g_override.store(backend ? static_cast<int>(*backend) : -1, std::memory_order_relaxed);
}

} // namespace truckpark::kernels
