#include <atomic>
#include <cstdlib>
#include <cstring>

#include "covercs/latsum.hpp"

namespace covercs::latsum {

namespace {

Backend detect_backend() {
    if (const char* env = std::getenv("COVERCS_SIMD"); env && std::strcmp(env, "scalar") == 0)
        return Backend::Scalar;
#ifdef COVERCS_HAVE_AVX2
    if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#endif
    return Backend::Scalar;
}

std::atomic<int> g_forced{-1};  // -1: auto, else Backend value

Backend current() {
    const int f = g_forced.load(std::memory_order_relaxed);
    if (f >= 0) return static_cast<Backend>(f);
    static const Backend detected = detect_backend();
    return detected;
}

}  // namespace

Backend active_backend() { return current(); }

void force_backend(std::optional<Backend> b) {
    g_forced.store(b ? static_cast<int>(*b) : -1, std::memory_order_relaxed);
}

double strip_sum(const StripKernel& k, double base_sq, double off, double step,
                 std::int64_t count) {
    if (count <= 0) return 0.0;
#ifdef COVERCS_HAVE_AVX2
    if (current() == Backend::Avx2) return strip_sum_avx2(k, base_sq, off, step, count);
#endif
    return strip_sum_scalar(k, base_sq, off, step, count);
}

}  // namespace covercs::latsum
