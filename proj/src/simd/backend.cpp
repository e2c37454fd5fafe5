#include "mucap/simd/kernels.hpp"

#include <atomic>

#include "mucap/errors.hpp"
#include "kernels_internal.hpp"

namespace mucap::simd {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<int> g_forced{-1};  // -1 = auto

Backend detect() {
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

} // namespace

Backend active_backend() {
    const int f = g_forced.load(std::memory_order_relaxed);
    if (f >= 0) return static_cast<Backend>(f);
    static const Backend detected = detect();
    return detected;
}

bool backend_supported(Backend b) {
    return b == Backend::scalar || (b == Backend::avx2 && cpu_has_avx2());
}

void force_backend(Backend b) {
    if (!backend_supported(b)) {
        throw Error("requested SIMD backend not supported on this CPU");
    }
    g_forced.store(static_cast<int>(b), std::memory_order_relaxed);
}

void reset_backend() { g_forced.store(-1, std::memory_order_relaxed); }

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

void philox_fill(const StreamKey& key, std::uint64_t block0, std::size_t nblocks,
                 std::uint32_t* out) {
    if (active_backend() == Backend::avx2) {
        detail::philox_fill_avx2(key, block0, nblocks, out);
    } else {
        detail::philox_fill_scalar(key, block0, nblocks, out);
    }
}

void uniform_fill(const StreamKey& key, std::uint64_t block0, std::size_t count,
                  double* out) {
    if (active_backend() == Backend::avx2) {
        detail::uniform_fill_avx2(key, block0, count, out);
    } else {
        detail::uniform_fill_scalar(key, block0, count, out);
    }
}

void normal_fill(const StreamKey& key, std::uint64_t block0, std::size_t count,
                 double* out) {
    if (active_backend() == Backend::avx2) {
        detail::normal_fill_avx2(key, block0, count, out);
    } else {
        detail::normal_fill_scalar(key, block0, count, out);
    }
}

void sincos_fill(const double* angles, std::size_t count, double* sin_out,
                 double* cos_out) {
    if (active_backend() == Backend::avx2) {
        detail::sincos_fill_avx2(angles, count, sin_out, cos_out);
    } else {
        detail::sincos_fill_scalar(angles, count, sin_out, cos_out);
    }
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace mucap::simd
