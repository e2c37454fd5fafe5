#pragma once

#include <cstddef>
#include <cstdint>

namespace mucap::simd {

// Runtime-selected instruction set for the data-parallel kernels. The AVX2
// path is written to be bit-identical to the scalar reference: only
// correctly-rounded operations (add/sub/mul/div/sqrt/fma) in the same order,
// so results do not depend on the selected backend.
enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_supported(Backend b);
void force_backend(Backend b);  // throws Error if unsupported; testing hook
void reset_backend();           // back to auto-detection
const char* backend_name(Backend b);

// Counter-based RNG stream identity: (seed, stream) select a Philox-4x32-10
// keyed sequence, block0 indexes 128-bit blocks within it. Disjoint streams
// and disjoint block ranges are statistically independent, which is what
// makes trial-parallel Monte Carlo reproducible at any worker count.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// Raw Philox blocks: out[4*i + w] = word w of block (block0 + i).
void philox_fill(const StreamKey& key, std::uint64_t block0, std::size_t nblocks,
                 std::uint32_t* out);

// Uniform doubles in [0,1), two per block (52 random bits each).
void uniform_fill(const StreamKey& key, std::uint64_t block0, std::size_t count,
                  double* out);

// Standard normals via Box-Muller, two per block; pairs share a block, so an
// odd count consumes the same blocks as count+1.
void normal_fill(const StreamKey& key, std::uint64_t block0, std::size_t count,
                 double* out);

// Elementwise sin/cos for |angle| <= 1e6 (Cody-Waite reduced).
void sincos_fill(const double* angles, std::size_t count, double* sin_out,
                 double* cos_out);

constexpr std::uint64_t blocks_for_pairs(std::size_t count) {
    return (static_cast<std::uint64_t>(count) + 1) / 2;
}

// SplitMix64; used to derive per-trial stream ids from structured indices.
std::uint64_t mix64(std::uint64_t x);

} // namespace mucap::simd
