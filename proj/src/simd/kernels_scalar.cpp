#include "kernels_internal.hpp"
#include "scalar_core.hpp"

namespace mucap::simd::detail {

void philox_fill_scalar(const StreamKey& key, std::uint64_t block0,
                        std::size_t nblocks, std::uint32_t* out) {
    const std::uint32_t k0 = static_cast<std::uint32_t>(key.seed);
    const std::uint32_t k1 = static_cast<std::uint32_t>(key.seed >> 32);
    for (std::size_t i = 0; i < nblocks; ++i) {
        philox_block(block0 + i, key.stream, k0, k1, out + 4 * i);
    }
}

void uniform_fill_scalar(const StreamKey& key, std::uint64_t block0,
                         std::size_t count, double* out) {
    const std::uint32_t k0 = static_cast<std::uint32_t>(key.seed);
    const std::uint32_t k1 = static_cast<std::uint32_t>(key.seed >> 32);
    std::uint32_t w[4];
    std::size_t i = 0;
    std::uint64_t blk = block0;
    while (i < count) {
        philox_block(blk++, key.stream, k0, k1, w);
        const std::uint64_t a = (static_cast<std::uint64_t>(w[1]) << 32) | w[0];
        out[i++] = u52_to_unit(a);
        if (i < count) {
            const std::uint64_t b = (static_cast<std::uint64_t>(w[3]) << 32) | w[2];
            out[i++] = u52_to_unit(b);
        }
    }
}

void normal_fill_scalar(const StreamKey& key, std::uint64_t block0,
                        std::size_t count, double* out) {
    const std::uint32_t k0 = static_cast<std::uint32_t>(key.seed);
    const std::uint32_t k1 = static_cast<std::uint32_t>(key.seed >> 32);
    std::uint32_t w[4];
    std::size_t i = 0;
    std::uint64_t blk = block0;
    while (i < count) {
        philox_block(blk++, key.stream, k0, k1, w);
        const std::uint64_t a = (static_cast<std::uint64_t>(w[1]) << 32) | w[0];
        const std::uint64_t b = (static_cast<std::uint64_t>(w[3]) << 32) | w[2];
        double z0, z1;
        box_muller_pair(a, b, &z0, &z1);
        out[i++] = z0;
        if (i < count) out[i++] = z1;
    }
}

void sincos_fill_scalar(const double* angles, std::size_t count, double* sin_out,
                        double* cos_out) {
    for (std::size_t i = 0; i < count; ++i) {
        sincos_core(angles[i], sin_out + i, cos_out + i);
    }
}

} // namespace mucap::simd::detail
