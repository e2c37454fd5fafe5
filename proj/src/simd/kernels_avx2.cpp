// AVX2 variants of the RNG / transcendental fill kernels. Each function is an
// op-for-op mirror of the scalar reference in scalar_core.hpp: the same
// correctly rounded operations in the same order, four or eight lanes at a
// time, so outputs are bit-identical to the scalar backend (enforced by the
// equivalence tests). Tails fall back to the scalar core.

#include <immintrin.h>

#include "kernels_internal.hpp"
#include "scalar_core.hpp"

namespace mucap::simd::detail {

namespace {

// ---- Philox, 8 blocks per iteration ----

struct Philox8 {
    __m256i c0, c1, c2, c3;
};

inline void mul_wide(__m256i a, __m256i m, __m256i* lo, __m256i* hi) {
    const __m256i pe = _mm256_mul_epu32(a, m);
    const __m256i po = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), m);
    *lo = _mm256_blend_epi32(pe, _mm256_slli_epi64(po, 32), 0xAA);
    *hi = _mm256_blend_epi32(_mm256_srli_epi64(pe, 32), po, 0xAA);
}

inline Philox8 philox8(std::uint64_t block0, std::uint64_t stream,
                       std::uint32_t key0, std::uint32_t key1) {
    alignas(32) std::uint32_t lo[8], hi[8];
    for (int i = 0; i < 8; ++i) {
        const std::uint64_t b = block0 + static_cast<std::uint64_t>(i);
        lo[i] = static_cast<std::uint32_t>(b);
        hi[i] = static_cast<std::uint32_t>(b >> 32);
    }
    __m256i c0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo));
    __m256i c1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi));
    __m256i c2 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(stream)));
    __m256i c3 = _mm256_set1_epi32(static_cast<int>(static_cast<std::uint32_t>(stream >> 32)));
    __m256i k0 = _mm256_set1_epi32(static_cast<int>(key0));
    __m256i k1 = _mm256_set1_epi32(static_cast<int>(key1));
    const __m256i m0 = _mm256_set1_epi32(static_cast<int>(kPhiloxM0));
    const __m256i m1 = _mm256_set1_epi32(static_cast<int>(kPhiloxM1));
    const __m256i w0 = _mm256_set1_epi32(static_cast<int>(kPhiloxW0));
    const __m256i w1 = _mm256_set1_epi32(static_cast<int>(kPhiloxW1));
    for (int round = 0; round < 10; ++round) {
        __m256i lo0, hi0, lo1, hi1;
        mul_wide(c0, m0, &lo0, &hi0);
        mul_wide(c2, m1, &lo1, &hi1);
        const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0);
        const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1);
        c0 = n0;
        c1 = lo1;
        c2 = n2;
        c3 = lo0;
        k0 = _mm256_add_epi32(k0, w0);
        k1 = _mm256_add_epi32(k1, w1);
    }
    return {c0, c1, c2, c3};
}

// SoA -> AoS: out[4*i + w] = word w of lane-i block.
inline void store_blocks(const Philox8& p, std::uint32_t* out) {
    const __m256i t0 = _mm256_unpacklo_epi32(p.c0, p.c1);
    const __m256i t1 = _mm256_unpackhi_epi32(p.c0, p.c1);
    const __m256i t2 = _mm256_unpacklo_epi32(p.c2, p.c3);
    const __m256i t3 = _mm256_unpackhi_epi32(p.c2, p.c3);
    const __m256i u0 = _mm256_unpacklo_epi64(t0, t2);  // blk0 | blk4
    const __m256i u1 = _mm256_unpackhi_epi64(t0, t2);  // blk1 | blk5
    const __m256i u2 = _mm256_unpacklo_epi64(t1, t3);  // blk2 | blk6
    const __m256i u3 = _mm256_unpackhi_epi64(t1, t3);  // blk3 | blk7
    __m256i* o = reinterpret_cast<__m256i*>(out);
    _mm256_storeu_si256(o + 0, _mm256_permute2x128_si256(u0, u1, 0x20));
    _mm256_storeu_si256(o + 1, _mm256_permute2x128_si256(u2, u3, 0x20));
    _mm256_storeu_si256(o + 2, _mm256_permute2x128_si256(u0, u1, 0x31));
    _mm256_storeu_si256(o + 3, _mm256_permute2x128_si256(u2, u3, 0x31));
}

// ---- float helpers ----

// exact conversion of 64-bit values < 2^52
inline __m256d to_f64_u52(__m256i v) {
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000ll);
    return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, magic)),
                         _mm256_set1_pd(0x1.0p52));
}

// exact conversion of int64 values in [-2^51, 2^51)
inline __m256d to_f64_i52(__m256i v) {
    const __m256i magic = _mm256_set1_epi64x(0x4338000000000000ll);  // 2^52 + 2^51
    return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_add_epi64(v, magic)),
                         _mm256_set1_pd(0x1.8p52));
}

inline __m256d unit52(__m256i bits) {
    return _mm256_mul_pd(to_f64_u52(_mm256_srli_epi64(bits, 12)),
                         _mm256_set1_pd(0x1.0p-52));
}

inline __m256d unit52_open0(__m256i bits) {
    const __m256d d = _mm256_add_pd(to_f64_u52(_mm256_srli_epi64(bits, 12)),
                                    _mm256_set1_pd(1.0));
    return _mm256_mul_pd(d, _mm256_set1_pd(0x1.0p-52));
}

inline __m256d log4(__m256d x) {
    const __m256i u = _mm256_castpd_si256(x);
    __m256i e = _mm256_sub_epi64(_mm256_srli_epi64(u, 52),
                                 _mm256_set1_epi64x(1023));
    __m256i mbits = _mm256_or_si256(
        _mm256_and_si256(u, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
        _mm256_set1_epi64x(0x3FF0000000000000ll));
    const __m256i big = _mm256_cmpgt_epi64(
        mbits, _mm256_set1_epi64x(static_cast<long long>(kSqrt2Bits) - 1));
    mbits = _mm256_sub_epi64(
        mbits, _mm256_and_si256(big, _mm256_set1_epi64x(0x0010000000000000ll)));
    e = _mm256_sub_epi64(e, big);  // mask is -1 where m >= sqrt2
    const __m256d m = _mm256_castsi256_pd(mbits);
    const __m256d ed = to_f64_i52(e);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d t = _mm256_mul_pd(s, s);
    __m256d q = _mm256_set1_pd(kLogC[9]);
    for (int i = 8; i >= 0; --i) {
        q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(kLogC[i]));
    }
    const __m256d lnm =
        _mm256_fmadd_pd(_mm256_mul_pd(s, t), q, _mm256_add_pd(s, s));
    return _mm256_fmadd_pd(ed, _mm256_set1_pd(kLn2Hi),
                           _mm256_fmadd_pd(ed, _mm256_set1_pd(kLn2Lo), lnm));
}

inline void sincos4(__m256d x, __m256d* s_out, __m256d* c_out) {
    const __m256d kd = _mm256_round_pd(
        _mm256_mul_pd(x, _mm256_set1_pd(kInvPio2)),
        _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const __m256i q = _mm256_and_si256(
        _mm256_castpd_si256(_mm256_add_pd(kd, _mm256_set1_pd(kShift52))),
        _mm256_set1_epi64x(3));
    __m256d r = _mm256_fmadd_pd(kd, _mm256_set1_pd(-kPio2_1), x);
    r = _mm256_fmadd_pd(kd, _mm256_set1_pd(-kPio2_2), r);
    r = _mm256_fmadd_pd(kd, _mm256_set1_pd(-kPio2_3), r);
    const __m256d y = _mm256_mul_pd(r, r);
    __m256d sp = _mm256_set1_pd(kSinC[5]);
    for (int i = 4; i >= 0; --i) {
        sp = _mm256_fmadd_pd(sp, y, _mm256_set1_pd(kSinC[i]));
    }
    const __m256d sr = _mm256_fmadd_pd(_mm256_mul_pd(r, y), sp, r);
    __m256d cp = _mm256_set1_pd(kCosC[5]);
    for (int i = 4; i >= 0; --i) {
        cp = _mm256_fmadd_pd(cp, y, _mm256_set1_pd(kCosC[i]));
    }
    const __m256d cr = _mm256_fmadd_pd(
        _mm256_mul_pd(y, y), cp,
        _mm256_fmadd_pd(y, _mm256_set1_pd(-0.5), _mm256_set1_pd(1.0)));
    const __m256i swap =
        _mm256_cmpeq_epi64(_mm256_and_si256(q, _mm256_set1_epi64x(1)),
                           _mm256_set1_epi64x(1));
    const __m256d sv = _mm256_blendv_pd(sr, cr, _mm256_castsi256_pd(swap));
    const __m256d cv = _mm256_blendv_pd(cr, sr, _mm256_castsi256_pd(swap));
    const __m256i two = _mm256_set1_epi64x(2);
    const __m256i ssign = _mm256_slli_epi64(_mm256_and_si256(q, two), 62);
    const __m256i csign = _mm256_slli_epi64(
        _mm256_and_si256(_mm256_add_epi64(q, _mm256_set1_epi64x(1)), two), 62);
    *s_out = _mm256_castsi256_pd(
        _mm256_xor_si256(_mm256_castpd_si256(sv), ssign));
    *c_out = _mm256_castsi256_pd(
        _mm256_xor_si256(_mm256_castpd_si256(cv), csign));
}

// deinterleave [a0,b0,a1,b1],[a2,b2,a3,b3] -> [a0..a3],[b0..b3]
inline void split_pairs(__m256i r0, __m256i r1, __m256i* a, __m256i* b) {
    *a = _mm256_permute4x64_epi64(_mm256_unpacklo_epi64(r0, r1), 0xD8);
    *b = _mm256_permute4x64_epi64(_mm256_unpackhi_epi64(r0, r1), 0xD8);
}

} // namespace

void philox_fill_avx2(const StreamKey& key, std::uint64_t block0,
                      std::size_t nblocks, std::uint32_t* out) {
    const std::uint32_t k0 = static_cast<std::uint32_t>(key.seed);
    const std::uint32_t k1 = static_cast<std::uint32_t>(key.seed >> 32);
    std::size_t i = 0;
    for (; i + 8 <= nblocks; i += 8) {
        store_blocks(philox8(block0 + i, key.stream, k0, k1), out + 4 * i);
    }
    for (; i < nblocks; ++i) {
        philox_block(block0 + i, key.stream, k0, k1, out + 4 * i);
    }
}

void uniform_fill_avx2(const StreamKey& key, std::uint64_t block0,
                       std::size_t count, double* out) {
    const std::uint32_t k0 = static_cast<std::uint32_t>(key.seed);
    const std::uint32_t k1 = static_cast<std::uint32_t>(key.seed >> 32);
    alignas(32) std::uint32_t buf[32];
    std::size_t i = 0;
    std::uint64_t blk = block0;
    while (count - i >= 16) {
        store_blocks(philox8(blk, key.stream, k0, k1), buf);
        blk += 8;
        const __m256i* b = reinterpret_cast<const __m256i*>(buf);
        for (int j = 0; j < 4; ++j) {
            _mm256_storeu_pd(out + i + 4 * j, unit52(_mm256_load_si256(b + j)));
        }
        i += 16;
    }
    if (i < count) {
        uniform_fill_scalar(key, blk, count - i, out + i);
    }
}

void normal_fill_avx2(const StreamKey& key, std::uint64_t block0,
                      std::size_t count, double* out) {
    const std::uint32_t k0 = static_cast<std::uint32_t>(key.seed);
    const std::uint32_t k1 = static_cast<std::uint32_t>(key.seed >> 32);
    alignas(32) std::uint32_t buf[32];
    const __m256d neg_two = _mm256_set1_pd(-2.0);
    const __m256d two_pi = _mm256_set1_pd(kTwoPi);
    std::size_t i = 0;
    std::uint64_t blk = block0;
    while (count - i >= 16) {
        store_blocks(philox8(blk, key.stream, k0, k1), buf);
        blk += 8;
        const __m256i* b = reinterpret_cast<const __m256i*>(buf);
        for (int half = 0; half < 2; ++half) {
            __m256i ua, ub;
            split_pairs(_mm256_load_si256(b + 2 * half),
                        _mm256_load_si256(b + 2 * half + 1), &ua, &ub);
            const __m256d u1 = unit52_open0(ua);
            const __m256d u2 = unit52(ub);
            const __m256d r = _mm256_sqrt_pd(_mm256_mul_pd(neg_two, log4(u1)));
            __m256d s, c;
            sincos4(_mm256_mul_pd(two_pi, u2), &s, &c);
            const __m256d z0 = _mm256_mul_pd(r, c);
            const __m256d z1 = _mm256_mul_pd(r, s);
            const __m256d lo = _mm256_unpacklo_pd(z0, z1);
            const __m256d hi = _mm256_unpackhi_pd(z0, z1);
            double* o = out + i + 8 * half;
            _mm256_storeu_pd(o, _mm256_permute2f128_pd(lo, hi, 0x20));
            _mm256_storeu_pd(o + 4, _mm256_permute2f128_pd(lo, hi, 0x31));
        }
        i += 16;
    }
    if (i < count) {
        normal_fill_scalar(key, blk, count - i, out + i);
    }
}

void sincos_fill_avx2(const double* angles, std::size_t count, double* sin_out,
                      double* cos_out) {
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        __m256d s, c;
        sincos4(_mm256_loadu_pd(angles + i), &s, &c);
        _mm256_storeu_pd(sin_out + i, s);
        _mm256_storeu_pd(cos_out + i, c);
    }
    for (; i < count; ++i) {
        sincos_core(angles[i], sin_out + i, cos_out + i);
    }
}

} // namespace mucap::simd::detail
