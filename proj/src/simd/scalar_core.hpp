#pragma once

// Scalar reference kernels. The AVX2 translation unit mirrors these
// operation-for-operation; every floating-point step below is a correctly
// rounded IEEE operation (add/sub/mul/div/sqrt/fma or exact integer/bit
// manipulation), so the two backends produce bit-identical output. Do not
// reorder arithmetic here without updating the AVX2 mirror.

#include <bit>
#include <cmath>
#include <cstdint>

namespace mucap::simd::detail {

// ---- Philox-4x32-10 ----
inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_block(std::uint64_t block, std::uint64_t stream,
                         std::uint32_t k0, std::uint32_t k1,
                         std::uint32_t out[4]) {
    std::uint32_t c0 = static_cast<std::uint32_t>(block);
    std::uint32_t c1 = static_cast<std::uint32_t>(block >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(stream);
    std::uint32_t c3 = static_cast<std::uint32_t>(stream >> 32);
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2;
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        const std::uint32_t n3 = lo0;
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
}

// ---- uniforms ----
// 52-bit mantissa draw; exact integer->double conversion in both backends.
inline double u52_to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 12) * 0x1.0p-52;
}
inline double u52_to_unit_open0(std::uint64_t bits) {  // (0,1]
    return (static_cast<double>(bits >> 12) + 1.0) * 0x1.0p-52;
}

// ---- log (natural), x normal positive ----
// atanh-series evaluation on m in [sqrt(2)/2, sqrt(2)).
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kLogC[10] = {
    2.0 / 3.0,  2.0 / 5.0,  2.0 / 7.0,  2.0 / 9.0,  2.0 / 11.0,
    2.0 / 13.0, 2.0 / 15.0, 2.0 / 17.0, 2.0 / 19.0, 2.0 / 21.0,
};
// bit pattern of sqrt(2): values m >= sqrt(2) are halved
inline constexpr std::uint64_t kSqrt2Bits = 0x3FF6A09E667F3BCDull;

inline double log_core(double x) {
    std::uint64_t u = std::bit_cast<std::uint64_t>(x);
    std::int64_t e = static_cast<std::int64_t>(u >> 52) - 1023;
    std::uint64_t mbits = (u & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull;
    if (mbits >= kSqrt2Bits) {
        mbits -= 0x0010000000000000ull;  // m /= 2 (exponent decrement)
        e += 1;
    }
    const double m = std::bit_cast<double>(mbits);
    const double ed = static_cast<double>(e);
    const double s = (m - 1.0) / (m + 1.0);
    const double t = s * s;
    double q = kLogC[9];
    q = std::fma(q, t, kLogC[8]);
    q = std::fma(q, t, kLogC[7]);
    q = std::fma(q, t, kLogC[6]);
    q = std::fma(q, t, kLogC[5]);
    q = std::fma(q, t, kLogC[4]);
    q = std::fma(q, t, kLogC[3]);
    q = std::fma(q, t, kLogC[2]);
    q = std::fma(q, t, kLogC[1]);
    q = std::fma(q, t, kLogC[0]);
    const double lnm = std::fma(s * t, q, s + s);
    return std::fma(ed, kLn2Hi, std::fma(ed, kLn2Lo, lnm));
}

// ---- sin/cos with Cody-Waite reduction, |x| <= 1e6 ----
inline constexpr double kInvPio2 = 6.36619772367581382433e-01;
inline constexpr double kPio2_1 = 1.57079632673412561417e+00;
inline constexpr double kPio2_2 = 6.07710050630396597660e-11;
inline constexpr double kPio2_3 = 2.02226624879595063154e-21;
inline constexpr double kShift52 = 6755399441055744.0;  // 2^52 + 2^51

inline constexpr double kSinC[6] = {
    -1.66666666666666324348e-01, 8.33333333332248946124e-03,
    -1.98412698298579493134e-04, 2.75573137070700676789e-06,
    -2.50507602534068634195e-08, 1.58969099521155010221e-10,
};
inline constexpr double kCosC[6] = {
    4.16666666666666019037e-02, -1.38888888888741095749e-03,
    2.48015872894767294178e-05, -2.75573143513906633035e-07,
    2.08757232129817482790e-09, -1.13596475577881948265e-11,
};

inline void sincos_core(double x, double* s_out, double* c_out) {
    const double kd = std::nearbyint(x * kInvPio2);
    // quadrant from the low bits of kd via the shift trick (exact int ops)
    const std::uint64_t q =
        std::bit_cast<std::uint64_t>(kd + kShift52) & 3ull;
    double r = std::fma(kd, -kPio2_1, x);
    r = std::fma(kd, -kPio2_2, r);
    r = std::fma(kd, -kPio2_3, r);
    const double y = r * r;
    double sp = kSinC[5];
    sp = std::fma(sp, y, kSinC[4]);
    sp = std::fma(sp, y, kSinC[3]);
    sp = std::fma(sp, y, kSinC[2]);
    sp = std::fma(sp, y, kSinC[1]);
    sp = std::fma(sp, y, kSinC[0]);
    const double sr = std::fma(r * y, sp, r);
    double cp = kCosC[5];
    cp = std::fma(cp, y, kCosC[4]);
    cp = std::fma(cp, y, kCosC[3]);
    cp = std::fma(cp, y, kCosC[2]);
    cp = std::fma(cp, y, kCosC[1]);
    cp = std::fma(cp, y, kCosC[0]);
    const double cr = std::fma(y * y, cp, std::fma(y, -0.5, 1.0));
    // quadrant selection: swap for odd q, negate via sign-bit xor
    const bool swap = (q & 1ull) != 0;
    const double sv = swap ? cr : sr;
    const double cv = swap ? sr : cr;
    const std::uint64_t ssign = (q & 2ull) << 62;                   // q in {2,3}
    const std::uint64_t csign = (((q + 1ull) & 2ull)) << 62;        // q in {1,2}
    *s_out = std::bit_cast<double>(std::bit_cast<std::uint64_t>(sv) ^ ssign);
    *c_out = std::bit_cast<double>(std::bit_cast<std::uint64_t>(cv) ^ csign);
}

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Box-Muller pair from one Philox block (little-endian u64 views of words
// 0..1 and 2..3).
inline void box_muller_pair(std::uint64_t bits_a, std::uint64_t bits_b,
                            double* z0, double* z1) {
    const double u1 = u52_to_unit_open0(bits_a);
    const double u2 = u52_to_unit(bits_b);
    const double r = std::sqrt(-2.0 * log_core(u1));
    double s, c;
    sincos_core(kTwoPi * u2, &s, &c);
    *z0 = r * c;
    *z1 = r * s;
}

} // namespace mucap::simd::detail
