#pragma once

#include "mucap/simd/kernels.hpp"

namespace mucap::simd::detail {

void philox_fill_scalar(const StreamKey&, std::uint64_t, std::size_t, std::uint32_t*);
void uniform_fill_scalar(const StreamKey&, std::uint64_t, std::size_t, double*);
void normal_fill_scalar(const StreamKey&, std::uint64_t, std::size_t, double*);
void sincos_fill_scalar(const double*, std::size_t, double*, double*);

void philox_fill_avx2(const StreamKey&, std::uint64_t, std::size_t, std::uint32_t*);
void uniform_fill_avx2(const StreamKey&, std::uint64_t, std::size_t, double*);
void normal_fill_avx2(const StreamKey&, std::uint64_t, std::size_t, double*);
void sincos_fill_avx2(const double*, std::size_t, double*, double*);

} // namespace mucap::simd::detail
