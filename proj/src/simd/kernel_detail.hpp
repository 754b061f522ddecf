#pragma once

// Shared pieces of the kernel backends. Both the scalar reference and the
// SIMD variants include this so the lane discipline and the exp polynomial
// are defined in exactly one place.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>

#include "omniselect/simd/kernels.hpp"

namespace omniselect::simd::detail {

inline constexpr std::size_t kLanes = 8;

// exp valid range; outside it the input is clamped. Keeps 2^n construction
// inside normal float exponents (n in [-126, 126]).
inline constexpr float kExpLo = -87.0f;
inline constexpr float kExpHi = 87.0f;
inline constexpr float kLog2E = 1.44269504088896341f;
inline constexpr float kLn2Hi = 0.693359375f;
inline constexpr float kLn2Lo = -2.12194440e-4f;
inline constexpr float kExpP0 = 1.9875691500e-4f;
inline constexpr float kExpP1 = 1.3981999507e-3f;
inline constexpr float kExpP2 = 8.3334519073e-3f;
inline constexpr float kExpP3 = 4.1665795894e-2f;
inline constexpr float kExpP4 = 1.6666665459e-1f;
inline constexpr float kExpP5 = 5.0000001201e-1f;

// Scalar exp matching the vector variant operation for operation. The SIMD
// backends use it for tail elements; the scalar backend for everything.
inline float exp_one(float x) {
    x = x < kExpLo ? kExpLo : x;
    x = x > kExpHi ? kExpHi : x;
    float fn = std::nearbyintf(x * kLog2E);
    float r = std::fmaf(-fn, kLn2Hi, x);
    r = std::fmaf(-fn, kLn2Lo, r);
    float y = kExpP0;
    y = std::fmaf(y, r, kExpP1);
    y = std::fmaf(y, r, kExpP2);
    y = std::fmaf(y, r, kExpP3);
    y = std::fmaf(y, r, kExpP4);
    y = std::fmaf(y, r, kExpP5);
    float r2 = r * r;
    y = std::fmaf(y, r2, r);
    y += 1.0f;
    int n = static_cast<int>(fn);
    float pow2n = std::bit_cast<float>(static_cast<std::uint32_t>(n + 127) << 23);
    return y * pow2n;
}

// Horizontal finish shared by all backends (mirrors the AVX2
// extract/movehl/shuffle sequence).
inline float reduce_sum_lanes(const float lanes[kLanes]) {
    float s0 = lanes[0] + lanes[4];
    float s1 = lanes[1] + lanes[5];
    float s2 = lanes[2] + lanes[6];
    float s3 = lanes[3] + lanes[7];
    float t0 = s0 + s2;
    float t1 = s1 + s3;
    return t0 + t1;
}

inline float reduce_max_lanes(const float lanes[kLanes]) {
    auto mx = [](float a, float b) { return a > b ? a : b; };
    float s0 = mx(lanes[0], lanes[4]);
    float s1 = mx(lanes[1], lanes[5]);
    float s2 = mx(lanes[2], lanes[6]);
    float s3 = mx(lanes[3], lanes[7]);
    float t0 = mx(s0, s2);
    float t1 = mx(s1, s3);
    return mx(t0, t1);
}

} // namespace omniselect::simd::detail

namespace omniselect::simd::scalar_impl {
float dot(const float* a, const float* b, std::size_t n);
float reduce_max(const float* x, std::size_t n);
float exp_bias_sum(float* x, std::size_t n, float bias);
void scale(float* x, std::size_t n, float s);
void accumulate(float* acc, const float* x, std::size_t n);
} // namespace omniselect::simd::scalar_impl

#if defined(OMNISELECT_HAVE_AVX2)
namespace omniselect::simd::avx2_impl {
float dot(const float* a, const float* b, std::size_t n);
float reduce_max(const float* x, std::size_t n);
float exp_bias_sum(float* x, std::size_t n, float bias);
void scale(float* x, std::size_t n, float s);
void accumulate(float* acc, const float* x, std::size_t n);
} // namespace omniselect::simd::avx2_impl
#endif
