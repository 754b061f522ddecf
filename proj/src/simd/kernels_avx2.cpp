// AVX2+FMA backend. Compiled with -mavx2 -mfma; only reached when the CPU
// reports both features. Each kernel mirrors the scalar reference lane for
// lane, so the two backends agree bitwise on every input.

#include "simd/kernel_detail.hpp"

#include <immintrin.h>

namespace omniselect::simd::avx2_impl {

using namespace omniselect::simd::detail;

namespace {

inline float hsum(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    __m128 sh = _mm_movehl_ps(s, s);
    __m128 t = _mm_add_ps(s, sh);
    __m128 t1 = _mm_shuffle_ps(t, t, 0x1);
    return _mm_cvtss_f32(_mm_add_ss(t, t1));
}

inline float hmax(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_max_ps(lo, hi);
    __m128 sh = _mm_movehl_ps(s, s);
    __m128 t = _mm_max_ps(s, sh);
    __m128 t1 = _mm_shuffle_ps(t, t, 0x1);
    return _mm_cvtss_f32(_mm_max_ss(t, t1));
}

inline __m256 exp8(__m256 x) {
    x = _mm256_max_ps(x, _mm256_set1_ps(kExpLo));
    x = _mm256_min_ps(x, _mm256_set1_ps(kExpHi));
    __m256 fn = _mm256_round_ps(_mm256_mul_ps(x, _mm256_set1_ps(kLog2E)),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256 r = _mm256_fnmadd_ps(fn, _mm256_set1_ps(kLn2Hi), x);
    r = _mm256_fnmadd_ps(fn, _mm256_set1_ps(kLn2Lo), r);
    __m256 y = _mm256_set1_ps(kExpP0);
    y = _mm256_fmadd_ps(y, r, _mm256_set1_ps(kExpP1));
    y = _mm256_fmadd_ps(y, r, _mm256_set1_ps(kExpP2));
    y = _mm256_fmadd_ps(y, r, _mm256_set1_ps(kExpP3));
    y = _mm256_fmadd_ps(y, r, _mm256_set1_ps(kExpP4));
    y = _mm256_fmadd_ps(y, r, _mm256_set1_ps(kExpP5));
    __m256 r2 = _mm256_mul_ps(r, r);
    y = _mm256_fmadd_ps(y, r2, r);
    y = _mm256_add_ps(y, _mm256_set1_ps(1.0f));
    __m256i n = _mm256_cvtps_epi32(fn);
    __m256 pow2n = _mm256_castsi256_ps(
        _mm256_slli_epi32(_mm256_add_epi32(n, _mm256_set1_epi32(127)), 23));
    return _mm256_mul_ps(y, pow2n);
}

} // namespace

float dot(const float* a, const float* b, std::size_t n) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        acc = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc);
    }
    if (i == n) return hsum(acc);
    float lanes[kLanes];
    _mm256_storeu_ps(lanes, acc);
    for (std::size_t t = 0; i < n; ++i, ++t) {
        lanes[t] = std::fmaf(a[i], b[i], lanes[t]);
    }
    return reduce_sum_lanes(lanes);
}

float reduce_max(const float* x, std::size_t n) {
    __m256 acc = _mm256_set1_ps(-HUGE_VALF);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        acc = _mm256_max_ps(acc, _mm256_loadu_ps(x + i));
    }
    if (i == n) return hmax(acc);
    float lanes[kLanes];
    _mm256_storeu_ps(lanes, acc);
    for (std::size_t t = 0; i < n; ++i, ++t) {
        lanes[t] = lanes[t] > x[i] ? lanes[t] : x[i];
    }
    return reduce_max_lanes(lanes);
}

float exp_bias_sum(float* x, std::size_t n, float bias) {
    __m256 acc = _mm256_setzero_ps();
    __m256 vbias = _mm256_set1_ps(bias);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256 e = exp8(_mm256_add_ps(_mm256_loadu_ps(x + i), vbias));
        _mm256_storeu_ps(x + i, e);
        acc = _mm256_add_ps(acc, e);
    }
    if (i == n) return hsum(acc);
    float lanes[kLanes];
    _mm256_storeu_ps(lanes, acc);
    for (std::size_t t = 0; i < n; ++i, ++t) {
        float e = exp_one(x[i] + bias);
        x[i] = e;
        lanes[t] += e;
    }
    return reduce_sum_lanes(lanes);
}

void scale(float* x, std::size_t n, float s) {
    __m256 vs = _mm256_set1_ps(s);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_ps(x + i, _mm256_mul_ps(_mm256_loadu_ps(x + i), vs));
    }
    for (; i < n; ++i) x[i] *= s;
}

void accumulate(float* acc, const float* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        _mm256_storeu_ps(acc + i,
                         _mm256_add_ps(_mm256_loadu_ps(acc + i), _mm256_loadu_ps(x + i)));
    }
    for (; i < n; ++i) acc[i] += x[i];
}

} // namespace omniselect::simd::avx2_impl
