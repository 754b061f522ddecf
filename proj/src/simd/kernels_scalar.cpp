// Scalar reference backend. Accumulation follows the shared 8-lane
// discipline (see kernels.hpp) so results match the SIMD backends bitwise.

#include "simd/kernel_detail.hpp"

namespace omniselect::simd::scalar_impl {

using namespace omniselect::simd::detail;

float dot(const float* a, const float* b, std::size_t n) {
    float lanes[kLanes] = {};
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t l = i & (kLanes - 1);
        lanes[l] = std::fmaf(a[i], b[i], lanes[l]);
    }
    return reduce_sum_lanes(lanes);
}

float reduce_max(const float* x, std::size_t n) {
    float lanes[kLanes];
    for (std::size_t l = 0; l < kLanes; ++l) lanes[l] = -HUGE_VALF;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t l = i & (kLanes - 1);
        lanes[l] = lanes[l] > x[i] ? lanes[l] : x[i];
    }
    return reduce_max_lanes(lanes);
}

float exp_bias_sum(float* x, std::size_t n, float bias) {
    float lanes[kLanes] = {};
    for (std::size_t i = 0; i < n; ++i) {
        float e = exp_one(x[i] + bias);
        x[i] = e;
        lanes[i & (kLanes - 1)] += e;
    }
    return reduce_sum_lanes(lanes);
}

void scale(float* x, std::size_t n, float s) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

void accumulate(float* acc, const float* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

} // namespace omniselect::simd::scalar_impl
