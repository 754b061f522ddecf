#pragma once

#include <cstddef>

namespace omniselect::simd {

// Instruction sets the kernel layer can dispatch to. Detection happens once
// at first use; set_isa() overrides it (tests pin the backend with this).
enum class IsaLevel { scalar = 0, avx2 = 1 };

const char* isa_name(IsaLevel isa);
bool isa_supported(IsaLevel isa);
IsaLevel active_isa();
void set_isa(IsaLevel isa); // throws ValidationError if unsupported here

// Every backend implements the same reduction discipline:
//   - 8 partial accumulators; element i contributes to accumulator i mod 8
//   - dot products use fused multiply-add (single rounding per element)
//   - horizontal finish: s_j = a_j (+) a_{j+4}, t_j = s_j (+) s_{j+2},
//     result = t_0 (+) t_1
// so scalar and SIMD paths produce bitwise-identical results and the
// dispatch choice can never leak into an output file.
struct KernelTable {
    float (*dot)(const float* a, const float* b, std::size_t n);
    float (*reduce_max)(const float* x, std::size_t n); // n >= 1
    // x[i] = exp(x[i] + bias), returns the sum of the results.
    // exp is a shared degree-5 polynomial, inputs clamped to [-87, 87],
    // relative error ~1 ulp across backends (bitwise identical between them).
    float (*exp_bias_sum)(float* x, std::size_t n, float bias);
    void (*scale)(float* x, std::size_t n, float s);
    void (*accumulate)(float* acc, const float* x, std::size_t n);
};

const KernelTable& kernels();

inline float dot(const float* a, const float* b, std::size_t n) {
    return kernels().dot(a, b, n);
}
inline float reduce_max(const float* x, std::size_t n) {
    return kernels().reduce_max(x, n);
}
inline float exp_bias_sum(float* x, std::size_t n, float bias) {
    return kernels().exp_bias_sum(x, n, bias);
}
inline void scale(float* x, std::size_t n, float s) {
    kernels().scale(x, n, s);
}
inline void accumulate(float* acc, const float* x, std::size_t n) {
    kernels().accumulate(acc, x, n);
}

} // namespace omniselect::simd
