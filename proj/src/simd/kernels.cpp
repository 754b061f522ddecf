// Runtime backend selection. The best supported ISA is picked once at first
// use; tests pin a specific backend through set_isa().

#include "omniselect/simd/kernels.hpp"

#include <atomic>

#include "omniselect/error.hpp"
#include "simd/kernel_detail.hpp"

namespace omniselect::simd {

namespace {

constexpr KernelTable kScalarTable = {
    scalar_impl::dot,
    scalar_impl::reduce_max,
    scalar_impl::exp_bias_sum,
    scalar_impl::scale,
    scalar_impl::accumulate,
};

#if defined(OMNISELECT_HAVE_AVX2)
constexpr KernelTable kAvx2Table = {
    avx2_impl::dot,
    avx2_impl::reduce_max,
    avx2_impl::exp_bias_sum,
    avx2_impl::scale,
    avx2_impl::accumulate,
};
#endif

bool cpu_has_avx2() {
#if defined(OMNISELECT_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

struct Active {
    const KernelTable* table;
    IsaLevel isa;
};

Active detect() {
#if defined(OMNISELECT_HAVE_AVX2)
    if (cpu_has_avx2()) return {&kAvx2Table, IsaLevel::avx2};
#endif
    return {&kScalarTable, IsaLevel::scalar};
}

std::atomic<const KernelTable*>& table_slot() {
    static std::atomic<const KernelTable*> slot{detect().table};
    return slot;
}

std::atomic<IsaLevel>& isa_slot() {
    static std::atomic<IsaLevel> slot{detect().isa};
    return slot;
}

} // namespace

const char* isa_name(IsaLevel isa) {
    switch (isa) {
        case IsaLevel::scalar: return "scalar";
        case IsaLevel::avx2: return "avx2";
    }
    return "unknown";
}

bool isa_supported(IsaLevel isa) {
    switch (isa) {
        case IsaLevel::scalar: return true;
        case IsaLevel::avx2: return cpu_has_avx2();
    }
    return false;
}

IsaLevel active_isa() {
    return isa_slot().load(std::memory_order_relaxed);
}

void set_isa(IsaLevel isa) {
    if (!isa_supported(isa)) {
        throw ValidationError(std::string("isa not supported on this host: ") +
                              isa_name(isa));
    }
    switch (isa) {
        case IsaLevel::scalar:
            table_slot().store(&kScalarTable, std::memory_order_relaxed);
            break;
        case IsaLevel::avx2:
#if defined(OMNISELECT_HAVE_AVX2)
            table_slot().store(&kAvx2Table, std::memory_order_relaxed);
#endif
            break;
    }
    isa_slot().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernels() {
    return *table_slot().load(std::memory_order_relaxed);
}

} // namespace omniselect::simd
