#pragma once

#include <cstddef>
#include <span>

namespace omniselect {

// Prefill cost proxy: cost(L) = L^2, the self-attention term of a prompt
// forward pass. Wall-clock effects (kernel launch, bandwidth) are out of
// scope, so the speedup is a modeled upper bound, labeled as such wherever
// it is printed.
struct CostEstimate {
    std::size_t tokens_before = 0;
    std::size_t tokens_after = 0;
    double prefill_cost_before = 0.0;
    double prefill_cost_after = 0.0;
    double estimated_speedup = 1.0;
};

CostEstimate estimate_cost(std::span<const std::size_t> before,
                           std::span<const std::size_t> after);

} // namespace omniselect
