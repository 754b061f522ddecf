#include "omniselect/cost_model.hpp"

#include <string>

#include "omniselect/error.hpp"

namespace omniselect {

CostEstimate estimate_cost(std::span<const std::size_t> before,
                           std::span<const std::size_t> after) {
    if (before.size() != after.size()) {
        throw ValidationError("estimate_cost: before/after length mismatch");
    }
    CostEstimate est;
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (after[i] > before[i]) {
            throw ValidationError("estimate_cost: entry " + std::to_string(i) +
                                  " grew from " + std::to_string(before[i]) + " to " +
                                  std::to_string(after[i]));
        }
        est.tokens_before += before[i];
        est.tokens_after += after[i];
    }
    if (est.tokens_after == 0) {
        throw DegenerateInputError("estimate_cost: zero post-pruning sequence length");
    }
    auto cost = [](std::size_t len) {
        double l = static_cast<double>(len);
        return l * l;
    };
    est.prefill_cost_before = cost(est.tokens_before);
    est.prefill_cost_after = cost(est.tokens_after);
    est.estimated_speedup = est.prefill_cost_before / est.prefill_cost_after;
    return est;
}

} // namespace omniselect
