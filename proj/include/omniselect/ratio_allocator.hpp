#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "omniselect/strategy.hpp"

namespace omniselect {

struct BudgetConfig {
    double eta = 0.0;        // target global pruning ratio in [0, 1]
    double tau = 1.0;        // sigmoid temperature, > 0
    double epsilon = 1e-6;   // std-dev floor below which scores count as flat
    std::size_t max_iters = 32;
    double budget_tol = 0.5; // acceptable residual, in tokens

    void validate() const;
};

// Outcome of the clip-and-redistribute refinement. `residual` is the unmet
// budget in tokens after the final iteration; `achieved` records the total
// allocated tokens after the initial scaling and after each iteration.
struct RescaleResult {
    std::vector<double> rho;
    double residual = 0.0;
    std::size_t iterations = 0;
    std::vector<double> achieved;
};

// Per-group pruning ratios and retained counts for both modalities.
struct AllocationPlan {
    Strategy strategy = Strategy::Uniform;
    std::vector<double> rho_video;
    std::vector<double> rho_audio;
    std::vector<std::size_t> k_video;
    std::vector<std::size_t> k_audio;
    double residual_video = 0.0;
    double residual_audio = 0.0;
};

// Sigmoid mapping of standardized scores to base pruning probabilities.
// Flat score lists (sigma <= epsilon) fall back to p_i = eta for all i.
std::vector<double> base_probabilities(std::span<const double> scores,
                                       const BudgetConfig& cfg);

// Scale probabilities so the expected pruned-token total meets
// eta * sum(n), clip to [0, 1], then redistribute any clipped-away deficit
// uniformly over the still-unsaturated groups until the budget is met
// (within budget_tol), the active set empties, or max_iters is reached.
RescaleResult rescale_to_budget(std::span<const double> p,
                                std::span<const std::size_t> n,
                                const BudgetConfig& cfg);

// Retained-count rule shared by the allocator and the within-group
// selectors: max(1, floor((1 - rho) * n)) for n >= 1, else 0. The tiny
// nudge keeps exact-integer products from rounding down (0.3 * 10 would
// otherwise floor to 2).
inline std::size_t retained_count(double rho, std::size_t n) {
    if (n == 0) return 0;
    double k = std::floor((1.0 - rho) * static_cast<double>(n) + 1e-9);
    if (k < 1.0) return 1;
    return static_cast<std::size_t>(k);
}

// Full per-modality allocation for the chosen strategy. The dominant
// modality of a centric strategy gets score-driven, budget-rescaled ratios;
// everything else is pruned uniformly at its config's eta.
AllocationPlan allocate(std::span<const double> scores_video,
                        std::span<const double> scores_audio,
                        std::span<const std::size_t> tokens_video,
                        std::span<const std::size_t> tokens_audio,
                        Strategy strategy, const BudgetConfig& cfg_video,
                        const BudgetConfig& cfg_audio);

} // namespace omniselect
