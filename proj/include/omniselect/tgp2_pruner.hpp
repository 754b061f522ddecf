#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "omniselect/ratio_allocator.hpp"
#include "omniselect/temporal_groups.hpp"
#include "omniselect/tensor.hpp"

namespace omniselect {

// Raw query/key projections for one group's audio tokens.
struct AudioQk {
    Tensor q; // n x d_k
    Tensor k; // n x d_k
};

// Either raw projections or a precomputed attention tensor of shape
// [n, n] or [heads, n, n] with row-stochastic rows.
using AudioAttentionInput = std::variant<AudioQk, Tensor>;

struct RetainedIndices {
    std::size_t group_id = 0;
    Modality modality = Modality::video;
    std::vector<std::size_t> indices; // strictly increasing, group-local
};

// Row-stochastic softmax of q k^T / sqrt(d_k), max-subtracted per row.
Tensor compute_attention(const Tensor& q, const Tensor& k);

// Mean over rows for every column of a matrix block. This is the per-key
// received-attention reduction; it places no stochasticity requirement on
// the block, so it also serves slices of a larger attention matrix.
std::vector<float> attention_column_means(MatrixView block);

// Head-mean (if present) then query-mean of an attention tensor, yielding
// per-key scores that sum to 1 for row-stochastic input. Rows are checked
// to sum to 1 within 1e-4.
std::vector<float> average_attention(const Tensor& attention);

// Average consecutive `factor`-sized windows; a short trailing window is
// averaged over its own length. Output length is ceil(n / factor).
std::vector<float> pool_attention(std::span<const float> scores, std::size_t factor = 2);

// Keep the max(1, floor((1 - rho) * m)) highest-scored pooled positions;
// ties go to the lower index. Indices come back sorted ascending.
RetainedIndices select_audio(std::span<const float> pooled_scores, double rho);

// Mean cosine similarity of each token against the whole group (diagonal
// included). Zero-norm rows raise DegenerateInputError.
std::vector<float> video_redundancy_scores(MatrixView embeddings);

// Keep the max(1, floor((1 - rho) * n)) lowest-redundancy tokens; ties go
// to the lower index. Indices come back sorted ascending.
RetainedIndices select_video(std::span<const float> redundancy, double rho);

// Full within-group pruning: redundancy/Bottom-K for video and
// attention/Top-K (at pooled granularity) for audio, using the group's
// ratios from `plan`. Empty modalities yield empty retained sets.
std::pair<RetainedIndices, RetainedIndices> prune_group(const TemporalGroup& group,
                                                        MatrixView video_embeddings,
                                                        const AudioAttentionInput& audio,
                                                        const AllocationPlan& plan,
                                                        std::size_t pool_factor = 2);

} // namespace omniselect
