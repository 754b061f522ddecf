#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "omniselect/modality_scorer.hpp"
#include "omniselect/ratio_allocator.hpp"
#include "omniselect/tensor_io.hpp"
#include "omniselect/tgp2_pruner.hpp"

namespace omniselect {

struct PipelineConfig {
    double eta_video = 0.0;
    double eta_audio = 0.0;
    ThresholdPolicy policy;
    double tau = 1.0;
    double epsilon = 1e-6;
    std::size_t max_iters = 32;
    double budget_tol = 0.5;
    std::size_t frame_stride = 1;
    double logit_scale = 1.0;
    std::size_t pool_factor = 2;
    std::size_t threads = 1; // groups are independent; assembly stays ordered

    BudgetConfig video_budget() const {
        return {eta_video, tau, epsilon, max_iters, budget_tol};
    }
    BudgetConfig audio_budget() const {
        return {eta_audio, tau, epsilon, max_iters, budget_tol};
    }
    void validate() const;
};

// Precomputed model outputs the engine runs on. Clip-space embeddings are
// per sampled frame; video_emb is per token in the backbone space. Exactly
// one of audio_qk / audio_attention must be set when audio tokens exist;
// both describe the full audio sequence.
struct InputBundle {
    Tensor video_clip;            // F x D_clip
    Tensor audio_clip;            // F x D_clip
    std::vector<float> text_clip; // D_clip
    Tensor video_emb;             // N_v x D
    std::optional<AudioQk> audio_qk;       // global projections, N_a x d_k
    std::optional<Tensor> audio_attention; // [N_a, N_a] or [H, N_a, N_a]
};

// score -> classify -> allocate -> prune per group -> assemble. Attention
// over the audio sequence is computed (or head-averaged) once and sliced
// per group. Deterministic for fixed inputs, independent of `threads`.
PruneResult run_pipeline(const InputBundle& bundle, const GroupSpec& spec,
                         const PipelineConfig& cfg);

} // namespace omniselect
