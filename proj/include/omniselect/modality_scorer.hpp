#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "omniselect/strategy.hpp"
#include "omniselect/tensor.hpp"

namespace omniselect {

enum class ScoreScale { raw_cosine, scaled_logits };

inline const char* score_scale_name(ScoreScale s) {
    return s == ScoreScale::raw_cosine ? "raw-cosine" : "scaled-logits";
}

// Per-frame video-text and audio-text similarities plus their means.
struct ModalityScores {
    std::vector<double> video;
    std::vector<double> audio;
    double mean_video = 0.0;
    double mean_audio = 0.0;
    ScoreScale scale_note = ScoreScale::raw_cosine;
};

// Piecewise threshold: theta_small applies while the modality-score gap is
// at most gap_breakpoint, theta_large beyond it.
struct ThresholdPolicy {
    double gap_breakpoint = 2.0;
    double theta_small = 0.0;
    double theta_large = 5.0;

    void validate() const {
        if (theta_small > theta_large) {
            throw ValidationError("theta_small must not exceed theta_large");
        }
        if (gap_breakpoint < 0.0) {
            throw ValidationError("gap_breakpoint must be non-negative");
        }
    }
};

// Cosine of the angle between two equal-length vectors; clamped to [-1, 1].
// Throws DegenerateInputError on a zero-norm input.
double cosine_similarity(std::span<const float> u, std::span<const float> v);

// Per-frame similarities against the query text embedding. Frames
// 0, stride, 2*stride, ... are scored and multiplied by logit_scale;
// in-between frames repeat the nearest preceding scored frame, so the
// output lists keep length F. Means run over all F entries.
ModalityScores score_modalities(const Tensor& video_emb, const Tensor& audio_emb,
                                std::span<const float> text_emb,
                                std::size_t frame_stride, double logit_scale);

// Gap-vs-threshold classification into the three pruning regimes.
Strategy classify_strategy(const ModalityScores& scores, const ThresholdPolicy& policy);

} // namespace omniselect
