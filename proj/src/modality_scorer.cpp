#include "omniselect/modality_scorer.hpp"

#include <cmath>
#include <string>

namespace omniselect {

// Scoring is a cold path (three dot products per scored frame), so it runs
// in plain double precision; the scores it hands the allocator end up
// printed in result files, where double-width arithmetic keeps the last
// quantized digit stable.
double cosine_similarity(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size()) {
        throw ValidationError("cosine: dimension mismatch (" + std::to_string(u.size()) +
                              " vs " + std::to_string(v.size()) + ")");
    }
    if (u.empty()) {
        throw ValidationError("cosine: empty vectors");
    }
    double uv = 0.0, uu = 0.0, vv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uv += static_cast<double>(u[i]) * v[i];
        uu += static_cast<double>(u[i]) * u[i];
        vv += static_cast<double>(v[i]) * v[i];
    }
    if (uu == 0.0 || vv == 0.0) {
        throw DegenerateInputError("cosine: zero-norm vector");
    }
    double c = uv / (std::sqrt(uu) * std::sqrt(vv));
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return c;
}

ModalityScores score_modalities(const Tensor& video_emb, const Tensor& audio_emb,
                                std::span<const float> text_emb,
                                std::size_t frame_stride, double logit_scale) {
    if (frame_stride == 0) throw ValidationError("frame_stride must be >= 1");
    if (logit_scale <= 0.0) throw ValidationError("logit_scale must be > 0");
    std::size_t frames = video_emb.rows();
    if (audio_emb.rows() != frames) {
        throw ValidationError("video and audio clip embeddings disagree on frame count");
    }
    if (frames == 0) throw ValidationError("no frames to score");
    if (video_emb.cols() != text_emb.size() || audio_emb.cols() != text_emb.size()) {
        throw ValidationError("clip embedding dimension does not match text embedding");
    }

    ModalityScores out;
    out.video.resize(frames);
    out.audio.resize(frames);
    for (std::size_t f = 0; f < frames; f += frame_stride) {
        out.video[f] = cosine_similarity(video_emb.row(f), text_emb) * logit_scale;
        out.audio[f] = cosine_similarity(audio_emb.row(f), text_emb) * logit_scale;
        // forward fill up to the next scored frame
        for (std::size_t g = f + 1; g < frames && g < f + frame_stride; ++g) {
            out.video[g] = out.video[f];
            out.audio[g] = out.audio[f];
        }
    }
    double sv = 0.0, sa = 0.0;
    for (std::size_t f = 0; f < frames; ++f) {
        sv += out.video[f];
        sa += out.audio[f];
    }
    out.mean_video = sv / static_cast<double>(frames);
    out.mean_audio = sa / static_cast<double>(frames);
    out.scale_note = logit_scale == 1.0 ? ScoreScale::raw_cosine : ScoreScale::scaled_logits;
    return out;
}

Strategy classify_strategy(const ModalityScores& scores, const ThresholdPolicy& policy) {
    policy.validate();
    double gap = std::abs(scores.mean_video - scores.mean_audio);
    double theta = gap <= policy.gap_breakpoint ? policy.theta_small : policy.theta_large;
    if (gap <= theta) return Strategy::Uniform;
    return scores.mean_video > scores.mean_audio ? Strategy::VideoCentric
                                                 : Strategy::AudioCentric;
}

} // namespace omniselect
