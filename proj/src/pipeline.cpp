#include "omniselect/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <utility>

#include "omniselect/simd/kernels.hpp"
#include "omniselect/temporal_groups.hpp"

namespace omniselect {

namespace {

// Re-throw a stage's error with the stage name prefixed, keeping its type
// so exit-code mapping stays accurate.
template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    auto tag = [&](const auto& e) { return std::string(name) + ": " + e.what(); };
    try {
        return fn();
    } catch (const FormatError& e) {
        throw FormatError(e.kind(), tag(e));
    } catch (const DegenerateInputError& e) {
        throw DegenerateInputError(tag(e));
    } catch (const ValidationError& e) {
        throw ValidationError(tag(e));
    } catch (const IoError& e) {
        throw IoError(tag(e));
    }
}

void check_attention_rows(const Tensor& attention, std::size_t heads, std::size_t n) {
    for (std::size_t h = 0; h < heads; ++h) {
        const float* block = attention.data() + h * n * n;
        for (std::size_t r = 0; r < n; ++r) {
            double sum = 0.0;
            for (std::size_t c = 0; c < n; ++c) sum += block[r * n + c];
            if (std::abs(sum - 1.0) > 1e-4) {
                throw ValidationError("attention row " + std::to_string(r) + " of head " +
                                      std::to_string(h) + " sums to " + std::to_string(sum));
            }
        }
    }
}

// Column means of the [range x range] block of a global attention matrix,
// without materializing the block.
std::vector<float> sliced_column_means(const Tensor& attention, TokenRange range) {
    std::size_t n = range.length();
    std::size_t total = attention.rows();
    std::vector<float> acc(n, 0.0f);
    for (std::size_t r = range.begin; r < range.end; ++r) {
        simd::accumulate(acc.data(), attention.data() + r * total + range.begin, n);
    }
    simd::scale(acc.data(), n, 1.0f / static_cast<float>(n));
    return acc;
}

struct GroupOutcome {
    std::vector<std::size_t> video_indices;
    std::vector<std::size_t> audio_indices;
};

} // namespace

void PipelineConfig::validate() const {
    video_budget().validate();
    audio_budget().validate();
    policy.validate();
    if (frame_stride == 0) throw ValidationError("frame_stride must be >= 1");
    if (logit_scale <= 0.0) throw ValidationError("logit_scale must be > 0");
    if (pool_factor == 0) throw ValidationError("pool_factor must be >= 1");
    if (threads == 0) throw ValidationError("threads must be >= 1");
}

PruneResult run_pipeline(const InputBundle& bundle, const GroupSpec& spec,
                         const PipelineConfig& cfg) {
    GroupedSequence seq = stage("validate", [&] {
        cfg.validate();
        GroupedSequence s = build_groups(spec);
        std::size_t frames = bundle.video_clip.rows();
        if (bundle.audio_clip.rows() != frames) {
            throw ValidationError("clip embeddings disagree on frame count");
        }
        for (const auto& g : s.groups) {
            if (g.frame_index >= frames) {
                throw ValidationError("group " + std::to_string(g.group_id) +
                                      " references frame " + std::to_string(g.frame_index) +
                                      " beyond the " + std::to_string(frames) + " sampled frames");
            }
        }
        if (s.total_video_tokens > 0 && bundle.video_emb.rows() != s.total_video_tokens) {
            throw ValidationError("video embeddings hold " +
                                  std::to_string(bundle.video_emb.rows()) +
                                  " tokens, group spec wants " +
                                  std::to_string(s.total_video_tokens));
        }
        if (s.total_audio_tokens > 0) {
            if (bundle.audio_qk.has_value() == bundle.audio_attention.has_value()) {
                throw ValidationError(
                    "exactly one of audio q/k or precomputed attention must be supplied");
            }
            if (bundle.audio_qk) {
                const AudioQk& qk = *bundle.audio_qk;
                if (qk.q.rows() != s.total_audio_tokens || qk.k.rows() != s.total_audio_tokens ||
                    qk.q.cols() != qk.k.cols()) {
                    throw ValidationError("audio projections do not match the audio token count");
                }
            } else {
                const Tensor& attn = *bundle.audio_attention;
                std::size_t rank = attn.rank();
                std::size_t n = rank == 3 ? attn.extent(1) : (rank == 2 ? attn.extent(0) : 0);
                bool square = rank == 2 ? attn.extent(1) == n
                                        : (rank == 3 && attn.extent(2) == n && attn.extent(0) > 0);
                if (n != s.total_audio_tokens || !square) {
                    throw ValidationError("precomputed attention does not match the audio token count");
                }
            }
        }
        return s;
    });

    ModalityScores scores = stage("score", [&] {
        return score_modalities(bundle.video_clip, bundle.audio_clip,
                                {bundle.text_clip.data(), bundle.text_clip.size()},
                                cfg.frame_stride, cfg.logit_scale);
    });

    Strategy strategy = stage("classify", [&] { return classify_strategy(scores, cfg.policy); });

    std::size_t group_count = seq.group_count();
    std::vector<std::size_t> video_tokens(group_count);
    std::vector<std::size_t> pooled_audio(group_count);
    std::vector<double> group_scores_video(group_count);
    std::vector<double> group_scores_audio(group_count);
    for (std::size_t i = 0; i < group_count; ++i) {
        const TemporalGroup& g = seq.groups[i];
        video_tokens[i] = g.video_range.length();
        std::size_t n_audio = g.audio_range.length();
        pooled_audio[i] = n_audio == 0 ? 0 : (n_audio + cfg.pool_factor - 1) / cfg.pool_factor;
        group_scores_video[i] = scores.video[g.frame_index];
        group_scores_audio[i] = scores.audio[g.frame_index];
    }

    // Audio budgets are enforced at pooled granularity, where Top-K selects.
    AllocationPlan plan = stage("allocate", [&] {
        return allocate(group_scores_video, group_scores_audio, video_tokens, pooled_audio,
                        strategy, cfg.video_budget(), cfg.audio_budget());
    });

    // Attention over the full audio sequence, computed or head-averaged once.
    Tensor global_attention = stage("attend", [&]() -> Tensor {
        if (seq.total_audio_tokens == 0) return Tensor{};
        if (bundle.audio_qk) {
            return compute_attention(bundle.audio_qk->q, bundle.audio_qk->k);
        }
        const Tensor& attn = *bundle.audio_attention;
        std::size_t n = seq.total_audio_tokens;
        if (attn.rank() == 2) {
            check_attention_rows(attn, 1, n);
            return attn;
        }
        std::size_t heads = attn.extent(0);
        check_attention_rows(attn, heads, n);
        Tensor mean({n, n});
        for (std::size_t h = 0; h < heads; ++h) {
            simd::accumulate(mean.data(), attn.data() + h * n * n, n * n);
        }
        simd::scale(mean.data(), n * n, 1.0f / static_cast<float>(heads));
        return mean;
    });

    std::vector<GroupOutcome> outcomes(group_count);
    auto prune_one = [&](std::size_t i) {
        const TemporalGroup& g = seq.groups[i];
        GroupOutcome& out = outcomes[i];
        if (!g.video_range.empty()) {
            MatrixView slice = slice_group(seq, bundle.video_emb, i, Modality::video);
            std::vector<float> redundancy = video_redundancy_scores(slice);
            out.video_indices = select_video(redundancy, plan.rho_video[i]).indices;
        }
        if (!g.audio_range.empty()) {
            std::vector<float> per_key = sliced_column_means(global_attention, g.audio_range);
            std::vector<float> pooled = pool_attention(per_key, cfg.pool_factor);
            out.audio_indices = select_audio(pooled, plan.rho_audio[i]).indices;
        }
    };

    stage("prune", [&] {
        std::size_t workers = std::min(cfg.threads, std::max<std::size_t>(group_count, 1));
        if (workers <= 1) {
            for (std::size_t i = 0; i < group_count; ++i) prune_one(i);
            return 0;
        }
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> failures(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < group_count; i += workers) prune_one(i);
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& f : failures) {
            if (f) std::rethrow_exception(f);
        }
        return 0;
    });

    return stage("assemble", [&] {
        PruneResult result;
        result.strategy = strategy;
        std::size_t total_video = 0, total_pooled = 0, kept_video = 0, kept_audio = 0;
        for (std::size_t i = 0; i < group_count; ++i) {
            GroupResult g;
            g.group_id = i;
            g.video_tokens = video_tokens[i];
            g.pooled_audio_tokens = pooled_audio[i];
            g.rho_video = quantize_ratio(plan.rho_video[i]);
            g.rho_audio = quantize_ratio(plan.rho_audio[i]);
            g.video_indices = std::move(outcomes[i].video_indices);
            g.audio_indices = std::move(outcomes[i].audio_indices);
            total_video += g.video_tokens;
            total_pooled += g.pooled_audio_tokens;
            kept_video += g.video_indices.size();
            kept_audio += g.audio_indices.size();
            result.groups.push_back(std::move(g));
        }
        result.tokens_before = total_video + total_pooled;
        result.tokens_after = kept_video + kept_audio;
        result.retained_video = total_video == 0
                                    ? 0.0
                                    : quantize_ratio(static_cast<double>(kept_video) /
                                                     static_cast<double>(total_video));
        result.retained_audio = total_pooled == 0
                                    ? 0.0
                                    : quantize_ratio(static_cast<double>(kept_audio) /
                                                     static_cast<double>(total_pooled));
        result.retained_ratio = result.tokens_before == 0
                                    ? 0.0
                                    : quantize_ratio(static_cast<double>(result.tokens_after) /
                                                     static_cast<double>(result.tokens_before));
        result.validate();
        return result;
    });
}

} // namespace omniselect
