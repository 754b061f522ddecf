// Command-line front end: compress (run the pruning pipeline), gen (emit a
// seeded synthetic instance), verify (check an instance against its truth
// sidecar and the allocation oracle).

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "omniselect/allocation_oracle.hpp"
#include "omniselect/cost_model.hpp"
#include "omniselect/pipeline.hpp"
#include "omniselect/synthetic.hpp"
#include "omniselect/temporal_groups.hpp"

namespace {

using namespace omniselect;

int run_compress(const std::string& video_clip, const std::string& audio_clip,
                 const std::string& text_clip, const std::string& video_emb,
                 const std::string& audio_qk, const std::string& audio_attn,
                 const std::string& groups_path, const std::string& out_path,
                 const PipelineConfig& cfg) {
    InputBundle bundle;
    bundle.video_clip = read_tensor(video_clip);
    bundle.audio_clip = read_tensor(audio_clip);
    Tensor text = read_tensor(text_clip);
    if (text.rank() != 1) {
        throw ValidationError("text embedding tensor must have rank 1");
    }
    bundle.text_clip.assign(text.data(), text.data() + text.size());
    bundle.video_emb = read_tensor(video_emb);
    if (!audio_qk.empty() && !audio_attn.empty()) {
        throw ValidationError("pass either --audio-qk or --audio-attn, not both");
    }
    if (!audio_qk.empty()) {
        bundle.audio_qk = unpack_audio_qk(read_tensor(audio_qk));
    } else if (!audio_attn.empty()) {
        bundle.audio_attention = read_tensor(audio_attn);
    }
    GroupSpec spec = read_group_spec(groups_path);

    PruneResult result = run_pipeline(bundle, spec, cfg);
    write_prune_result(result, out_path);

    std::vector<std::size_t> before = {result.tokens_before};
    std::vector<std::size_t> after = {result.tokens_after};
    CostEstimate cost = estimate_cost(before, after);

    std::printf("strategy %s\n", strategy_name(result.strategy));
    std::printf("tokens_before %zu\n", result.tokens_before);
    std::printf("tokens_after %zu\n", result.tokens_after);
    std::printf("retained_video %.6f\n", result.retained_video);
    std::printf("retained_audio %.6f\n", result.retained_audio);
    std::printf("retained_ratio %.6f\n", result.retained_ratio);
    std::printf("modeled_speedup %.4f\n", cost.estimated_speedup);
    return 0;
}

int run_gen(std::uint64_t seed, std::size_t groups, std::size_t video_tokens,
            std::size_t audio_tokens, std::size_t dim, const std::string& regime,
            const std::string& out_dir) {
    SyntheticInstance inst = generate_synthetic(seed, groups, video_tokens, audio_tokens, dim,
                                                regime_from_name(regime));
    write_instance_dir(inst, out_dir);
    std::printf("instance %s\n", out_dir.c_str());
    std::printf("groups %zu\n", groups);
    std::printf("expected_strategy %s\n", strategy_name(inst.truth.expected_strategy));
    return 0;
}

struct CheckReporter {
    bool all_ok = true;
    void operator()(bool ok, const std::string& name, const std::string& detail) {
        std::printf("%s %s%s%s\n", ok ? "ok" : "FAIL", name.c_str(),
                    detail.empty() ? "" : " ", detail.c_str());
        all_ok = all_ok && ok;
    }
};

double planted_hit_fraction(const std::vector<std::size_t>& planted,
                            const std::vector<std::size_t>& retained, bool want_retained) {
    if (planted.empty()) return 1.0;
    std::size_t hits = 0;
    for (std::size_t idx : planted) {
        bool in = std::binary_search(retained.begin(), retained.end(), idx);
        if (in == want_retained) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(planted.size());
}

int run_verify(const std::string& in_dir, double eta) {
    SyntheticInstance inst = read_instance_dir(in_dir);

    PipelineConfig cfg;
    cfg.eta_video = eta;
    cfg.eta_audio = eta;
    cfg.logit_scale = inst.truth.logit_scale;
    cfg.pool_factor = inst.truth.pool_factor;
    PruneResult result = run_pipeline(inst.bundle, inst.spec, cfg);

    CheckReporter check;
    check(result.strategy == inst.truth.expected_strategy, "strategy",
          std::string("got ") + strategy_name(result.strategy) + " expected " +
              strategy_name(inst.truth.expected_strategy));

    std::size_t planted_dups = 0, planted_hot = 0;
    double pruned_hits = 0.0, retained_hits = 0.0;
    for (std::size_t g = 0; g < result.groups.size(); ++g) {
        const auto& dup = inst.truth.duplicate_video[g];
        const auto& hot = inst.truth.hot_audio[g];
        pruned_hits += planted_hit_fraction(dup, result.groups[g].video_indices, false) *
                       static_cast<double>(dup.size());
        retained_hits += planted_hit_fraction(hot, result.groups[g].audio_indices, true) *
                         static_cast<double>(hot.size());
        planted_dups += dup.size();
        planted_hot += hot.size();
    }
    double dup_fraction = planted_dups == 0 ? 1.0 : pruned_hits / static_cast<double>(planted_dups);
    double hot_fraction = planted_hot == 0 ? 1.0 : retained_hits / static_cast<double>(planted_hot);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.4f of %zu planted duplicates pruned", dup_fraction,
                  planted_dups);
    check(dup_fraction >= 0.95, "planted-video", buf);
    std::snprintf(buf, sizeof buf, "%.4f of %zu planted hot positions retained", hot_fraction,
                  planted_hot);
    check(hot_fraction >= 0.95, "planted-audio", buf);

    // Allocator vs oracle on this instance's realized scores and counts.
    GroupedSequence seq = build_groups(inst.spec);
    ModalityScores scores =
        score_modalities(inst.bundle.video_clip, inst.bundle.audio_clip,
                         {inst.bundle.text_clip.data(), inst.bundle.text_clip.size()},
                         cfg.frame_stride, cfg.logit_scale);
    std::size_t count = seq.group_count();
    for (Modality modality : {Modality::video, Modality::audio}) {
        std::vector<double> group_scores(count);
        std::vector<std::size_t> tokens(count);
        for (std::size_t i = 0; i < count; ++i) {
            const TemporalGroup& g = seq.groups[i];
            group_scores[i] = modality == Modality::video ? scores.video[g.frame_index]
                                                          : scores.audio[g.frame_index];
            std::size_t n = modality == Modality::video
                                ? g.video_range.length()
                                : (g.audio_range.length() + cfg.pool_factor - 1) / cfg.pool_factor;
            tokens[i] = n;
        }
        BudgetConfig budget{eta, cfg.tau, cfg.epsilon, cfg.max_iters, 1e-9};
        std::vector<double> p = base_probabilities(group_scores, budget);
        RescaleResult refined = rescale_to_budget(p, tokens, budget);
        OracleComparison cmp = compare_with_oracle(p, tokens, eta, refined.rho);
        std::snprintf(buf, sizeof buf, "max gap %.3e%s", cmp.max_component_gap,
                      cmp.unique_fixpoint ? "" : " (non-unique fixpoint, reported only)");
        check(!cmp.unique_fixpoint || cmp.max_component_gap <= 1e-6,
              std::string("allocator-oracle-") + modality_name(modality), buf);
    }

    return check.all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"training-free multimodal token compression engine"};
    app.require_subcommand(1);

    // compress
    auto* compress = app.add_subcommand("compress", "prune a serialized token bundle");
    std::string video_clip, audio_clip, text_clip, video_emb, audio_qk, audio_attn, groups_path,
        out_path;
    PipelineConfig cfg;
    compress->add_option("--video-clip", video_clip, "per-frame video clip embeddings (OMST)")
        ->required();
    compress->add_option("--audio-clip", audio_clip, "per-frame audio clip embeddings (OMST)")
        ->required();
    compress->add_option("--text-clip", text_clip, "query text embedding (OMST, rank 1)")
        ->required();
    compress->add_option("--video-emb", video_emb, "per-token video embeddings (OMST)")
        ->required();
    compress->add_option("--audio-qk", audio_qk, "global audio q/k tensor (OMST, [2,N,d])");
    compress->add_option("--audio-attn", audio_attn, "precomputed audio attention (OMST)");
    compress->add_option("--groups", groups_path, "temporal group spec")->required();
    compress->add_option("--eta-video", cfg.eta_video, "video pruning ratio in [0,1]")
        ->required();
    compress->add_option("--eta-audio", cfg.eta_audio, "audio pruning ratio in [0,1]")
        ->required();
    compress->add_option("--tau", cfg.tau, "sigmoid temperature");
    compress->add_option("--gap-breakpoint", cfg.policy.gap_breakpoint,
                         "gap where the threshold switches");
    compress->add_option("--theta-small", cfg.policy.theta_small, "threshold for small gaps");
    compress->add_option("--theta-large", cfg.policy.theta_large, "threshold for large gaps");
    compress->add_option("--stride", cfg.frame_stride, "score every stride-th frame");
    compress->add_option("--logit-scale", cfg.logit_scale, "multiplier applied to cosines");
    compress->add_option("--pool-factor", cfg.pool_factor, "audio pooling window");
    compress->add_option("--threads", cfg.threads, "worker threads for per-group pruning");
    compress->add_option("--out", out_path, "prune result path")->required();

    // gen
    auto* gen = app.add_subcommand("gen", "emit a seeded synthetic instance");
    std::uint64_t seed = 0;
    std::size_t gen_groups = 8, gen_video = 64, gen_audio = 25, gen_dim = 32;
    std::string regime = "balanced", out_dir;
    gen->add_option("--seed", seed, "rng seed")->required();
    gen->add_option("--groups", gen_groups, "temporal group count");
    gen->add_option("--video-tokens", gen_video, "video tokens per group");
    gen->add_option("--audio-tokens", gen_audio, "audio tokens per group");
    gen->add_option("--dim", gen_dim, "embedding dimension");
    gen->add_option("--regime", regime, "video-heavy | audio-heavy | balanced");
    gen->add_option("--out-dir", out_dir, "output directory")->required();

    // verify
    auto* verify = app.add_subcommand("verify", "check an instance against its truth sidecar");
    std::string in_dir;
    double verify_eta = 0.7;
    verify->add_option("--in", in_dir, "instance directory")->required();
    verify->add_option("--eta", verify_eta, "pruning ratio for the planted-signal checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compress->parsed()) {
            return run_compress(video_clip, audio_clip, text_clip, video_emb, audio_qk,
                                audio_attn, groups_path, out_path, cfg);
        }
        if (gen->parsed()) {
            return run_gen(seed, gen_groups, gen_video, gen_audio, gen_dim, regime, out_dir);
        }
        return run_verify(in_dir, verify_eta);
    } catch (const InternalError& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
}
