#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "omniselect/pipeline.hpp"

namespace omniselect {

// Deterministic helpers over std::mt19937_64. Distribution shaping is done
// by hand (no std::*_distribution, no libm transcendentals), so the same
// seed yields the same bytes on every platform and standard library.
class SyntheticRng {
public:
    explicit SyntheticRng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Irwin-Hall approximation: sum of 12 uniforms, centered. Close enough
    // to gaussian for synthetic embeddings and free of transcendentals.
    double normal() {
        double s = 0.0;
        for (int i = 0; i < 12; ++i) s += uniform();
        return s - 6.0;
    }

    std::size_t index(std::size_t bound) {
        // rejection sampling keeps the draw unbiased
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t v = gen_();
        while (v >= limit) v = gen_();
        return static_cast<std::size_t>(v % bound);
    }

private:
    std::mt19937_64 gen_;
};

enum class Regime { video_heavy, audio_heavy, balanced };

const char* regime_name(Regime r);
Regime regime_from_name(const std::string& name);

// What the generator planted, for later verification. Duplicate video
// tokens must rank as redundant (pruned at eta = 0.7); hot audio pooled
// positions must rank as salient (retained at eta = 0.7).
struct TruthSidecar {
    std::uint64_t seed = 0;
    Regime regime = Regime::balanced;
    double logit_scale = 10.0;
    std::size_t pool_factor = 2;
    Strategy expected_strategy = Strategy::Uniform;
    double planted_gap = 0.0;
    double audio_logit_margin = 0.0;
    std::vector<std::vector<std::size_t>> duplicate_video; // per group, local idx
    std::vector<std::vector<std::size_t>> hot_audio;       // per group, pooled idx
};

struct SyntheticInstance {
    InputBundle bundle;
    GroupSpec spec;
    TruthSidecar truth;
};

// Deterministic per seed. `regime` plants the modality-score gap that the
// classifier should land on; duplicates and hot audio tokens are planted
// with wide margins and recorded in the sidecar.
SyntheticInstance generate_synthetic(std::uint64_t seed, std::size_t groups,
                                     std::size_t video_tokens_per_group,
                                     std::size_t audio_tokens_per_group, std::size_t dim,
                                     Regime regime);

TruthSidecar read_truth(const std::filesystem::path& path);
void write_truth(const TruthSidecar& truth, const std::filesystem::path& path);

// File names used inside a generated instance directory.
struct InstancePaths {
    std::filesystem::path video_clip, audio_clip, text_clip, video_emb, audio_qk, groups, truth;
    explicit InstancePaths(const std::filesystem::path& dir)
        : video_clip(dir / "video_clip.omst"),
          audio_clip(dir / "audio_clip.omst"),
          text_clip(dir / "text_clip.omst"),
          video_emb(dir / "video_emb.omst"),
          audio_qk(dir / "audio_qk.omst"),
          groups(dir / "groups.txt"),
          truth(dir / "truth.txt") {}
};

void write_instance_dir(const SyntheticInstance& inst, const std::filesystem::path& dir);
SyntheticInstance read_instance_dir(const std::filesystem::path& dir);

// Pack / unpack the global audio projections as one rank-3 tensor [2, N, d].
Tensor pack_audio_qk(const AudioQk& qk);
AudioQk unpack_audio_qk(const Tensor& packed);

} // namespace omniselect
