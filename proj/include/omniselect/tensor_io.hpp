#pragma once

// Serialization of tensors, group specs and prune results.
//
// OMST tensor file layout (all integers little-endian):
//     magic   "OMST"  - 4 bytes
//     version u32     - 1
//     dtype   u32     - 0 = float32 (only code in v1)
//     ndim    u32
//     extents ndim x u64
//     payload little-endian float32, row-major
//
// Group spec text format:
//     groups <G>
//     <id> <n_video> <n_audio> <frame_index>     (one line per group)
//
// Prune result text format (fixed line order, ratios at 1e-6 resolution):
//     strategy <name>
//     tokens_before <u>
//     tokens_after <u>
//     retained_video <f>
//     retained_audio <f>
//     meta <id> n_video <u> pooled_audio <u> rho_video <f> rho_audio <f>
//     group <id> video <k_v> <idx...>
//     group <id> audio <k_a> <idx...>
//     retained_ratio <f>
// Audio indices and counts are at pooled granularity; a retained pooled
// index stands for its pre-pooling token pair.

#include <filesystem>
#include <vector>

#include "omniselect/strategy.hpp"
#include "omniselect/tensor.hpp"

namespace omniselect {

Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const Tensor& t, const std::filesystem::path& path);

// One aligned video-frame / audio-segment chunk, by token count.
struct GroupSpecEntry {
    std::size_t group_id = 0;
    std::size_t video_tokens = 0;
    std::size_t audio_tokens = 0;
    std::size_t frame_index = 0;
};

struct GroupSpec {
    std::vector<GroupSpecEntry> groups;

    std::size_t group_count() const { return groups.size(); }
    std::size_t total_video_tokens() const;
    std::size_t total_audio_tokens() const;

    // Throws ValidationError unless ids are consecutive from 0 and every
    // group has at least one modality with tokens.
    void validate() const;
};

GroupSpec read_group_spec(const std::filesystem::path& path);
void write_group_spec(const GroupSpec& spec, const std::filesystem::path& path);

// Per-group slice of a prune result. Ratios are stored at the same 1e-6
// resolution the text format uses, so read(write(x)) == x.
struct GroupResult {
    std::size_t group_id = 0;
    std::size_t video_tokens = 0;        // raw token count of the group
    std::size_t pooled_audio_tokens = 0; // ceil(n_audio / pool_factor)
    double rho_video = 0.0;
    double rho_audio = 0.0;
    std::vector<std::size_t> video_indices; // strictly increasing, local
    std::vector<std::size_t> audio_indices; // strictly increasing, pooled
};

struct PruneResult {
    Strategy strategy = Strategy::Uniform;
    std::size_t tokens_before = 0; // video raw + audio pooled
    std::size_t tokens_after = 0;
    double retained_video = 0.0;
    double retained_audio = 0.0;
    double retained_ratio = 0.0;
    std::vector<GroupResult> groups;

    void validate() const;
};

PruneResult read_prune_result(const std::filesystem::path& path);
void write_prune_result(const PruneResult& r, const std::filesystem::path& path);

// Quantize a ratio to the 1e-6 file resolution.
double quantize_ratio(double rho);

} // namespace omniselect
