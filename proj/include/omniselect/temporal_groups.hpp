#pragma once

#include <cstddef>
#include <vector>

#include "omniselect/tensor.hpp"
#include "omniselect/tensor_io.hpp"

namespace omniselect {

enum class Modality { video, audio };

inline const char* modality_name(Modality m) {
    return m == Modality::video ? "video" : "audio";
}

// Half-open token-index interval into a global per-modality token sequence.
struct TokenRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t length() const { return end - begin; }
    bool empty() const { return begin == end; }
};

// One aligned video-frame / audio-segment chunk with its token ranges.
struct TemporalGroup {
    std::size_t group_id = 0;
    TokenRange video_range;
    TokenRange audio_range;
    std::size_t frame_index = 0;
};

// Ordered groups partitioning [0, N_v) and [0, N_a). Immutable once built;
// concurrent slicing is safe.
struct GroupedSequence {
    std::vector<TemporalGroup> groups;
    std::size_t total_video_tokens = 0;
    std::size_t total_audio_tokens = 0;

    std::size_t group_count() const { return groups.size(); }
};

// Ranges come from prefix sums over the spec's per-group token counts.
GroupedSequence build_groups(const GroupSpec& spec);

// Contiguous row block for one group's tokens in `embeddings` (rows must
// cover the full modality sequence). Returns a view; no copy is made.
MatrixView slice_group(const GroupedSequence& seq, const Tensor& embeddings,
                       std::size_t group_id, Modality modality);

} // namespace omniselect
