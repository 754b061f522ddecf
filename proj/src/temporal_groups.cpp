#include "omniselect/temporal_groups.hpp"

#include <string>

namespace omniselect {

GroupedSequence build_groups(const GroupSpec& spec) {
    spec.validate();
    GroupedSequence seq;
    seq.groups.reserve(spec.groups.size());
    std::size_t video_at = 0;
    std::size_t audio_at = 0;
    for (const auto& g : spec.groups) {
        TemporalGroup group;
        group.group_id = g.group_id;
        group.video_range = {video_at, video_at + g.video_tokens};
        group.audio_range = {audio_at, audio_at + g.audio_tokens};
        group.frame_index = g.frame_index;
        video_at = group.video_range.end;
        audio_at = group.audio_range.end;
        seq.groups.push_back(group);
    }
    seq.total_video_tokens = video_at;
    seq.total_audio_tokens = audio_at;
    return seq;
}

MatrixView slice_group(const GroupedSequence& seq, const Tensor& embeddings,
                       std::size_t group_id, Modality modality) {
    if (group_id >= seq.groups.size()) {
        throw ValidationError("group id " + std::to_string(group_id) + " out of range");
    }
    std::size_t expected = modality == Modality::video ? seq.total_video_tokens
                                                       : seq.total_audio_tokens;
    if (embeddings.rows() != expected) {
        throw ValidationError(std::string(modality_name(modality)) + " embeddings have " +
                              std::to_string(embeddings.rows()) + " rows, grouping expects " +
                              std::to_string(expected));
    }
    const TokenRange& range = modality == Modality::video ? seq.groups[group_id].video_range
                                                          : seq.groups[group_id].audio_range;
    return embeddings.row_block(range.begin, range.length());
}

} // namespace omniselect
