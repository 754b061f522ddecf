#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <random>

#include "omniselect/temporal_groups.hpp"

using namespace omniselect;

namespace {

GroupSpec make_spec(std::vector<std::pair<std::size_t, std::size_t>> counts) {
    GroupSpec spec;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        spec.groups.push_back({i, counts[i].first, counts[i].second, i});
    }
    return spec;
}

} // namespace

TEST_CASE("ranges are prefix sums over the spec counts") {
    GroupedSequence seq = build_groups(make_spec({{4, 2}, {4, 2}}));
    REQUIRE(seq.group_count() == 2);
    CHECK(seq.groups[0].video_range.begin == 0);
    CHECK(seq.groups[0].video_range.end == 4);
    CHECK(seq.groups[1].video_range.begin == 4);
    CHECK(seq.groups[1].video_range.end == 8);
    CHECK(seq.groups[0].audio_range.end == 2);
    CHECK(seq.groups[1].audio_range.begin == 2);
    CHECK(seq.groups[1].audio_range.end == 4);
    CHECK(seq.total_video_tokens == 8);
    CHECK(seq.total_audio_tokens == 4);
    CHECK(seq.groups[1].frame_index == 1);
}

TEST_CASE("a group may lack one modality entirely") {
    GroupedSequence seq = build_groups(make_spec({{10, 0}}));
    CHECK(seq.groups[0].audio_range.empty());
    CHECK(seq.total_audio_tokens == 0);
}

TEST_CASE("token totals for the large synthetic layout") {
    std::vector<std::pair<std::size_t, std::size_t>> counts(128, {144, 25});
    GroupedSequence seq = build_groups(make_spec(std::move(counts)));
    CHECK(seq.total_video_tokens == 18432);
    CHECK(seq.total_audio_tokens == 3200);
}

TEST_CASE("slice_group returns the group's contiguous row block") {
    GroupedSequence seq = build_groups(make_spec({{4, 2}, {4, 2}}));
    std::vector<float> data(8 * 3);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(i);
    Tensor video({8, 3}, data);

    MatrixView block = slice_group(seq, video, 1, Modality::video);
    CHECK(block.rows == 4);
    CHECK(block.cols == 3);
    CHECK(block.data == video.data() + 4 * 3);
    CHECK(block.row(0)[0] == 12.0f);
}

TEST_CASE("an empty range slices to a zero-row view") {
    GroupedSequence seq = build_groups(make_spec({{10, 0}}));
    Tensor audio({0, 5});
    MatrixView block = slice_group(seq, audio, 0, Modality::audio);
    CHECK(block.rows == 0);
    CHECK(block.cols == 5);
}

TEST_CASE("slices partition the input exactly") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t groups = 1 + gen() % 6;
        std::vector<std::pair<std::size_t, std::size_t>> counts(groups);
        for (auto& c : counts) c = {gen() % 7, 1 + gen() % 7};
        GroupSpec spec = make_spec(std::move(counts));
        GroupedSequence seq = build_groups(spec);

        std::size_t dim = 1 + gen() % 4;
        std::vector<float> data(seq.total_audio_tokens * dim);
        for (float& v : data) v = static_cast<float>(gen() % 1000);
        Tensor audio({seq.total_audio_tokens, dim}, data);

        std::vector<float> rebuilt;
        for (std::size_t g = 0; g < groups; ++g) {
            MatrixView block = slice_group(seq, audio, g, Modality::audio);
            rebuilt.insert(rebuilt.end(), block.data, block.data + block.size());
        }
        REQUIRE(rebuilt.size() == data.size());
        CHECK(std::memcmp(rebuilt.data(), data.data(), data.size() * sizeof(float)) == 0);
    }
}

TEST_CASE("build_groups is deterministic") {
    GroupSpec spec = make_spec({{3, 1}, {5, 2}, {0, 4}});
    GroupedSequence a = build_groups(spec);
    GroupedSequence b = build_groups(spec);
    REQUIRE(a.group_count() == b.group_count());
    for (std::size_t i = 0; i < a.group_count(); ++i) {
        CHECK(a.groups[i].video_range.begin == b.groups[i].video_range.begin);
        CHECK(a.groups[i].audio_range.end == b.groups[i].audio_range.end);
    }
}

TEST_CASE("slice errors") {
    GroupedSequence seq = build_groups(make_spec({{4, 2}}));
    Tensor wrong_rows({5, 3});
    CHECK_THROWS_AS(slice_group(seq, wrong_rows, 0, Modality::video), ValidationError);
    Tensor video({4, 3});
    CHECK_THROWS_AS(slice_group(seq, video, 1, Modality::video), ValidationError);
}
