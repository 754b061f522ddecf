#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "omniselect/tensor_io.hpp"

using namespace omniselect;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "omniselect-io-tests";
        fs::create_directories(d);
        return d;
    }();
    return dir / name;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Tensor random_tensor(std::mt19937_64& gen) {
    std::size_t rank = 1 + gen() % 3;
    std::vector<std::size_t> shape(rank);
    for (auto& e : shape) e = gen() % 6; // zero extents included
    std::size_t count = Tensor::element_count(shape);
    std::vector<float> data(count);
    for (float& v : data) {
        v = static_cast<float>((static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5) * 20.0);
    }
    return Tensor(std::move(shape), std::move(data));
}

} // namespace

TEST_CASE("minimal tensor serializes to the documented byte layout") {
    Tensor t({1}, {0.0f});
    auto path = temp_file("minimal.omst");
    write_tensor(t, path);
    std::string bytes = file_bytes(path);
    REQUIRE(bytes.size() == 4 + 4 + 4 + 4 + 8 + 4);
    CHECK(bytes.compare(0, 4, "OMST") == 0);
    const unsigned char expect_header[] = {
        1, 0, 0, 0,             // version
        0, 0, 0, 0,             // dtype f32
        1, 0, 0, 0,             // ndim
        1, 0, 0, 0, 0, 0, 0, 0, // extent
        0, 0, 0, 0,             // payload 0.0f
    };
    CHECK(std::memcmp(bytes.data() + 4, expect_header, sizeof expect_header) == 0);
}

TEST_CASE("writes are byte deterministic") {
    Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
    auto p1 = temp_file("det1.omst");
    auto p2 = temp_file("det2.omst");
    write_tensor(t, p1);
    write_tensor(t, p2);
    CHECK(file_bytes(p1) == file_bytes(p2));

    Tensor back = read_tensor(p1);
    CHECK(back.shape() == std::vector<std::size_t>{2, 3});
    CHECK(back == t);
}

TEST_CASE("tensor round-trip is bitwise for random shapes up to rank 3") {
    std::mt19937_64 gen(1234);
    auto path = temp_file("roundtrip.omst");
    for (int i = 0; i < 100; ++i) {
        Tensor t = random_tensor(gen);
        write_tensor(t, path);
        Tensor back = read_tensor(path);
        REQUIRE(back.shape() == t.shape());
        CHECK(std::memcmp(back.data(), t.data(), t.size() * sizeof(float)) == 0);
    }
}

TEST_CASE("empty tensor round-trips") {
    Tensor t({0});
    auto path = temp_file("empty.omst");
    write_tensor(t, path);
    Tensor back = read_tensor(path);
    CHECK(back.size() == 0);
    CHECK(back.shape() == std::vector<std::size_t>{0});
}

TEST_CASE("ingestion failures are distinct") {
    auto path = temp_file("bad.omst");
    Tensor good({1}, {1.0f});
    write_tensor(good, path);
    std::string bytes = file_bytes(path);

    SUBCASE("bad magic") {
        std::string b = bytes;
        b[0] = 'X';
        write_bytes(path, b);
        try {
            read_tensor(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.kind() == FormatError::Kind::bad_magic);
        }
    }
    SUBCASE("unsupported version") {
        std::string b = bytes;
        b[4] = 9;
        write_bytes(path, b);
        try {
            read_tensor(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.kind() == FormatError::Kind::unsupported_version);
        }
    }
    SUBCASE("unsupported dtype") {
        std::string b = bytes;
        b[8] = 5;
        write_bytes(path, b);
        try {
            read_tensor(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.kind() == FormatError::Kind::unsupported_dtype);
        }
    }
    SUBCASE("truncated payload") {
        write_bytes(path, bytes.substr(0, bytes.size() - 2));
        try {
            read_tensor(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.kind() == FormatError::Kind::truncated_payload);
        }
    }
    SUBCASE("trailing bytes") {
        write_bytes(path, bytes + "xx");
        try {
            read_tensor(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.kind() == FormatError::Kind::truncated_payload);
        }
    }
    SUBCASE("huge ndim fails cleanly instead of allocating") {
        std::string b = bytes.substr(0, 12);
        b += std::string("\xff\xff\xff\x7f", 4); // ndim ~ 2^31
        write_bytes(path, b);
        try {
            read_tensor(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.kind() == FormatError::Kind::truncated_payload);
        }
    }
    SUBCASE("non-finite payload names the offending index") {
        std::string b = bytes;
        const unsigned char nan_bytes[] = {0x00, 0x00, 0xc0, 0x7f};
        std::memcpy(b.data() + b.size() - 4, nan_bytes, 4);
        write_bytes(path, b);
        try {
            read_tensor(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.kind() == FormatError::Kind::non_finite_element);
            CHECK(std::string(e.what()).find("index 0") != std::string::npos);
        }
    }
}

TEST_CASE("write_tensor refuses non-finite data") {
    Tensor t({2}, {1.0f, std::numeric_limits<float>::infinity()});
    CHECK_THROWS_AS(write_tensor(t, temp_file("inf.omst")), ValidationError);
}

TEST_CASE("group spec parses and validates") {
    auto path = temp_file("groups.txt");

    SUBCASE("well-formed") {
        write_bytes(path, "groups 2\n0 144 25 0\n1 144 25 1\n");
        GroupSpec spec = read_group_spec(path);
        CHECK(spec.group_count() == 2);
        CHECK(spec.total_video_tokens() == 288);
        CHECK(spec.groups[1].audio_tokens == 25);
    }
    SUBCASE("non-consecutive ids rejected") {
        write_bytes(path, "groups 2\n0 4 2 0\n2 4 2 1\n");
        CHECK_THROWS_AS(read_group_spec(path), ValidationError);
    }
    SUBCASE("negative counts rejected") {
        write_bytes(path, "groups 1\n0 -4 2 0\n");
        CHECK_THROWS_AS(read_group_spec(path), ValidationError);
    }
    SUBCASE("empty group rejected") {
        write_bytes(path, "groups 1\n0 0 0 0\n");
        CHECK_THROWS_AS(read_group_spec(path), ValidationError);
    }
    SUBCASE("malformed header rejected") {
        write_bytes(path, "grup 1\n0 1 1 0\n");
        CHECK_THROWS_AS(read_group_spec(path), FormatError);
    }
    SUBCASE("truncated body rejected") {
        write_bytes(path, "groups 2\n0 4 2 0\n");
        CHECK_THROWS_AS(read_group_spec(path), FormatError);
    }
    SUBCASE("writer round-trip") {
        GroupSpec spec;
        spec.groups = {{0, 10, 0, 0}, {1, 4, 2, 3}};
        write_group_spec(spec, path);
        GroupSpec back = read_group_spec(path);
        REQUIRE(back.group_count() == 2);
        CHECK(back.groups[0].video_tokens == 10);
        CHECK(back.groups[0].audio_tokens == 0);
        CHECK(back.groups[1].frame_index == 3);
    }
}

namespace {

PruneResult random_result(std::mt19937_64& gen) {
    PruneResult r;
    r.strategy = static_cast<Strategy>(gen() % 3);
    std::size_t groups = 1 + gen() % 5;
    std::size_t kept_v = 0, kept_a = 0, total_v = 0, total_a = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        GroupResult gr;
        gr.group_id = g;
        gr.video_tokens = 1 + gen() % 12;
        gr.pooled_audio_tokens = 1 + gen() % 8;
        gr.rho_video = quantize_ratio(static_cast<double>(gen() % 1000000) / 1e6);
        gr.rho_audio = quantize_ratio(static_cast<double>(gen() % 1000000) / 1e6);
        for (std::size_t i = 0; i < gr.video_tokens; ++i) {
            if (gen() % 2 || gr.video_indices.empty()) gr.video_indices.push_back(i);
        }
        for (std::size_t i = 0; i < gr.pooled_audio_tokens; ++i) {
            if (gen() % 2 || gr.audio_indices.empty()) gr.audio_indices.push_back(i);
        }
        kept_v += gr.video_indices.size();
        kept_a += gr.audio_indices.size();
        total_v += gr.video_tokens;
        total_a += gr.pooled_audio_tokens;
        r.groups.push_back(std::move(gr));
    }
    r.tokens_before = total_v + total_a;
    r.tokens_after = kept_v + kept_a;
    r.retained_video = quantize_ratio(static_cast<double>(kept_v) / total_v);
    r.retained_audio = quantize_ratio(static_cast<double>(kept_a) / total_a);
    r.retained_ratio = quantize_ratio(static_cast<double>(r.tokens_after) / r.tokens_before);
    return r;
}

bool results_equal(const PruneResult& a, const PruneResult& b) {
    if (a.strategy != b.strategy || a.tokens_before != b.tokens_before ||
        a.tokens_after != b.tokens_after || a.retained_video != b.retained_video ||
        a.retained_audio != b.retained_audio || a.retained_ratio != b.retained_ratio ||
        a.groups.size() != b.groups.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.groups.size(); ++i) {
        const auto& ga = a.groups[i];
        const auto& gb = b.groups[i];
        if (ga.group_id != gb.group_id || ga.video_tokens != gb.video_tokens ||
            ga.pooled_audio_tokens != gb.pooled_audio_tokens || ga.rho_video != gb.rho_video ||
            ga.rho_audio != gb.rho_audio || ga.video_indices != gb.video_indices ||
            ga.audio_indices != gb.audio_indices) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("prune results round-trip losslessly") {
    std::mt19937_64 gen(777);
    auto path = temp_file("result.txt");
    for (int i = 0; i < 50; ++i) {
        PruneResult r = random_result(gen);
        write_prune_result(r, path);
        PruneResult back = read_prune_result(path);
        CHECK(results_equal(r, back));
    }
}

TEST_CASE("empty retained sets only for empty groups") {
    std::mt19937_64 gen(5);
    PruneResult r = random_result(gen);
    r.groups[0].video_indices.clear(); // group still has video tokens
    CHECK_THROWS_AS(write_prune_result(r, temp_file("bad_result.txt")), ValidationError);

    // but a group with no tokens in a modality legitimately retains nothing
    PruneResult ok = random_result(gen);
    ok.groups[0].pooled_audio_tokens = 0;
    ok.groups[0].audio_indices.clear();
    write_prune_result(ok, temp_file("ok_result.txt"));
    PruneResult back = read_prune_result(temp_file("ok_result.txt"));
    CHECK(back.groups[0].audio_indices.empty());
}

TEST_CASE("result indices must stay inside the group and strictly increase") {
    std::mt19937_64 gen(6);
    PruneResult r = random_result(gen);
    auto path = temp_file("invalid.txt");

    PruneResult out_of_range = r;
    out_of_range.groups[0].video_indices = {out_of_range.groups[0].video_tokens};
    CHECK_THROWS_AS(write_prune_result(out_of_range, path), ValidationError);

    PruneResult not_increasing = r;
    not_increasing.groups[0].video_tokens = 4;
    not_increasing.groups[0].video_indices = {1, 1};
    CHECK_THROWS_AS(write_prune_result(not_increasing, path), ValidationError);
}
