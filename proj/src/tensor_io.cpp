#include "omniselect/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace omniselect {

namespace {

constexpr char kMagic[4] = {'O', 'M', 'S', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kDtypeF32 = 0;

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
}

class ByteReader {
public:
    ByteReader(const std::string& bytes) : bytes_(bytes) {}

    std::size_t remaining() const { return bytes_.size() - pos_; }

    void read_raw(void* dst, std::size_t n) {
        if (remaining() < n) {
            throw FormatError(FormatError::Kind::truncated_payload,
                              "tensor file ends early");
        }
        std::memcpy(dst, bytes_.data() + pos_, n);
        pos_ += n;
    }

    std::uint32_t read_u32() {
        unsigned char b[4];
        read_raw(b, 4);
        return static_cast<std::uint32_t>(b[0]) |
               (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) |
               (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::uint64_t read_u64() {
        unsigned char b[8];
        read_raw(b, 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }

private:
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof()) throw IoError("read failure on " + path.string());
    return std::move(buf).str();
}

void dump(const std::string& bytes, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failure on " + path.string());
}

void append_ratio(std::string& out, double rho) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", rho);
    out += buf;
}

} // namespace

Tensor read_tensor(const std::filesystem::path& path) {
    std::string bytes = slurp(path);
    ByteReader r(bytes);

    char magic[4];
    r.read_raw(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw FormatError(FormatError::Kind::bad_magic,
                          path.string() + ": not an OMST tensor file");
    }
    std::uint32_t version = r.read_u32();
    if (version != kVersion) {
        throw FormatError(FormatError::Kind::unsupported_version,
                          path.string() + ": unsupported version " +
                              std::to_string(version));
    }
    std::uint32_t dtype = r.read_u32();
    if (dtype != kDtypeF32) {
        throw FormatError(FormatError::Kind::unsupported_dtype,
                          path.string() + ": unsupported dtype code " +
                              std::to_string(dtype));
    }
    std::uint32_t ndim = r.read_u32();
    if (r.remaining() < static_cast<std::size_t>(ndim) * 8) {
        throw FormatError(FormatError::Kind::truncated_payload,
                          path.string() + ": header promises " + std::to_string(ndim) +
                              " extents but the file ends first");
    }
    std::vector<std::size_t> shape(ndim);
    for (std::uint32_t i = 0; i < ndim; ++i) {
        shape[i] = static_cast<std::size_t>(r.read_u64());
    }
    std::size_t count = Tensor::element_count(shape);
    if (r.remaining() != count * 4) {
        throw FormatError(FormatError::Kind::truncated_payload,
                          path.string() + ": payload holds " +
                              std::to_string(r.remaining() / 4) + " elements, shape wants " +
                              std::to_string(count));
    }

    std::vector<float> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t u = r.read_u32();
        float v = std::bit_cast<float>(u);
        if (!std::isfinite(v)) {
            throw FormatError(FormatError::Kind::non_finite_element,
                              path.string() + ": non-finite element at flat index " +
                                  std::to_string(i));
        }
        data[i] = v;
    }
    return Tensor(std::move(shape), std::move(data));
}

void write_tensor(const Tensor& t, const std::filesystem::path& path) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t.data()[i])) {
            throw ValidationError("refusing to write non-finite element at flat index " +
                                  std::to_string(i));
        }
    }
    std::string out;
    out.reserve(16 + 8 * t.rank() + 4 * t.size());
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, kDtypeF32);
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t extent : t.shape()) {
        put_u64(out, static_cast<std::uint64_t>(extent));
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        put_u32(out, std::bit_cast<std::uint32_t>(t.data()[i]));
    }
    dump(out, path);
}

std::size_t GroupSpec::total_video_tokens() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.video_tokens;
    return n;
}

std::size_t GroupSpec::total_audio_tokens() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.audio_tokens;
    return n;
}

void GroupSpec::validate() const {
    if (groups.empty()) throw ValidationError("group spec has no groups");
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        if (g.group_id != i) {
            throw ValidationError("group ids must be consecutive from 0; position " +
                                  std::to_string(i) + " holds id " +
                                  std::to_string(g.group_id));
        }
        if (g.video_tokens == 0 && g.audio_tokens == 0) {
            throw ValidationError("group " + std::to_string(i) +
                                  " has no tokens in either modality");
        }
    }
}

GroupSpec read_group_spec(const std::filesystem::path& path) {
    std::string text = slurp(path);
    std::istringstream in(text);
    std::string key;
    std::size_t count = 0;
    if (!(in >> key >> count) || key != "groups") {
        throw FormatError(FormatError::Kind::malformed_text,
                          path.string() + ": expected header 'groups <G>'");
    }
    GroupSpec spec;
    spec.groups.reserve(std::min<std::size_t>(count, 4096)); // count is untrusted
    for (std::size_t i = 0; i < count; ++i) {
        long long id = 0, nv = 0, na = 0, frame = 0;
        if (!(in >> id >> nv >> na >> frame)) {
            throw FormatError(FormatError::Kind::malformed_text,
                              path.string() + ": truncated group line " + std::to_string(i));
        }
        if (id < 0 || nv < 0 || na < 0 || frame < 0) {
            throw ValidationError(path.string() + ": negative value on group line " +
                                  std::to_string(i));
        }
        spec.groups.push_back({static_cast<std::size_t>(id), static_cast<std::size_t>(nv),
                               static_cast<std::size_t>(na), static_cast<std::size_t>(frame)});
    }
    std::string extra;
    if (in >> extra) {
        throw FormatError(FormatError::Kind::malformed_text,
                          path.string() + ": trailing content after groups");
    }
    spec.validate();
    return spec;
}

void write_group_spec(const GroupSpec& spec, const std::filesystem::path& path) {
    spec.validate();
    std::string out = "groups " + std::to_string(spec.groups.size()) + "\n";
    for (const auto& g : spec.groups) {
        out += std::to_string(g.group_id) + " " + std::to_string(g.video_tokens) + " " +
               std::to_string(g.audio_tokens) + " " + std::to_string(g.frame_index) + "\n";
    }
    dump(out, path);
}

double quantize_ratio(double rho) {
    return std::round(rho * 1e6) / 1e6;
}

void PruneResult::validate() const {
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        if (g.group_id != i) {
            throw ValidationError("result group ids must be consecutive from 0");
        }
        auto check = [&](const std::vector<std::size_t>& idx, std::size_t count,
                         const char* modality) {
            if (idx.empty() && count > 0) {
                throw ValidationError("group " + std::to_string(i) + " " + modality +
                                      ": empty retained set for a non-empty group");
            }
            if (!idx.empty() && count == 0) {
                throw ValidationError("group " + std::to_string(i) + " " + modality +
                                      ": retained tokens in an empty group");
            }
            for (std::size_t k = 0; k < idx.size(); ++k) {
                if (idx[k] >= count) {
                    throw ValidationError("group " + std::to_string(i) + " " + modality +
                                          ": index " + std::to_string(idx[k]) +
                                          " outside token range");
                }
                if (k > 0 && idx[k] <= idx[k - 1]) {
                    throw ValidationError("group " + std::to_string(i) + " " + modality +
                                          ": indices not strictly increasing");
                }
            }
        };
        check(g.video_indices, g.video_tokens, "video");
        check(g.audio_indices, g.pooled_audio_tokens, "audio");
        if (g.rho_video < 0.0 || g.rho_video > 1.0 || g.rho_audio < 0.0 || g.rho_audio > 1.0) {
            throw ValidationError("group " + std::to_string(i) + ": ratio outside [0, 1]");
        }
    }
}

void write_prune_result(const PruneResult& r, const std::filesystem::path& path) {
    r.validate();
    std::string out;
    out += "strategy ";
    out += strategy_name(r.strategy);
    out += "\n";
    out += "tokens_before " + std::to_string(r.tokens_before) + "\n";
    out += "tokens_after " + std::to_string(r.tokens_after) + "\n";
    out += "retained_video ";
    append_ratio(out, r.retained_video);
    out += "\nretained_audio ";
    append_ratio(out, r.retained_audio);
    out += "\n";
    for (const auto& g : r.groups) {
        out += "meta " + std::to_string(g.group_id) + " n_video " +
               std::to_string(g.video_tokens) + " pooled_audio " +
               std::to_string(g.pooled_audio_tokens) + " rho_video ";
        append_ratio(out, g.rho_video);
        out += " rho_audio ";
        append_ratio(out, g.rho_audio);
        out += "\n";
        out += "group " + std::to_string(g.group_id) + " video " +
               std::to_string(g.video_indices.size());
        for (std::size_t idx : g.video_indices) out += " " + std::to_string(idx);
        out += "\n";
        out += "group " + std::to_string(g.group_id) + " audio " +
               std::to_string(g.audio_indices.size());
        for (std::size_t idx : g.audio_indices) out += " " + std::to_string(idx);
        out += "\n";
    }
    out += "retained_ratio ";
    append_ratio(out, r.retained_ratio);
    out += "\n";
    dump(out, path);
}

namespace {

[[noreturn]] void bad_result(const std::filesystem::path& path, const std::string& what) {
    throw FormatError(FormatError::Kind::malformed_text, path.string() + ": " + what);
}

} // namespace

PruneResult read_prune_result(const std::filesystem::path& path) {
    std::string text = slurp(path);
    std::istringstream in(text);
    std::string line;
    auto next_line = [&](const char* what) -> std::istringstream {
        if (!std::getline(in, line)) bad_result(path, std::string("missing ") + what);
        return std::istringstream(line);
    };
    auto expect_key = [&](std::istringstream& ls, const std::string& want) {
        std::string key;
        if (!(ls >> key) || key != want) bad_result(path, "expected key '" + want + "'");
    };

    PruneResult r;
    {
        auto ls = next_line("strategy line");
        expect_key(ls, "strategy");
        std::string name;
        if (!(ls >> name)) bad_result(path, "strategy line lacks a name");
        r.strategy = strategy_from_name(name);
    }
    auto read_sized = [&](const char* key) -> std::size_t {
        auto ls = next_line(key);
        expect_key(ls, key);
        long long v = -1;
        if (!(ls >> v) || v < 0) bad_result(path, std::string("bad value for ") + key);
        return static_cast<std::size_t>(v);
    };
    auto read_ratio_line = [&](const char* key) -> double {
        auto ls = next_line(key);
        expect_key(ls, key);
        double v = 0;
        if (!(ls >> v)) bad_result(path, std::string("bad value for ") + key);
        return v;
    };
    r.tokens_before = read_sized("tokens_before");
    r.tokens_after = read_sized("tokens_after");
    r.retained_video = read_ratio_line("retained_video");
    r.retained_audio = read_ratio_line("retained_audio");

    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) bad_result(path, "blank line in result body");
        if (key == "retained_ratio") {
            double v;
            if (!(ls >> v)) bad_result(path, "bad retained_ratio value");
            r.retained_ratio = v;
            std::string extra;
            if (in >> extra) bad_result(path, "content after retained_ratio footer");
            r.validate();
            return r;
        }
        if (key != "meta") bad_result(path, "expected 'meta' or 'retained_ratio', got '" + key + "'");

        GroupResult g;
        std::string k1, k2, k3, k4;
        if (!(ls >> g.group_id >> k1 >> g.video_tokens >> k2 >> g.pooled_audio_tokens >>
              k3 >> g.rho_video >> k4 >> g.rho_audio) ||
            k1 != "n_video" || k2 != "pooled_audio" || k3 != "rho_video" || k4 != "rho_audio") {
            bad_result(path, "malformed meta line");
        }
        auto read_group_line = [&](const char* modality) -> std::vector<std::size_t> {
            auto gl = next_line("group line");
            expect_key(gl, "group");
            std::size_t id;
            std::string mod;
            std::size_t k;
            if (!(gl >> id >> mod >> k) || id != g.group_id || mod != modality) {
                bad_result(path, std::string("malformed group ") + modality + " line");
            }
            std::vector<std::size_t> idx;
            idx.reserve(std::min<std::size_t>(k, 65536)); // k is untrusted
            for (std::size_t i = 0; i < k; ++i) {
                std::size_t v;
                if (!(gl >> v)) bad_result(path, "group line lists fewer indices than its count");
                idx.push_back(v);
            }
            std::string extra;
            if (gl >> extra) bad_result(path, "group line lists more indices than its count");
            return idx;
        };
        g.video_indices = read_group_line("video");
        g.audio_indices = read_group_line("audio");
        r.groups.push_back(std::move(g));
    }
    bad_result(path, "missing retained_ratio footer");
}

} // namespace omniselect
