#include "omniselect/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace omniselect {

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::video_heavy: return "video-heavy";
        case Regime::audio_heavy: return "audio-heavy";
        case Regime::balanced: return "balanced";
    }
    return "balanced";
}

Regime regime_from_name(const std::string& name) {
    if (name == "video-heavy") return Regime::video_heavy;
    if (name == "audio-heavy") return Regime::audio_heavy;
    if (name == "balanced") return Regime::balanced;
    throw ValidationError("unknown regime: " + name);
}

namespace {

constexpr double kLogitScale = 10.0;
constexpr double kAudioLogitMargin = 6.0;
constexpr double kDuplicateFraction = 0.2;
constexpr std::size_t kPoolFactor = 2;

std::vector<double> random_direction(SyntheticRng& rng, std::size_t dim) {
    while (true) {
        std::vector<double> v(dim);
        double norm_sq = 0.0;
        for (double& x : v) {
            x = rng.normal();
            norm_sq += x * x;
        }
        if (norm_sq > 1e-12) {
            double inv = 1.0 / std::sqrt(norm_sq);
            for (double& x : v) x *= inv;
            return v;
        }
    }
}

// Unit vector orthogonal to `axis` (itself unit length).
std::vector<double> random_perpendicular(SyntheticRng& rng, const std::vector<double>& axis) {
    while (true) {
        std::vector<double> v(axis.size());
        for (double& x : v) x = rng.normal();
        double along = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) along += v[i] * axis[i];
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] -= along * axis[i];
            norm_sq += v[i] * v[i];
        }
        if (norm_sq > 1e-12) {
            double inv = 1.0 / std::sqrt(norm_sq);
            for (double& x : v) x *= inv;
            return v;
        }
    }
}

// Zero-mean per-frame wiggle so planted means survive averaging exactly.
std::vector<double> centered_wiggle(SyntheticRng& rng, std::size_t count, double amplitude) {
    std::vector<double> w(count);
    double mean = 0.0;
    for (double& x : w) {
        x = rng.uniform(-1.0, 1.0);
        mean += x;
    }
    mean /= static_cast<double>(count);
    for (double& x : w) x = (x - mean) * amplitude;
    return w;
}

// Rows with cosine c against the axis: c * axis + sqrt(1 - c^2) * unit perp.
void fill_clip_rows(SyntheticRng& rng, Tensor& out, const std::vector<double>& axis,
                    const std::vector<double>& cosines) {
    std::size_t dim = axis.size();
    for (std::size_t f = 0; f < cosines.size(); ++f) {
        std::vector<double> perp = random_perpendicular(rng, axis);
        double c = cosines[f];
        double s = std::sqrt(1.0 - c * c);
        float* row = out.data() + f * dim;
        for (std::size_t d = 0; d < dim; ++d) {
            row[d] = static_cast<float>(c * axis[d] + s * perp[d]);
        }
    }
}

std::vector<std::size_t> pick_distinct(SyntheticRng& rng, std::vector<std::size_t> pool,
                                       std::size_t count) {
    count = std::min(count, pool.size());
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t j = i + rng.index(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace

SyntheticInstance generate_synthetic(std::uint64_t seed, std::size_t groups,
                                     std::size_t video_tokens_per_group,
                                     std::size_t audio_tokens_per_group, std::size_t dim,
                                     Regime regime) {
    if (groups == 0) throw ValidationError("generate_synthetic: need at least one group");
    if (video_tokens_per_group == 0 || audio_tokens_per_group == 0) {
        throw ValidationError("generate_synthetic: token counts must be positive");
    }
    if (dim < 2) throw ValidationError("generate_synthetic: dim must be >= 2");

    SyntheticRng rng(seed);
    SyntheticInstance inst;
    TruthSidecar& truth = inst.truth;
    truth.seed = seed;
    truth.regime = regime;
    truth.logit_scale = kLogitScale;
    truth.pool_factor = kPoolFactor;
    truth.audio_logit_margin = kAudioLogitMargin;

    double mean_video = 0.0, mean_audio = 0.0;
    switch (regime) {
        case Regime::video_heavy:
            mean_video = 0.55;
            mean_audio = 0.45;
            truth.expected_strategy = Strategy::VideoCentric;
            break;
        case Regime::audio_heavy:
            mean_video = 0.45;
            mean_audio = 0.55;
            truth.expected_strategy = Strategy::AudioCentric;
            break;
        case Regime::balanced:
            mean_video = 0.55;
            mean_audio = 0.25;
            truth.expected_strategy = Strategy::Uniform;
            break;
    }
    truth.planted_gap = std::abs(mean_video - mean_audio) * kLogitScale;

    std::vector<double> text_axis = random_direction(rng, dim);
    inst.bundle.text_clip.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        inst.bundle.text_clip[d] = static_cast<float>(text_axis[d]);
    }

    std::vector<double> cos_video(groups, mean_video);
    std::vector<double> cos_audio(groups, mean_audio);
    std::vector<double> wiggle_v = centered_wiggle(rng, groups, 0.12);
    std::vector<double> wiggle_a = centered_wiggle(rng, groups, 0.12);
    for (std::size_t g = 0; g < groups; ++g) {
        cos_video[g] += wiggle_v[g];
        cos_audio[g] += wiggle_a[g];
    }

    inst.bundle.video_clip = Tensor({groups, dim});
    inst.bundle.audio_clip = Tensor({groups, dim});
    fill_clip_rows(rng, inst.bundle.video_clip, text_axis, cos_video);
    fill_clip_rows(rng, inst.bundle.audio_clip, text_axis, cos_audio);

    // Backbone-space video tokens with duplicate clusters planted per group.
    std::size_t total_video = groups * video_tokens_per_group;
    inst.bundle.video_emb = Tensor({total_video, dim});
    truth.duplicate_video.resize(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        float* base = inst.bundle.video_emb.data() + g * video_tokens_per_group * dim;
        for (std::size_t t = 0; t < video_tokens_per_group; ++t) {
            for (std::size_t d = 0; d < dim; ++d) {
                base[t * dim + d] = static_cast<float>(rng.normal());
            }
        }
        if (video_tokens_per_group < 2) continue;
        std::size_t dup_count = std::max<std::size_t>(
            1, static_cast<std::size_t>(kDuplicateFraction *
                                        static_cast<double>(video_tokens_per_group)));
        std::size_t anchor = rng.index(video_tokens_per_group);
        std::vector<std::size_t> candidates;
        candidates.reserve(video_tokens_per_group - 1);
        for (std::size_t t = 0; t < video_tokens_per_group; ++t) {
            if (t != anchor) candidates.push_back(t);
        }
        std::vector<std::size_t> dups = pick_distinct(rng, std::move(candidates), dup_count);
        for (std::size_t t : dups) {
            std::copy(base + anchor * dim, base + (anchor + 1) * dim, base + t * dim);
        }
        truth.duplicate_video[g] = std::move(dups);
    }

    // Audio projections: per group, queries share a direction and planted
    // pooled positions get keys aligned with it, so their received
    // attention dominates by ~kAudioLogitMargin logits.
    std::size_t total_audio = groups * audio_tokens_per_group;
    AudioQk qk;
    qk.q = Tensor({total_audio, dim});
    qk.k = Tensor({total_audio, dim});
    truth.hot_audio.resize(groups);
    double query_gain = std::sqrt(static_cast<double>(dim));
    for (std::size_t g = 0; g < groups; ++g) {
        std::vector<double> axis = random_direction(rng, dim);
        float* q_base = qk.q.data() + g * audio_tokens_per_group * dim;
        float* k_base = qk.k.data() + g * audio_tokens_per_group * dim;
        for (std::size_t t = 0; t < audio_tokens_per_group; ++t) {
            for (std::size_t d = 0; d < dim; ++d) {
                q_base[t * dim + d] =
                    static_cast<float>(query_gain * axis[d] + 0.3 * rng.normal());
                k_base[t * dim + d] = static_cast<float>(rng.normal());
            }
        }
        std::size_t pooled = (audio_tokens_per_group + kPoolFactor - 1) / kPoolFactor;
        std::size_t hot_count = 1;
        std::size_t budget = static_cast<std::size_t>(0.3 * static_cast<double>(pooled));
        if (budget > 1) hot_count = budget - 1;
        std::vector<std::size_t> all_pooled(pooled);
        for (std::size_t i = 0; i < pooled; ++i) all_pooled[i] = i;
        std::vector<std::size_t> hot = pick_distinct(rng, std::move(all_pooled), hot_count);
        for (std::size_t p : hot) {
            std::size_t begin = p * kPoolFactor;
            std::size_t end = std::min(begin + kPoolFactor, audio_tokens_per_group);
            for (std::size_t t = begin; t < end; ++t) {
                for (std::size_t d = 0; d < dim; ++d) {
                    k_base[t * dim + d] = static_cast<float>(kAudioLogitMargin * axis[d]);
                }
            }
        }
        truth.hot_audio[g] = std::move(hot);
    }
    inst.bundle.audio_qk = std::move(qk);

    inst.spec.groups.reserve(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        inst.spec.groups.push_back({g, video_tokens_per_group, audio_tokens_per_group, g});
    }
    return inst;
}

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    out += buf;
}

void write_planted_lines(std::string& out, const char* key,
                         const std::vector<std::vector<std::size_t>>& planted) {
    for (std::size_t g = 0; g < planted.size(); ++g) {
        out += key;
        out += " " + std::to_string(g) + " " + std::to_string(planted[g].size());
        for (std::size_t idx : planted[g]) out += " " + std::to_string(idx);
        out += "\n";
    }
}

} // namespace

void write_truth(const TruthSidecar& truth, const std::filesystem::path& path) {
    if (truth.duplicate_video.size() != truth.hot_audio.size()) {
        throw ValidationError("truth sidecar: planted lists disagree on group count");
    }
    std::string out = "truth v1\n";
    out += "seed " + std::to_string(truth.seed) + "\n";
    out += std::string("regime ") + regime_name(truth.regime) + "\n";
    out += "logit_scale ";
    append_double(out, truth.logit_scale);
    out += "\npool_factor " + std::to_string(truth.pool_factor) + "\n";
    out += std::string("expected_strategy ") + strategy_name(truth.expected_strategy) + "\n";
    out += "planted_gap ";
    append_double(out, truth.planted_gap);
    out += "\naudio_logit_margin ";
    append_double(out, truth.audio_logit_margin);
    out += "\ngroups " + std::to_string(truth.duplicate_video.size()) + "\n";
    write_planted_lines(out, "dup_video", truth.duplicate_video);
    write_planted_lines(out, "hot_audio", truth.hot_audio);
    out += "end\n";

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failure on " + path.string());
}

TruthSidecar read_truth(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    std::istringstream in(buf.str());

    auto fail = [&](const std::string& what) -> void {
        throw FormatError(FormatError::Kind::malformed_text, path.string() + ": " + what);
    };
    std::string word;
    std::string version;
    if (!(in >> word >> version) || word != "truth" || version != "v1") {
        fail("expected header 'truth v1'");
    }
    TruthSidecar truth;
    auto expect = [&](const char* key) {
        if (!(in >> word) || word != key) fail(std::string("expected key ") + key);
    };
    expect("seed");
    in >> truth.seed;
    expect("regime");
    std::string name;
    in >> name;
    truth.regime = regime_from_name(name);
    expect("logit_scale");
    in >> truth.logit_scale;
    expect("pool_factor");
    in >> truth.pool_factor;
    expect("expected_strategy");
    in >> name;
    truth.expected_strategy = strategy_from_name(name);
    expect("planted_gap");
    in >> truth.planted_gap;
    expect("audio_logit_margin");
    in >> truth.audio_logit_margin;
    expect("groups");
    std::size_t groups = 0;
    in >> groups;
    if (!in) fail("malformed scalar field");
    if (groups > 1000000) fail("implausible group count");

    auto read_planted = [&](const char* key) {
        std::vector<std::vector<std::size_t>> planted(groups);
        for (std::size_t g = 0; g < groups; ++g) {
            std::size_t gid = 0, count = 0;
            expect(key);
            if (!(in >> gid >> count) || gid != g) fail(std::string("malformed ") + key + " line");
            planted[g].reserve(std::min<std::size_t>(count, 65536)); // count is untrusted
            for (std::size_t i = 0; i < count; ++i) {
                std::size_t v;
                if (!(in >> v)) fail(std::string("truncated ") + key + " line");
                planted[g].push_back(v);
            }
        }
        return planted;
    };
    truth.duplicate_video = read_planted("dup_video");
    truth.hot_audio = read_planted("hot_audio");
    expect("end");
    return truth;
}

Tensor pack_audio_qk(const AudioQk& qk) {
    std::size_t n = qk.q.rows();
    std::size_t dim = qk.q.cols();
    if (qk.k.rows() != n || qk.k.cols() != dim) {
        throw ValidationError("pack_audio_qk: q and k shapes disagree");
    }
    std::vector<float> data;
    data.reserve(2 * n * dim);
    data.insert(data.end(), qk.q.data(), qk.q.data() + n * dim);
    data.insert(data.end(), qk.k.data(), qk.k.data() + n * dim);
    return Tensor({2, n, dim}, std::move(data));
}

AudioQk unpack_audio_qk(const Tensor& packed) {
    if (packed.rank() != 3 || packed.extent(0) != 2) {
        throw ValidationError("audio q/k tensor must have shape [2, tokens, dim]");
    }
    std::size_t n = packed.extent(1);
    std::size_t dim = packed.extent(2);
    AudioQk qk;
    qk.q = Tensor({n, dim}, {packed.data(), packed.data() + n * dim});
    qk.k = Tensor({n, dim}, {packed.data() + n * dim, packed.data() + 2 * n * dim});
    return qk;
}

void write_instance_dir(const SyntheticInstance& inst, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    InstancePaths paths(dir);
    write_tensor(inst.bundle.video_clip, paths.video_clip);
    write_tensor(inst.bundle.audio_clip, paths.audio_clip);
    Tensor text({inst.bundle.text_clip.size()}, inst.bundle.text_clip);
    write_tensor(text, paths.text_clip);
    write_tensor(inst.bundle.video_emb, paths.video_emb);
    if (!inst.bundle.audio_qk) {
        throw ValidationError("write_instance_dir: synthetic instances carry audio q/k");
    }
    write_tensor(pack_audio_qk(*inst.bundle.audio_qk), paths.audio_qk);
    write_group_spec(inst.spec, paths.groups);
    write_truth(inst.truth, paths.truth);
}

SyntheticInstance read_instance_dir(const std::filesystem::path& dir) {
    InstancePaths paths(dir);
    SyntheticInstance inst;
    inst.bundle.video_clip = read_tensor(paths.video_clip);
    inst.bundle.audio_clip = read_tensor(paths.audio_clip);
    Tensor text = read_tensor(paths.text_clip);
    if (text.rank() != 1) {
        throw ValidationError("text embedding tensor must have rank 1");
    }
    inst.bundle.text_clip.assign(text.data(), text.data() + text.size());
    inst.bundle.video_emb = read_tensor(paths.video_emb);
    inst.bundle.audio_qk = unpack_audio_qk(read_tensor(paths.audio_qk));
    inst.spec = read_group_spec(paths.groups);
    inst.truth = read_truth(paths.truth);
    return inst;
}

} // namespace omniselect
