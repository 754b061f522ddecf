// Micro/macro benchmark: times the pipeline and its dominant kernels on a
// seeded synthetic instance, once per available backend. Not a test; a
// development aid for judging dispatch gains.

#include <chrono>
#include <cstdio>
#include <vector>

#include "CLI11.hpp"

#include "omniselect/pipeline.hpp"
#include "omniselect/simd/kernels.hpp"
#include "omniselect/synthetic.hpp"
#include "omniselect/tgp2_pruner.hpp"

using namespace omniselect;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_kernels(std::size_t dim) {
    std::vector<float> a(dim), b(dim);
    SyntheticRng rng(1);
    for (std::size_t i = 0; i < dim; ++i) {
        a[i] = static_cast<float>(rng.normal());
        b[i] = static_cast<float>(rng.normal());
    }
    const int reps = 2000000;
    auto t0 = std::chrono::steady_clock::now();
    float sink = 0.0f;
    for (int r = 0; r < reps; ++r) sink += simd::dot(a.data(), b.data(), dim);
    double dt = seconds_since(t0);
    std::printf("  dot(d=%zu)      %8.2f M/s  (sink %.3f)\n", dim, reps / dt / 1e6,
                static_cast<double>(sink));

    std::vector<float> row(4096);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = a[i % dim];
    const int erep = 20000;
    t0 = std::chrono::steady_clock::now();
    float esink = 0.0f;
    for (int r = 0; r < erep; ++r) {
        auto copy = row;
        esink += simd::exp_bias_sum(copy.data(), copy.size(), -1.0f);
    }
    dt = seconds_since(t0);
    std::printf("  exp(n=4096)    %8.2f Melem/s\n", erep * 4096 / dt / 1e6);
    (void)esink;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"omniselect benchmark"};
    std::uint64_t seed = 7007;
    std::size_t groups = 128, video_tokens = 144, audio_tokens = 25, dim = 32;
    app.add_option("--seed", seed);
    app.add_option("--groups", groups);
    app.add_option("--video-tokens", video_tokens);
    app.add_option("--audio-tokens", audio_tokens);
    app.add_option("--dim", dim);
    CLI11_PARSE(app, argc, argv);

    SyntheticInstance inst =
        generate_synthetic(seed, groups, video_tokens, audio_tokens, dim, Regime::balanced);
    PipelineConfig cfg;
    cfg.eta_video = 0.7;
    cfg.eta_audio = 0.7;
    cfg.logit_scale = inst.truth.logit_scale;

    for (auto isa : {simd::IsaLevel::avx2, simd::IsaLevel::scalar}) {
        if (!simd::isa_supported(isa)) continue;
        simd::set_isa(isa);
        std::printf("%s:\n", simd::isa_name(isa));
        bench_kernels(dim);

        auto t0 = std::chrono::steady_clock::now();
        PruneResult result = run_pipeline(inst.bundle, inst.spec, cfg);
        double dt = seconds_since(t0);
        std::printf("  pipeline       %8.3f s   (%zu groups, %zu -> %zu tokens)\n", dt,
                    groups, result.tokens_before, result.tokens_after);
    }
    return 0;
}
