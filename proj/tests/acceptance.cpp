// Acceptance suite. Each criterion prints exactly one PASS/FAIL line; the
// process exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "naive_ref.hpp"
#include "omniselect/allocation_oracle.hpp"
#include "omniselect/cost_model.hpp"
#include "omniselect/pipeline.hpp"
#include "omniselect/synthetic.hpp"

using namespace omniselect;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("%s %2d %-24s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    if (!ok) ++failures;
}

double uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

struct RandomInstance {
    std::vector<double> scores;
    std::vector<std::size_t> n;
    double eta;
};

RandomInstance random_instance(std::mt19937_64& gen, std::size_t max_groups) {
    static const double etas[] = {0.3, 0.45, 0.55, 0.7};
    RandomInstance inst;
    std::size_t count = 1 + gen() % max_groups;
    inst.scores.resize(count);
    inst.n.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        inst.scores[i] = (uniform(gen) - 0.5) * 20.0;
        inst.n[i] = 1 + gen() % 256;
    }
    inst.eta = etas[gen() % 4];
    return inst;
}

// --- criteria -------------------------------------------------------------

void criterion_allocation_budget() {
    std::mt19937_64 gen(1001);
    std::size_t worst_iters = 0;
    std::size_t violations = 0;
    auto start = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 1000; ++trial) {
        RandomInstance inst = random_instance(gen, 64);
        BudgetConfig cfg;
        cfg.eta = inst.eta;
        auto p = base_probabilities(inst.scores, cfg);
        RescaleResult r = rescale_to_budget(p, inst.n, cfg);
        worst_iters = std::max(worst_iters, r.iterations);
        bool met = std::abs(r.residual) <= cfg.budget_tol;
        bool saturated = true;
        for (double v : r.rho) {
            if (v != 0.0 && v != 1.0) saturated = false;
        }
        if (r.iterations > 32 || (!met && !saturated)) ++violations;
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "1000 instances, worst %zu iters, %zu violations, %.3fs", worst_iters,
                  violations, seconds);
    report(1, "allocation-budget", violations == 0 && seconds < 5.0, detail);
}

void criterion_oracle_equivalence() {
    // hand-traced fixture first
    std::vector<double> p_fix = {0.9, 0.1};
    std::vector<std::size_t> n_fix = {10, 10};
    BudgetConfig fix_cfg;
    fix_cfg.eta = 0.8;
    RescaleResult fix = rescale_to_budget(p_fix, n_fix, fix_cfg);
    bool fixture_ok = std::abs(fix.rho[0] - 1.0) < 1e-9 && std::abs(fix.rho[1] - 0.6) < 1e-9;
    auto oracle_fix = oracle_allocate(p_fix, n_fix, 0.8);
    fixture_ok = fixture_ok && std::abs(oracle_fix[0] - 1.0) < 1e-7 &&
                 std::abs(oracle_fix[1] - 0.6) < 1e-7;

    std::mt19937_64 gen(2002);
    std::size_t asserted = 0, mismatches = 0, non_unique = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        RandomInstance inst = random_instance(gen, 16);
        BudgetConfig cfg;
        cfg.eta = inst.eta;
        cfg.budget_tol = 1e-9; // drive the refinement to the oracle's precision
        auto p = base_probabilities(inst.scores, cfg);
        RescaleResult r = rescale_to_budget(p, inst.n, cfg);
        if (std::abs(r.residual) > cfg.budget_tol) continue;
        OracleComparison cmp = compare_with_oracle(p, inst.n, inst.eta, r.rho);
        if (!cmp.unique_fixpoint) {
            ++non_unique;
            continue;
        }
        ++asserted;
        if (cmp.max_component_gap > 1e-6) ++mismatches;
    }
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "fixture %s, %zu unique-fixpoint asserted, %zu mismatches, %zu non-unique reported",
                  fixture_ok ? "exact" : "WRONG", asserted, mismatches, non_unique);
    report(2, "oracle-equivalence", fixture_ok && mismatches == 0 && asserted > 0, detail);
}

void criterion_sigmoid_fixture() {
    std::vector<double> scores = {2.0, 0.0};
    BudgetConfig cfg;
    cfg.eta = 0.5;
    auto p = base_probabilities(scores, cfg);
    bool ok = std::abs(p[0] - 0.26894) <= 0.5e-5 && std::abs(p[1] - 0.73106) <= 0.5e-5;
    char detail[96];
    std::snprintf(detail, sizeof detail, "p = [%.5f, %.5f]", p[0], p[1]);
    report(3, "sigmoid-fixture", ok, detail);
}

void criterion_degenerate_fallback() {
    bool ok = true;
    for (double eta : {0.0, 0.3, 0.55, 1.0}) {
        BudgetConfig cfg;
        cfg.eta = eta;
        std::vector<double> flat(9, -4.2);
        for (double v : base_probabilities(flat, cfg)) ok = ok && v == eta;
    }
    report(4, "degenerate-fallback", ok, "flat scores give p_i == eta exactly");
}

void criterion_strategy_regions() {
    const double gaps[] = {0.0, 1.0, 2.0, 2.5, 3.0, 5.0, 5.5, 8.0};
    const bool uniform_expected[] = {true, false, false, true, true, true, false, false};
    ThresholdPolicy policy;
    bool ok = true;
    std::string pattern;
    for (int i = 0; i < 8; ++i) {
        ModalityScores s;
        s.mean_video = 6.0 + gaps[i];
        s.mean_audio = 6.0;
        Strategy got = classify_strategy(s, policy);
        bool is_uniform = got == Strategy::Uniform;
        if (!is_uniform && got != Strategy::VideoCentric) ok = false;
        if (is_uniform != uniform_expected[i]) ok = false;
        pattern += is_uniform ? 'U' : 'C';
    }
    report(5, "strategy-regions", ok, "pattern " + pattern + " (want UCCUUUCC)");
}

void criterion_selection_correctness() {
    std::mt19937_64 gen(3003);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t n = 1 + gen() % 12;
        std::vector<float> scores(n);
        for (float& s : scores) {
            s = static_cast<float>(gen() % 10) / 10.0f; // ties likely
        }
        double rho = static_cast<double>(gen() % 101) / 100.0;
        std::size_t k = retained_count(rho, n);
        if (select_audio(scores, rho).indices != naive::select<float>(scores, k, true)) {
            ++mismatches;
        }
        if (select_video(scores, rho).indices != naive::select<float>(scores, k, false)) {
            ++mismatches;
        }
    }
    bool fixtures = retained_count(0.5, (25 + 1) / 2) == 6 && retained_count(0.55, 100) == 45;
    char detail[96];
    std::snprintf(detail, sizeof detail, "%zu mismatches over 1000 selections, fixtures %s",
                  mismatches, fixtures ? "hold" : "WRONG");
    report(6, "selection-correctness", mismatches == 0 && fixtures, detail);
}

SyntheticInstance large_instance() {
    return generate_synthetic(7007, 128, 144, 25, 32, Regime::balanced);
}

void criterion_retained_ratio(const SyntheticInstance& inst, const PruneResult& result,
                              double seconds) {
    std::size_t video_total = 0, pooled_total = 0, video_kept = 0, audio_kept = 0;
    for (const auto& g : result.groups) {
        video_total += g.video_tokens;
        pooled_total += g.pooled_audio_tokens;
        video_kept += g.video_indices.size();
        audio_kept += g.audio_indices.size();
    }
    double groups = static_cast<double>(result.groups.size());
    double video_fraction = static_cast<double>(video_kept) / static_cast<double>(video_total);
    double audio_fraction = static_cast<double>(audio_kept) / static_cast<double>(pooled_total);
    double video_bound = groups / static_cast<double>(video_total);
    double audio_bound = groups / static_cast<double>(pooled_total);
    bool ok = std::abs(video_fraction - 0.3) <= video_bound &&
              std::abs(audio_fraction - 0.3) <= audio_bound && seconds < 1.0 &&
              inst.spec.group_count() == 128;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "video %.5f (bound %.5f), audio %.5f (bound %.5f), %.3fs single-threaded",
                  std::abs(video_fraction - 0.3), video_bound, std::abs(audio_fraction - 0.3),
                  audio_bound, seconds);
    report(7, "retained-ratio", ok, detail);
}

void criterion_planted_signals(const SyntheticInstance& inst, const PruneResult& result) {
    std::size_t dup_total = 0, dup_pruned = 0, hot_total = 0, hot_kept = 0;
    for (std::size_t g = 0; g < result.groups.size(); ++g) {
        const auto& retained_video = result.groups[g].video_indices;
        for (std::size_t idx : inst.truth.duplicate_video[g]) {
            ++dup_total;
            if (!std::binary_search(retained_video.begin(), retained_video.end(), idx)) {
                ++dup_pruned;
            }
        }
        const auto& retained_audio = result.groups[g].audio_indices;
        for (std::size_t idx : inst.truth.hot_audio[g]) {
            ++hot_total;
            if (std::binary_search(retained_audio.begin(), retained_audio.end(), idx)) {
                ++hot_kept;
            }
        }
    }
    double dup_fraction = static_cast<double>(dup_pruned) / static_cast<double>(dup_total);
    double hot_fraction = static_cast<double>(hot_kept) / static_cast<double>(hot_total);
    char detail[128];
    std::snprintf(detail, sizeof detail, "%.4f of %zu duplicates pruned, %.4f of %zu hot kept",
                  dup_fraction, dup_total, hot_fraction, hot_total);
    report(8, "planted-signals", dup_fraction >= 0.95 && hot_fraction >= 0.95, detail);
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in.good()) return {};
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void criterion_golden() {
    SyntheticInstance inst =
        generate_synthetic(4242, 6, 24, 10, 16, Regime::video_heavy);
    PipelineConfig cfg;
    cfg.eta_video = 0.55;
    cfg.eta_audio = 0.55;
    cfg.logit_scale = inst.truth.logit_scale;
    cfg.pool_factor = inst.truth.pool_factor;

    fs::path dir = fs::temp_directory_path() / "omniselect-acceptance";
    fs::create_directories(dir);
    fs::path run1 = dir / "golden1.txt";
    fs::path run2 = dir / "golden2.txt";
    write_prune_result(run_pipeline(inst.bundle, inst.spec, cfg), run1);
    write_prune_result(run_pipeline(inst.bundle, inst.spec, cfg), run2);

    std::string bytes1 = file_bytes(run1);
    bool deterministic = !bytes1.empty() && bytes1 == file_bytes(run2);
    std::string golden = file_bytes(fs::path(OMNISELECT_TEST_DIR) / "golden" /
                                    "expected_result.txt");
    bool matches = bytes1 == golden;
    char detail[96];
    std::snprintf(detail, sizeof detail, "runs %s, golden %s",
                  deterministic ? "identical" : "DIFFER", matches ? "matched" : "MISSED");
    report(9, "determinism-golden", deterministic && matches, detail);
}

void criterion_cost_model() {
    std::vector<std::size_t> before = {12000};
    std::vector<std::size_t> at30 = {3600};  // 30% retention
    std::vector<std::size_t> at45 = {5400};  // 45% retention
    std::vector<std::size_t> half = {6000};
    double s30 = estimate_cost(before, at30).estimated_speedup;
    double s45 = estimate_cost(before, at45).estimated_speedup;
    double s_half = estimate_cost(before, half).estimated_speedup;
    bool ok = s30 > s45 && s45 > 1.0 && s_half == 4.0;
    char detail[96];
    std::snprintf(detail, sizeof detail, "speedup 30%% %.3f > 45%% %.3f > 1, halving %.1f",
                  s30, s45, s_half);
    report(10, "cost-model", ok, detail);
}

} // namespace

int main() {
    criterion_allocation_budget();
    criterion_oracle_equivalence();
    criterion_sigmoid_fixture();
    criterion_degenerate_fallback();
    criterion_strategy_regions();
    criterion_selection_correctness();

    SyntheticInstance large = large_instance();
    PipelineConfig cfg;
    cfg.eta_video = 0.7;
    cfg.eta_audio = 0.7;
    cfg.logit_scale = large.truth.logit_scale;
    cfg.pool_factor = large.truth.pool_factor;
    auto start = std::chrono::steady_clock::now();
    PruneResult result = run_pipeline(large.bundle, large.spec, cfg);
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    criterion_retained_ratio(large, result, seconds);
    criterion_planted_signals(large, result);

    criterion_golden();
    criterion_cost_model();

    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
