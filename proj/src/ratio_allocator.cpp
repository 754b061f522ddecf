#include "omniselect/ratio_allocator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace omniselect {

void BudgetConfig::validate() const {
    if (eta < 0.0 || eta > 1.0) throw ValidationError("eta must lie in [0, 1]");
    if (tau <= 0.0) throw ValidationError("tau must be > 0");
    if (epsilon <= 0.0) throw ValidationError("epsilon must be > 0");
    if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
    if (budget_tol < 0.0) throw ValidationError("budget_tol must be >= 0");
}

std::vector<double> base_probabilities(std::span<const double> scores,
                                       const BudgetConfig& cfg) {
    cfg.validate();
    if (scores.empty()) throw ValidationError("base_probabilities: no scores");
    std::size_t count = scores.size();

    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(count);

    // population standard deviation; keeps the single-group case at zero
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    var /= static_cast<double>(count);
    double sigma = std::sqrt(var);

    std::vector<double> p(count);
    if (sigma <= cfg.epsilon) {
        std::fill(p.begin(), p.end(), cfg.eta);
        return p;
    }
    for (std::size_t i = 0; i < count; ++i) {
        double z = (scores[i] - mean) / (cfg.tau * sigma);
        p[i] = 1.0 / (1.0 + std::exp(z));
    }
    return p;
}

RescaleResult rescale_to_budget(std::span<const double> p,
                                std::span<const std::size_t> n,
                                const BudgetConfig& cfg) {
    cfg.validate();
    if (p.size() != n.size()) {
        throw ValidationError("rescale_to_budget: probability/count length mismatch");
    }
    if (p.empty()) throw ValidationError("rescale_to_budget: empty input");

    std::size_t count = p.size();
    double total = 0.0;
    for (std::size_t ni : n) total += static_cast<double>(ni);
    double expected = cfg.eta * total;

    RescaleResult out;
    out.rho.assign(count, 0.0);
    if (expected == 0.0) {
        out.achieved.push_back(0.0);
        return out;
    }

    double mass = 0.0;
    for (std::size_t i = 0; i < count; ++i) mass += p[i] * static_cast<double>(n[i]);
    if (mass == 0.0) {
        throw DegenerateInputError(
            "rescale_to_budget: zero probability mass with a non-zero budget");
    }

    auto achieved_total = [&] {
        double a = 0.0;
        for (std::size_t i = 0; i < count; ++i) a += out.rho[i] * static_cast<double>(n[i]);
        return a;
    };

    double scale = expected / mass;
    for (std::size_t i = 0; i < count; ++i) {
        out.rho[i] = std::clamp(p[i] * scale, 0.0, 1.0);
    }
    out.achieved.push_back(achieved_total());

    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        double deficit = expected - out.achieved.back();
        if (std::abs(deficit) <= cfg.budget_tol) break;

        double active_tokens = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            if (n[i] > 0 && out.rho[i] > 0.0 && out.rho[i] < 1.0) {
                active_tokens += static_cast<double>(n[i]);
            }
        }
        if (active_tokens == 0.0) break;

        double step = deficit / active_tokens;
        for (std::size_t i = 0; i < count; ++i) {
            if (n[i] > 0 && out.rho[i] > 0.0 && out.rho[i] < 1.0) {
                out.rho[i] = std::clamp(out.rho[i] + step, 0.0, 1.0);
            }
        }
        out.iterations = it + 1;
        out.achieved.push_back(achieved_total());
    }
    out.residual = expected - out.achieved.back();
    return out;
}

AllocationPlan allocate(std::span<const double> scores_video,
                        std::span<const double> scores_audio,
                        std::span<const std::size_t> tokens_video,
                        std::span<const std::size_t> tokens_audio,
                        Strategy strategy, const BudgetConfig& cfg_video,
                        const BudgetConfig& cfg_audio) {
    std::size_t count = tokens_video.size();
    if (scores_video.size() != count || scores_audio.size() != count ||
        tokens_audio.size() != count) {
        throw ValidationError("allocate: per-group list lengths disagree");
    }
    if (count == 0) throw ValidationError("allocate: no groups");
    cfg_video.validate();
    cfg_audio.validate();

    AllocationPlan plan;
    plan.strategy = strategy;

    auto uniform = [count](double eta) { return std::vector<double>(count, eta); };
    auto centric = [&](std::span<const double> scores, std::span<const std::size_t> n,
                       const BudgetConfig& cfg, double& residual) {
        std::vector<double> p = base_probabilities(scores, cfg);
        RescaleResult r = rescale_to_budget(p, n, cfg);
        residual = r.residual;
        return std::move(r.rho);
    };

    switch (strategy) {
        case Strategy::Uniform:
            plan.rho_video = uniform(cfg_video.eta);
            plan.rho_audio = uniform(cfg_audio.eta);
            break;
        case Strategy::VideoCentric:
            plan.rho_video = centric(scores_video, tokens_video, cfg_video, plan.residual_video);
            plan.rho_audio = uniform(cfg_audio.eta);
            break;
        case Strategy::AudioCentric:
            plan.rho_video = uniform(cfg_video.eta);
            plan.rho_audio = centric(scores_audio, tokens_audio, cfg_audio, plan.residual_audio);
            break;
    }

    plan.k_video.resize(count);
    plan.k_audio.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        plan.k_video[i] = retained_count(plan.rho_video[i], tokens_video[i]);
        plan.k_audio[i] = retained_count(plan.rho_audio[i], tokens_audio[i]);
    }
    return plan;
}

} // namespace omniselect
