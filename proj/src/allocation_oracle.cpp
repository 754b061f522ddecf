#include "omniselect/allocation_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace omniselect {

std::vector<double> oracle_allocate(std::span<const double> p,
                                    std::span<const std::size_t> n, double eta) {
    if (p.size() != n.size()) {
        throw ValidationError("oracle_allocate: probability/count length mismatch");
    }
    if (p.empty()) throw ValidationError("oracle_allocate: empty input");
    if (eta < 0.0 || eta > 1.0) {
        throw ValidationError("oracle_allocate: infeasible budget, eta outside [0, 1]");
    }
    std::size_t count = p.size();

    double total = 0.0;
    double reachable = 0.0; // groups with p_i = 0 can never be pruned
    for (std::size_t i = 0; i < count; ++i) {
        total += static_cast<double>(n[i]);
        if (p[i] > 0.0) reachable += static_cast<double>(n[i]);
    }
    double expected = eta * total;

    std::vector<double> rho(count, 0.0);
    if (expected == 0.0) return rho;
    if (eta == 1.0) {
        if (reachable < total) {
            throw DegenerateInputError(
                "oracle_allocate: zero-probability groups make a full prune unreachable");
        }
        std::fill(rho.begin(), rho.end(), 1.0);
        return rho;
    }
    if (expected > reachable) {
        throw DegenerateInputError(
            "oracle_allocate: budget exceeds the clipped allocation ceiling");
    }

    auto filled = [&](double c) {
        double a = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            a += std::clamp(c * p[i], 0.0, 1.0) * static_cast<double>(n[i]);
        }
        return a;
    };

    double hi = 1.0;
    while (filled(hi) < expected) {
        hi *= 2.0;
        if (hi > 1e18) {
            throw InternalError("oracle_allocate: bisection bracket failed to close");
        }
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (filled(mid) < expected) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        rho[i] = std::clamp(hi * p[i], 0.0, 1.0);
    }
    return rho;
}

namespace {

std::size_t interior_count(std::span<const double> rho, std::span<const std::size_t> n) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (n[i] > 0 && rho[i] > 0.0 && rho[i] < 1.0) ++c;
    }
    return c;
}

bool saturated_sets_match(std::span<const double> a, std::span<const double> b,
                          std::span<const std::size_t> n) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (n[i] == 0) continue;
        if ((a[i] == 1.0) != (b[i] == 1.0)) return false;
        if ((a[i] == 0.0) != (b[i] == 0.0)) return false;
    }
    return true;
}

} // namespace

OracleComparison compare_with_oracle(std::span<const double> p,
                                     std::span<const std::size_t> n, double eta,
                                     std::span<const double> refined_rho) {
    OracleComparison cmp;
    cmp.oracle_rho = oracle_allocate(p, n, eta);
    for (std::size_t i = 0; i < refined_rho.size(); ++i) {
        cmp.max_component_gap =
            std::max(cmp.max_component_gap, std::abs(cmp.oracle_rho[i] - refined_rho[i]));
    }
    std::size_t eligible = 0;
    for (std::size_t ni : n) {
        if (ni > 0) ++eligible;
    }
    std::size_t free_oracle = interior_count(cmp.oracle_rho, n);
    std::size_t free_refined = interior_count(refined_rho, n);
    bool nothing_clipped = free_oracle == eligible && free_refined == eligible;
    bool pinned = free_oracle <= 1 && free_refined <= 1 &&
                  saturated_sets_match(cmp.oracle_rho, refined_rho, n);
    cmp.unique_fixpoint = nothing_clipped || pinned;
    return cmp;
}

} // namespace omniselect
