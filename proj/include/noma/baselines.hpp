#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "noma/errors.hpp"
#include "noma/pf_solver.hpp"
#include "noma/rate_model.hpp"
#include "noma/scenario.hpp"

namespace noma {

/// Output of the equal-rate stacking recursion: the cheapest powers that
/// give every user the same target rate, and their sum. The powers are not
/// a PowerAllocation because they may exceed the budget; comparing total
/// against P_T is exactly the bisection feasibility test.
struct PowerStack {
    double total;
    std::vector<double> powers;
};

/// A solved scheme: its max-min value and the allocation achieving it.
struct MaxMinSolution {
    double rate;
    PowerAllocation allocation;
};

/// Cheapest powers giving every user rate t, by forward recursion with
/// c = 2^t - 1:
///   P_1 = c/g_1,   P_k = c * (sum_{j<k} P_j + 1/g_k).
/// Each step is forced: user k's rate equals t with equality only at this
/// power, given the interference already stacked below. total is strictly
/// increasing and continuous in t.
inline PowerStack min_total_power_for_rate(const Scenario& s, double target_rate) {
    if (!std::isfinite(target_rate) || target_rate < 0.0) {
        throw ValidationError("min_total_power_for_rate: target rate must be finite and >= 0, got " +
                              std::to_string(target_rate));
    }
    const auto& g = s.gains();
    const double c = std::exp2(target_rate) - 1.0;
    std::vector<double> powers(g.size());
    double total = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        powers[k] = c * (total + 1.0 / g[k]);
        total += powers[k];
    }
    return PowerStack{total, std::move(powers)};
}

/// Max-min rate by bisection on the target rate over [0, rate_hi], the
/// analytic interval that contains the optimum. A rate t fits the budget
/// iff min_total_power_for_rate(s, t).total <= P_T; monotonicity of the
/// stacking total makes the predicate monotone, so halving converges
/// unconditionally. Stops when the bracket is narrower than tolerance and
/// returns its midpoint, with the recursion's powers rescaled to spend the
/// whole budget.
///
/// Trace rows reuse IterationRecord with bisection semantics: min_rate is
/// the midpoint tested at that halving and rate_spread is the bracket
/// width after it. iterations counts halvings. converged only goes false
/// if the bracket collapses to adjacent doubles before reaching tolerance.
inline SolveResult solve_bisection(const Scenario& s, double tolerance) {
    if (!std::isfinite(tolerance) || tolerance <= 0.0) {
        throw ValidationError("solve_bisection: tolerance must be finite and > 0, got " +
                              std::to_string(tolerance));
    }

    SolveResult result;
    result.bounds = pf_bounds(s);

    if (s.num_users() == 1) {
        // Single user: the whole budget is optimal, no search needed.
        result.allocation = PowerAllocation{{s.total_power()}};
        result.fairness_rate = noma_rates(s, result.allocation).rates[0];
        result.lambda_pf = result.bounds.lambda_lo;
        result.iterations = 0;
        result.converged = true;
        result.trace.push_back({0, result.fairness_rate, 0.0,
                                std::numeric_limits<double>::quiet_NaN()});
        return result;
    }

    double lo = 0.0;
    double hi = result.bounds.rate_hi;
    double prev_mid = std::numeric_limits<double>::quiet_NaN();
    std::size_t halvings = 0;
    while (hi - lo >= tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // bracket endpoints are adjacent doubles
        ++halvings;
        if (min_total_power_for_rate(s, mid).total <= s.total_power()) {
            lo = mid;
        } else {
            hi = mid;
        }
        const double delta = std::isnan(prev_mid) ? std::numeric_limits<double>::quiet_NaN()
                                                  : std::abs(mid - prev_mid);
        result.trace.push_back({halvings, mid, hi - lo, delta});
        prev_mid = mid;
    }

    result.iterations = halvings;
    result.converged = hi - lo < tolerance;
    result.fairness_rate = 0.5 * (lo + hi);
    result.lambda_pf = 1.0 / (std::exp2(result.fairness_rate) - 1.0);

    PowerStack stack = min_total_power_for_rate(s, result.fairness_rate);
    const double rescale = s.total_power() / stack.total;
    for (double& p : stack.powers) p *= rescale;
    result.allocation = PowerAllocation{std::move(stack.powers)};
    return result;
}

/// Every user gets P_T/K. Summing K copies of the rounded quotient can
/// drift from P_T by a few ulps, well inside the allocation slack.
inline PowerAllocation equal_power(const Scenario& s) {
    const double share = s.total_power() / static_cast<double>(s.num_users());
    return PowerAllocation{std::vector<double>(s.num_users(), share)};
}

/// Max-min under the orthogonal model has a closed form: equal FDMA rates
/// at full budget require K*P_k*g_k constant, and spending P_T pins the
/// constant at c = K*P_T / sum_j 1/g_j, so
///   t = (1/K) * log2(1 + c),   P_k = c / (K*g_k).
inline MaxMinSolution solve_oma_maxmin(const Scenario& s) {
    const auto& g = s.gains();
    const double K = static_cast<double>(s.num_users());
    double inv_sum = 0.0;
    for (double gk : g) inv_sum += 1.0 / gk;
    const double c = K * s.total_power() / inv_sum;
    std::vector<double> powers(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) powers[k] = c / (K * g[k]);
    return MaxMinSolution{std::log2(1.0 + c) / K, PowerAllocation{std::move(powers)}};
}

/// Brute-force reference for desk-scale instances: enumerate the simplex
/// {sum P = P_T, P >= 0} on a grid with step resolution*P_T per coordinate
/// and keep the point with the best min NOMA rate. Guard K <= 4; the grid
/// has C(n+K-1, K-1) points for n = round(1/resolution). Ties keep the
/// first point in lexicographic order of grid counts, so the result is
/// deterministic.
inline MaxMinSolution grid_search_oracle(const Scenario& s, double resolution) {
    if (!std::isfinite(resolution) || resolution <= 0.0 || resolution > 1.0) {
        throw ValidationError("grid_search_oracle: resolution must be in (0, 1], got " +
                              std::to_string(resolution));
    }
    if (s.num_users() > 4) {
        throw ValidationError("grid_search_oracle: refusing K = " +
                              std::to_string(s.num_users()) +
                              " (exhaustive search is limited to K <= 4)");
    }
    const std::size_t K = s.num_users();
    const long n = std::lround(1.0 / resolution);
    const double step = s.total_power() / static_cast<double>(n);

    PowerAllocation candidate;
    candidate.powers.assign(K, 0.0);
    double best_rate = -1.0;
    std::vector<double> best(K, 0.0);

    // Compositions of n into K parts, earlier coordinates ascending and
    // the last coordinate absorbing the rest, so every point sums to n.
    auto walk = [&](auto&& self, std::size_t level, long remaining) -> void {
        if (level + 1 == K) {
            candidate.powers[level] = static_cast<double>(remaining) * step;
            const double r = min_rate(noma_rates(s, candidate));
            if (r > best_rate) {
                best_rate = r;
                best = candidate.powers;
            }
            return;
        }
        for (long c = 0; c <= remaining; ++c) {
            candidate.powers[level] = static_cast<double>(c) * step;
            self(self, level + 1, remaining - c);
        }
    };
    walk(walk, 0, n);

    return MaxMinSolution{best_rate, PowerAllocation{std::move(best)}};
}

} // namespace noma
