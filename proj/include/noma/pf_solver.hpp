#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "noma/errors.hpp"
#include "noma/rate_model.hpp"
#include "noma/scenario.hpp"

namespace noma {

/// Analytic sandwich from the column sums of B: the spectral radius of a
/// nonnegative matrix lies between the smallest and largest column sum,
///   lambda_lo = (1/P_T) * sum_k 1/g_k   (column K)
///   lambda_hi = K - 1 + lambda_lo       (column 1),
/// and the rate bounds follow by monotonicity of rate_from_lambda.
struct SpectralBounds {
    double lambda_lo;
    double lambda_hi;
    double rate_lo;
    double rate_hi;
};

/// One row of the solve trace. Record 0 is the equal-power starting point;
/// delta_min_rate is NaN there and |R_min^(i) - R_min^(i-1)| afterwards.
struct IterationRecord {
    std::size_t iteration;
    double min_rate;
    double rate_spread;
    double delta_min_rate;
};

struct SolveResult {
    PowerAllocation allocation;
    double fairness_rate;
    double lambda_pf;
    std::size_t iterations;
    bool converged;
    SpectralBounds bounds;
    std::vector<IterationRecord> trace;
};

/// Least-squares line through (x, y) with the coefficient of determination.
struct LinearFit {
    double slope;
    double intercept;
    double r_squared;
};

/// Geometric decay of the error trace on a log10 plot: ratio = 10^slope of
/// the fitted line, points = number of trace entries the fit used.
struct ConvergenceFit {
    double ratio;
    double r_squared;
    std::size_t points;
};

/// R = log2(1 + 1/lambda); strictly decreasing, so rate and eigenvalue
/// bounds translate into each other with endpoints swapped.
inline double rate_from_lambda(double lambda) {
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        throw ValidationError("rate_from_lambda: lambda must be finite and > 0, got " +
                              std::to_string(lambda));
    }
    return std::log2(1.0 + 1.0 / lambda);
}

/// The matvec B*x = A*x + b*(1^T x) in O(K) without materializing B:
/// (A*x)_k is a prefix sum and b_k = 1/(P_T*g_k). Output is strictly
/// positive for nonnegative nonzero x (every entry of B is positive).
inline std::vector<double> apply_B(const Scenario& s, std::span<const double> x) {
    if (x.size() != s.num_users()) {
        throw ValidationError("apply_B: expected vector of length " +
                              std::to_string(s.num_users()) + ", got " +
                              std::to_string(x.size()));
    }
    const auto& g = s.gains();
    double total = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) throw ValidationError("apply_B: input vector must be finite");
        total += v;
    }
    const double scale = total / s.total_power();
    std::vector<double> out(x.size());
    double prefix = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        out[k] = prefix + scale / g[k];
        prefix += x[k];
    }
    return out;
}

inline SpectralBounds pf_bounds(const Scenario& s) {
    const auto& g = s.gains();
    double inv_sum = 0.0;
    for (double gk : g) inv_sum += 1.0 / gk;
    SpectralBounds b;
    b.lambda_lo = inv_sum / s.total_power();
    b.lambda_hi = static_cast<double>(s.num_users() - 1) + b.lambda_lo;
    b.rate_lo = rate_from_lambda(b.lambda_hi);
    b.rate_hi = rate_from_lambda(b.lambda_lo);
    return b;
}

/// Normalized power iteration on B: P <- B*P scaled back to sum P_T, from
/// the equal-power start P_k = P_T/K. Stops once the min-rate change drops
/// below tolerance AND the rate spread is within tolerance; the spread
/// bounds |R_min - R*| at every iterate (Collatz-Wielandt quotients of B
/// bracket lambda_pf), so the stop certifies the reported accuracy rather
/// than inferring it from stagnation. iterations counts update steps, so
/// the trace has iterations + 1 records.
///
/// Non-convergence within max_iterations is reported via converged=false
/// with the best iterate kept; R_min is non-decreasing along the
/// iteration, so the last iterate is the best one.
inline SolveResult solve_power_iteration(const Scenario& s, double tolerance,
                                         std::size_t max_iterations = 10000) {
    if (!std::isfinite(tolerance) || tolerance <= 0.0) {
        throw ValidationError("solve_power_iteration: tolerance must be finite and > 0, got " +
                              std::to_string(tolerance));
    }
    if (max_iterations == 0) {
        throw ValidationError("solve_power_iteration: max_iterations must be >= 1");
    }

    const std::size_t K = s.num_users();
    SolveResult result;
    result.bounds = pf_bounds(s);

    if (K == 1) {
        // B is the 1x1 matrix [b_1]: any positive vector is the eigenvector
        // and the closed form needs no iteration.
        result.allocation = PowerAllocation{{s.total_power()}};
        RateVector rates = noma_rates(s, result.allocation);
        result.fairness_rate = rates.rates[0];
        result.lambda_pf = result.bounds.lambda_lo;
        result.iterations = 0;
        result.converged = true;
        result.trace.push_back({0, result.fairness_rate, 0.0,
                                std::numeric_limits<double>::quiet_NaN()});
        return result;
    }

    PowerAllocation alloc;
    alloc.powers.assign(K, s.total_power() / static_cast<double>(K));
    std::vector<double> z = apply_B(s, alloc.powers);

    RateVector rates = noma_rates(s, alloc);
    double rate_min = rates.rates[0];
    double rate_max = rates.rates[0];
    for (double r : rates.rates) {
        rate_min = std::min(rate_min, r);
        rate_max = std::max(rate_max, r);
    }
    result.trace.push_back({0, rate_min, rate_max - rate_min,
                            std::numeric_limits<double>::quiet_NaN()});

    double prev_min = rate_min;
    result.converged = false;
    result.iterations = 0;
    for (std::size_t i = 1; i <= max_iterations; ++i) {
        double z_sum = 0.0;
        for (double v : z) z_sum += v;
        const double norm = s.total_power() / z_sum;
        for (std::size_t k = 0; k < K; ++k) alloc.powers[k] = z[k] * norm;
        z = apply_B(s, alloc.powers);

        rates = noma_rates(s, alloc);
        rate_min = rates.rates[0];
        rate_max = rates.rates[0];
        for (double r : rates.rates) {
            rate_min = std::min(rate_min, r);
            rate_max = std::max(rate_max, r);
        }
        const double delta = std::abs(rate_min - prev_min);
        result.trace.push_back({i, rate_min, rate_max - rate_min, delta});
        result.iterations = i;
        if (delta < tolerance && rate_max - rate_min <= tolerance) {
            result.converged = true;
            break;
        }
        prev_min = rate_min;
    }

    result.allocation = std::move(alloc);
    result.fairness_rate = rate_min;
    // Inverting R = log2(1 + 1/lambda) at the achieved min rate keeps the
    // reported eigenvalue exactly consistent with the reported rate; it
    // equals the largest Collatz-Wielandt quotient of the final iterate.
    result.lambda_pf = 1.0 / (std::exp2(result.fairness_rate) - 1.0);
    return result;
}

namespace detail {

/// Trace tail used by the convergence diagnostics: the successive-change
/// column without its leading NaN, restricted to the last half (where the
/// iteration is in its asymptotic regime) and to entries above 1e-14
/// (below that, cancellation noise dominates).
inline std::vector<double> convergence_tail(std::span<const IterationRecord> trace) {
    std::vector<double> deltas;
    for (const auto& rec : trace) {
        if (std::isfinite(rec.delta_min_rate)) deltas.push_back(rec.delta_min_rate);
    }
    if (deltas.size() < 3) {
        throw ValidationError("convergence diagnostics need at least 3 successive changes, got " +
                              std::to_string(deltas.size()));
    }
    std::vector<double> tail;
    for (std::size_t i = deltas.size() / 2; i < deltas.size(); ++i) {
        if (deltas[i] > 1e-14) tail.push_back(deltas[i]);
    }
    return tail;
}

} // namespace detail

/// Empirical |lambda_2|/lambda_1: geometric mean of consecutive
/// successive-change ratios over the asymptotic tail of the trace.
inline double estimate_convergence_ratio(std::span<const IterationRecord> trace) {
    std::vector<double> tail = detail::convergence_tail(trace);
    if (tail.size() < 2) {
        throw ValidationError("estimate_convergence_ratio: trace tail too short (" +
                              std::to_string(tail.size()) + " usable entries)");
    }
    double log_sum = 0.0;
    for (std::size_t i = 1; i < tail.size(); ++i) {
        log_sum += std::log(tail[i] / tail[i - 1]);
    }
    return std::exp(log_sum / static_cast<double>(tail.size() - 1));
}

inline LinearFit least_squares_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ValidationError("least_squares_fit: length mismatch");
    }
    if (x.size() < 2) {
        throw ValidationError("least_squares_fit: need at least 2 points");
    }
    const double n = static_cast<double>(x.size());
    double x_mean = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x_mean += x[i];
        y_mean += y[i];
    }
    x_mean /= n;
    y_mean /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - x_mean) * (x[i] - x_mean);
        sxy += (x[i] - x_mean) * (y[i] - y_mean);
    }
    if (sxx == 0.0) {
        throw ValidationError("least_squares_fit: degenerate x values");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = y_mean - fit.slope * x_mean;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double resid = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += resid * resid;
        ss_tot += (y[i] - y_mean) * (y[i] - y_mean);
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

/// Linear-convergence check: least-squares line through log10(successive
/// change) vs iteration index on the asymptotic tail. A ratio near
/// estimate_convergence_ratio with r_squared near 1 is the signature of
/// geometric decay.
inline ConvergenceFit fit_log_convergence(std::span<const IterationRecord> trace) {
    std::vector<double> tail = detail::convergence_tail(trace);
    if (tail.size() < 3) {
        throw ValidationError("fit_log_convergence: trace tail too short (" +
                              std::to_string(tail.size()) + " usable entries)");
    }
    std::vector<double> xs(tail.size()), ys(tail.size());
    for (std::size_t i = 0; i < tail.size(); ++i) {
        xs[i] = static_cast<double>(i);
        ys[i] = std::log10(tail[i]);
    }
    LinearFit line = least_squares_fit(xs, ys);
    return ConvergenceFit{std::pow(10.0, line.slope), line.r_squared, tail.size()};
}

} // namespace noma
