#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "noma/baselines.hpp"
#include "noma/errors.hpp"
#include "noma/pf_solver.hpp"
#include "noma/rate_model.hpp"
#include "noma/scenario.hpp"
#include "noma/table.hpp"

namespace noma {

namespace detail {

inline void check_positive_list(std::span<const double> values, const char* what) {
    if (values.empty()) {
        throw ValidationError(std::string(what) + ": list must be non-empty");
    }
    for (double v : values) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw ValidationError(std::string(what) + ": entries must be finite and > 0, got " +
                                  std::to_string(v));
        }
    }
}

inline SolveResult solve_power_or_throw(const Scenario& s, double tolerance) {
    SolveResult r = solve_power_iteration(s, tolerance);
    if (!r.converged) {
        throw NotConvergedError("power iteration did not converge within " +
                                std::to_string(r.iterations) + " iterations at tolerance " +
                                format_double(tolerance));
    }
    return r;
}

inline SolveResult solve_bisection_or_throw(const Scenario& s, double tolerance) {
    SolveResult r = solve_bisection(s, tolerance);
    if (!r.converged) {
        throw NotConvergedError("bisection bracket collapsed before reaching tolerance " +
                                format_double(tolerance));
    }
    return r;
}

inline std::string format_double_list(std::span<const double> values) {
    std::string text;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) text += ',';
        text += format_double(values[i]);
    }
    return text;
}

} // namespace detail

/// Per-iteration progress of both methods on one instance: columns
/// [iteration, method, R_min, abs_error_vs_Rstar]. For the power method
/// R_min is the min rate of the iterate (row 0 is the equal-power start);
/// for bisection it is the midpoint tested at that halving. The reference
/// optimum is the power iteration at tolerance 1e-12.
inline ExperimentTable run_convergence_trace(const Scenario& s, double tolerance) {
    const double r_star = detail::solve_power_or_throw(s, 1e-12).fairness_rate;

    ExperimentTable table({"iteration", "method", "R_min", "abs_error_vs_Rstar"});
    table.metadata().parameters = {
        {"gains", detail::format_double_list(s.gains())},
        {"total_power", detail::format_double(s.total_power())},
        {"tolerance", detail::format_double(tolerance)},
    };

    SolveResult power = detail::solve_power_or_throw(s, tolerance);
    for (const auto& rec : power.trace) {
        table.add_row({static_cast<std::int64_t>(rec.iteration), std::string("power"),
                       rec.min_rate, std::abs(rec.min_rate - r_star)});
    }
    SolveResult bisection = detail::solve_bisection_or_throw(s, tolerance);
    for (const auto& rec : bisection.trace) {
        table.add_row({static_cast<std::int64_t>(rec.iteration), std::string("bisection"),
                       rec.min_rate, std::abs(rec.min_rate - r_star)});
    }
    return table;
}

/// Average iteration counts over seeded Rayleigh trials, per tolerance and
/// method: columns [tolerance, method, avg_iterations]. Trial t draws its
/// gains from seed + t, so every tolerance sees the same instances and the
/// columns are directly comparable.
inline ExperimentTable run_iterations_vs_tolerance(std::size_t num_users, double total_power,
                                                   std::size_t trials,
                                                   std::span<const double> tolerances,
                                                   std::uint64_t seed) {
    if (trials < 1) throw ValidationError("run_iterations_vs_tolerance: trials must be >= 1");
    detail::check_positive_list(tolerances, "tolerances");

    ExperimentTable table({"tolerance", "method", "avg_iterations"});
    table.metadata().seed = seed;
    table.metadata().parameters = {
        {"users", std::to_string(num_users)},
        {"total_power", detail::format_double(total_power)},
        {"trials", std::to_string(trials)},
        {"tolerances", detail::format_double_list(tolerances)},
    };

    for (double tolerance : tolerances) {
        double power_sum = 0.0;
        double bisection_sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            Scenario s = sample_rayleigh_scenario(num_users, total_power,
                                                  seed + static_cast<std::uint64_t>(t));
            power_sum += static_cast<double>(detail::solve_power_or_throw(s, tolerance).iterations);
            bisection_sum +=
                static_cast<double>(detail::solve_bisection_or_throw(s, tolerance).iterations);
        }
        const double n = static_cast<double>(trials);
        table.add_row({tolerance, std::string("power"), power_sum / n});
        table.add_row({tolerance, std::string("bisection"), bisection_sum / n});
    }
    return table;
}

/// Average iteration counts per budget and method at fixed tolerance:
/// columns [total_power, method, avg_iterations]. The gain draw of trial t
/// depends only on seed + t, so the same fading realizations are reused at
/// every budget and the sweep isolates the effect of P_T.
inline ExperimentTable run_iterations_vs_power(std::size_t num_users, double tolerance,
                                               std::size_t trials,
                                               std::span<const double> powers,
                                               std::uint64_t seed) {
    if (trials < 1) throw ValidationError("run_iterations_vs_power: trials must be >= 1");
    detail::check_positive_list(powers, "powers");

    ExperimentTable table({"total_power", "method", "avg_iterations"});
    table.metadata().seed = seed;
    table.metadata().parameters = {
        {"users", std::to_string(num_users)},
        {"tolerance", detail::format_double(tolerance)},
        {"trials", std::to_string(trials)},
        {"powers", detail::format_double_list(powers)},
    };

    for (double total_power : powers) {
        double power_sum = 0.0;
        double bisection_sum = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            Scenario s = sample_rayleigh_scenario(num_users, total_power,
                                                  seed + static_cast<std::uint64_t>(t));
            power_sum += static_cast<double>(detail::solve_power_or_throw(s, tolerance).iterations);
            bisection_sum +=
                static_cast<double>(detail::solve_bisection_or_throw(s, tolerance).iterations);
        }
        const double n = static_cast<double>(trials);
        table.add_row({total_power, std::string("power"), power_sum / n});
        table.add_row({total_power, std::string("bisection"), bisection_sum / n});
    }
    return table;
}

/// Min-rate comparison of the four schemes across a budget sweep for fixed
/// gains: columns [total_power, scheme, min_rate] with scheme tokens
/// maxmin_noma, maxmin_oma, equal_noma, equal_oma. Max-min NOMA solves are
/// pinned at tolerance 1e-10 so scheme differences dwarf solver error.
inline ExperimentTable run_minrate_vs_power(const std::vector<double>& gains,
                                            std::span<const double> powers) {
    detail::check_positive_list(powers, "powers");

    ExperimentTable table({"total_power", "scheme", "min_rate"});
    table.metadata().parameters = {
        {"gains", detail::format_double_list(gains)},
        {"powers", detail::format_double_list(powers)},
    };

    for (double total_power : powers) {
        Scenario s = make_scenario(gains, total_power);
        PowerAllocation equal = equal_power(s);
        table.add_row({total_power, std::string("maxmin_noma"),
                       detail::solve_power_or_throw(s, 1e-10).fairness_rate});
        table.add_row({total_power, std::string("maxmin_oma"), solve_oma_maxmin(s).rate});
        table.add_row({total_power, std::string("equal_noma"), min_rate(noma_rates(s, equal))});
        table.add_row({total_power, std::string("equal_oma"), min_rate(oma_rates(s, equal))});
    }
    return table;
}

/// Fairness gain of max-min over equal power, per system, across a budget
/// sweep: columns [total_power, system, index_ratio] with index_ratio =
/// jain(max-min rates) / jain(equal-power rates). Max-min rates are equal
/// by construction, so the numerator sits at 1 and the ratio measures how
/// unfair equal power is.
inline ExperimentTable run_fairness_ratio_vs_power(const std::vector<double>& gains,
                                                   std::span<const double> powers) {
    detail::check_positive_list(powers, "powers");

    ExperimentTable table({"total_power", "system", "index_ratio"});
    table.metadata().parameters = {
        {"gains", detail::format_double_list(gains)},
        {"powers", detail::format_double_list(powers)},
    };

    for (double total_power : powers) {
        Scenario s = make_scenario(gains, total_power);
        PowerAllocation equal = equal_power(s);

        SolveResult noma_opt = detail::solve_power_or_throw(s, 1e-10);
        const double noma_ratio = jain_index(noma_rates(s, noma_opt.allocation)) /
                                  jain_index(noma_rates(s, equal));

        MaxMinSolution oma_opt = solve_oma_maxmin(s);
        const double oma_ratio =
            jain_index(oma_rates(s, oma_opt.allocation)) / jain_index(oma_rates(s, equal));

        table.add_row({total_power, std::string("noma"), noma_ratio});
        table.add_row({total_power, std::string("oma"), oma_ratio});
    }
    return table;
}

} // namespace noma
