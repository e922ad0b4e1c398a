// Command-line front end: single solves, convergence traces, Monte-Carlo
// sweeps, and scheme comparisons, with CSV or JSON output.
//
// Exit codes: 0 success, 1 validation error, 2 non-convergence, 3 IO error.

#include <charconv>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "noma/noma.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        const char* first = text.data() + start;
        const char* last = text.data() + comma;
        while (first < last && *first == ' ') ++first;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) {
            throw noma::ValidationError(flag + ": cannot parse '" +
                                        std::string(text.data() + start, last) + "' as a number");
        }
        values.push_back(v);
        start = comma + 1;
    }
    return values;
}

struct ScenarioInput {
    std::string file;
    std::string gains_text;
    double power = 0.0;
    bool power_set = false;
};

noma::Scenario resolve_scenario(const ScenarioInput& in) {
    if (!in.file.empty()) {
        if (!in.gains_text.empty() || in.power_set) {
            throw noma::ValidationError("give either --scenario or --gains/--power, not both");
        }
        noma::ScenarioLoadResult loaded = noma::load_scenario(in.file);
        if (loaded.reordered) {
            std::cerr << "note: gains in '" << in.file
                      << "' were not sorted; they have been sorted non-increasing\n";
        }
        return loaded.scenario;
    }
    if (in.gains_text.empty() || !in.power_set) {
        throw noma::ValidationError("provide --scenario <file>, or both --gains and --power");
    }
    return noma::make_scenario(parse_double_list(in.gains_text, "--gains"), in.power);
}

std::string format_powers(const std::vector<double>& powers) {
    std::string text = "[";
    for (std::size_t k = 0; k < powers.size(); ++k) {
        if (k > 0) text += ", ";
        text += noma::detail::format_double(powers[k]);
    }
    return text + "]";
}

int run_solve(const noma::Scenario& s, double tolerance, const std::string& method,
              std::size_t max_iterations, bool as_json) {
    noma::SolveResult result = method == "bisection"
                                   ? noma::solve_bisection(s, tolerance)
                                   : noma::solve_power_iteration(s, tolerance, max_iterations);

    if (as_json) {
        nlohmann::json doc;
        if (!s.label().empty()) doc["label"] = s.label();
        doc["gains"] = s.gains();
        doc["total_power"] = s.total_power();
        doc["method"] = method;
        doc["tolerance"] = tolerance;
        doc["fairness_rate"] = result.fairness_rate;
        doc["lambda_pf"] = result.lambda_pf;
        doc["iterations"] = result.iterations;
        doc["converged"] = result.converged;
        doc["allocation"] = result.allocation.powers;
        doc["bounds"] = {{"lambda_lo", result.bounds.lambda_lo},
                         {"lambda_hi", result.bounds.lambda_hi},
                         {"rate_lo", result.bounds.rate_lo},
                         {"rate_hi", result.bounds.rate_hi}};
        std::cout << doc.dump(2) << '\n';
    } else {
        if (!s.label().empty()) std::cout << "label:         " << s.label() << '\n';
        std::cout << "users:         " << s.num_users() << '\n'
                  << "total power:   " << noma::detail::format_double(s.total_power()) << '\n'
                  << "method:        " << method << '\n'
                  << "fairness rate: " << noma::detail::format_double(result.fairness_rate)
                  << " bits/s/Hz\n"
                  << "lambda_pf:     " << noma::detail::format_double(result.lambda_pf) << '\n'
                  << "iterations:    " << result.iterations
                  << (result.converged ? " (converged)" : " (NOT converged)") << '\n'
                  << "bounds:        lambda [" << noma::detail::format_double(result.bounds.lambda_lo)
                  << ", " << noma::detail::format_double(result.bounds.lambda_hi) << "], rate ["
                  << noma::detail::format_double(result.bounds.rate_lo) << ", "
                  << noma::detail::format_double(result.bounds.rate_hi) << "]\n"
                  << "allocation:    " << format_powers(result.allocation.powers) << '\n';
    }

    if (!result.converged) {
        std::cerr << "error: did not converge within " << result.iterations << " iterations\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Max-min fair power allocation for downlink NOMA"};
    app.require_subcommand(1);

    // solve
    ScenarioInput solve_in;
    double solve_tolerance = 1e-5;
    std::string solve_method = "power";
    std::size_t solve_max_iterations = 10000;
    bool solve_json = false;
    CLI::App* solve = app.add_subcommand("solve", "Solve one instance and print the allocation");
    solve->add_option("--scenario", solve_in.file, "Scenario JSON file");
    solve->add_option("--gains", solve_in.gains_text, "Comma-separated channel gains");
    solve->add_option("--power", solve_in.power, "Total power budget")
        ->each([&solve_in](const std::string&) { solve_in.power_set = true; });
    solve->add_option("--tolerance", solve_tolerance, "Stopping tolerance (default 1e-5)");
    solve->add_option("--method", solve_method, "Solver: power | bisection (default power)")
        ->check(CLI::IsMember({"power", "bisection"}));
    solve->add_option("--max-iterations", solve_max_iterations,
                      "Iteration cap for the power method (default 10000)");
    solve->add_flag("--json", solve_json, "Emit the result as JSON");

    // trace
    std::string trace_file, trace_out;
    double trace_tolerance = 1e-5;
    CLI::App* trace = app.add_subcommand(
        "trace", "Per-iteration convergence of both methods on one instance");
    trace->add_option("--scenario", trace_file, "Scenario JSON file")->required();
    trace->add_option("--tolerance", trace_tolerance, "Stopping tolerance (default 1e-5)");
    trace->add_option("--out", trace_out, "Output CSV path")->required();

    // sweep-tolerance
    std::size_t st_users = 4, st_trials = 1000;
    double st_power = 10.0;
    std::string st_tolerances = "1e-2,1e-3,1e-4,1e-5,1e-6,1e-7";
    std::uint64_t st_seed = 1;
    std::string st_out;
    CLI::App* sweep_tol = app.add_subcommand(
        "sweep-tolerance", "Average iterations vs tolerance over random trials");
    sweep_tol->add_option("--users", st_users, "Number of users (default 4)");
    sweep_tol->add_option("--power", st_power, "Total power budget (default 10)");
    sweep_tol->add_option("--trials", st_trials, "Monte-Carlo trials (default 1000)");
    sweep_tol->add_option("--tolerances", st_tolerances,
                          "Comma-separated tolerance list (default 1e-2..1e-7)");
    sweep_tol->add_option("--seed", st_seed, "Base RNG seed (default 1)");
    sweep_tol->add_option("--out", st_out, "Output CSV path")->required();

    // sweep-power
    std::size_t sp_users = 4, sp_trials = 1000;
    double sp_tolerance = 1e-5;
    std::string sp_powers = "2,5,10,20,40";
    std::uint64_t sp_seed = 1;
    std::string sp_out;
    CLI::App* sweep_pow = app.add_subcommand(
        "sweep-power", "Average iterations vs total power over random trials");
    sweep_pow->add_option("--users", sp_users, "Number of users (default 4)");
    sweep_pow->add_option("--tolerance", sp_tolerance, "Stopping tolerance (default 1e-5)");
    sweep_pow->add_option("--trials", sp_trials, "Monte-Carlo trials (default 1000)");
    sweep_pow->add_option("--powers", sp_powers,
                          "Comma-separated total-power list (default 2,5,10,20,40)");
    sweep_pow->add_option("--seed", sp_seed, "Base RNG seed (default 1)");
    sweep_pow->add_option("--out", sp_out, "Output CSV path")->required();

    // compare-schemes
    std::string cs_gains, cs_powers = "2,5,10,20,40", cs_out;
    CLI::App* compare = app.add_subcommand(
        "compare-schemes", "Min rate of max-min/equal NOMA/OMA across a power sweep");
    compare->add_option("--gains", cs_gains, "Comma-separated channel gains")->required();
    compare->add_option("--powers", cs_powers,
                        "Comma-separated total-power list (default 2,5,10,20,40)");
    compare->add_option("--out", cs_out, "Output CSV path")->required();

    // fairness-ratio
    std::string fr_gains, fr_powers = "2,5,10,20,40", fr_out;
    CLI::App* fairness = app.add_subcommand(
        "fairness-ratio", "Jain-index ratio max-min/equal for NOMA and OMA");
    fairness->add_option("--gains", fr_gains, "Comma-separated channel gains")->required();
    fairness->add_option("--powers", fr_powers,
                         "Comma-separated total-power list (default 2,5,10,20,40)");
    fairness->add_option("--out", fr_out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);

        if (solve->parsed()) {
            return run_solve(resolve_scenario(solve_in), solve_tolerance, solve_method,
                             solve_max_iterations, solve_json);
        }
        if (trace->parsed()) {
            noma::ScenarioLoadResult loaded = noma::load_scenario(trace_file);
            noma::emit_csv(noma::run_convergence_trace(loaded.scenario, trace_tolerance),
                           std::filesystem::path(trace_out));
        } else if (sweep_tol->parsed()) {
            noma::emit_csv(
                noma::run_iterations_vs_tolerance(
                    st_users, st_power, st_trials,
                    parse_double_list(st_tolerances, "--tolerances"), st_seed),
                std::filesystem::path(st_out));
        } else if (sweep_pow->parsed()) {
            noma::emit_csv(noma::run_iterations_vs_power(
                               sp_users, sp_tolerance, sp_trials,
                               parse_double_list(sp_powers, "--powers"), sp_seed),
                           std::filesystem::path(sp_out));
        } else if (compare->parsed()) {
            noma::emit_csv(noma::run_minrate_vs_power(parse_double_list(cs_gains, "--gains"),
                                                      parse_double_list(cs_powers, "--powers")),
                           std::filesystem::path(cs_out));
        } else if (fairness->parsed()) {
            noma::emit_csv(
                noma::run_fairness_ratio_vs_power(parse_double_list(fr_gains, "--gains"),
                                                  parse_double_list(fr_powers, "--powers")),
                std::filesystem::path(fr_out));
        }
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const noma::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const noma::NotConvergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const noma::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
