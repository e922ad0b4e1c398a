#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "noma/scenario.hpp"
#include "noma/scenario_io.hpp"

namespace fs = std::filesystem;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("noma_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.is_open());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

// Runs the CLI binary with the given argument string, capturing both streams.
RunResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path out_path = work_dir() / ("stdout_" + std::to_string(counter) + ".txt");
    fs::path err_path = work_dir() / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;

    std::string command = std::string("\"") + NOMA_CLI_PATH + "\" " + args + " > \"" +
                          out_path.string() + "\" 2> \"" + err_path.string() + "\"";
    int status = std::system(command.c_str());
    RunResult result;
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    return result;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("solve emits a correct JSON result for the two-user instance") {
    RunResult r = run_cli("solve --gains 1.0,0.5 --power 10 --tolerance 1e-10 --json");
    REQUIRE(r.code == 0);

    nlohmann::json doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["method"] == "power");
    REQUIRE(doc["converged"] == true);
    REQUIRE_THAT(doc["fairness_rate"].get<double>(), WithinAbs(1.5849625007211562, 1e-9));
    REQUIRE_THAT(doc["lambda_pf"].get<double>(), WithinAbs(0.5, 1e-9));
    auto powers = doc["allocation"].get<std::vector<double>>();
    REQUIRE(powers.size() == 2);
    REQUIRE_THAT(powers[0], WithinAbs(2.0, 1e-7));
    REQUIRE_THAT(powers[1], WithinAbs(8.0, 1e-7));
    REQUIRE_THAT(doc["bounds"]["lambda_lo"].get<double>(), WithinAbs(0.3, 1e-15));
    REQUIRE_THAT(doc["bounds"]["lambda_hi"].get<double>(), WithinAbs(1.3, 1e-15));
}

TEST_CASE("solve agrees across methods at the command line") {
    RunResult power = run_cli("solve --gains 1.0,0.5 --power 10 --tolerance 1e-10 --json");
    RunResult bisect =
        run_cli("solve --gains 1.0,0.5 --power 10 --tolerance 1e-10 --method bisection --json");
    REQUIRE(power.code == 0);
    REQUIRE(bisect.code == 0);
    double a = nlohmann::json::parse(power.out)["fairness_rate"].get<double>();
    double b = nlohmann::json::parse(bisect.out)["fairness_rate"].get<double>();
    REQUIRE_THAT(a, WithinAbs(b, 1e-9));
}

TEST_CASE("solve prints a human-readable report by default") {
    RunResult r = run_cli("solve --gains 1.0,0.5 --power 10");
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.out, ContainsSubstring("fairness rate:"));
    REQUIRE_THAT(r.out, ContainsSubstring("(converged)"));
    REQUIRE_THAT(r.out, ContainsSubstring("allocation:"));
}

TEST_CASE("bad inputs exit with the validation code") {
    REQUIRE(run_cli("solve --gains 1.0,0.0 --power 10").code == 1);
    REQUIRE(run_cli("solve --gains 1.0,0.5").code == 1);
    REQUIRE(run_cli("solve").code == 1);
    REQUIRE(run_cli("solve --gains 1.0,abc --power 10").code == 1);
    REQUIRE(run_cli("solve --gains 1.0,0.5 --power 10 --method newton").code == 1);
    REQUIRE(run_cli("solve --no-such-flag").code == 1);
    REQUIRE(run_cli("").code == 1);
}

TEST_CASE("an iteration cap that is too small exits with the convergence code") {
    RunResult r = run_cli(
        "solve --gains 1.2389,0.7192,0.4322,0.3614 --power 10 --tolerance 1e-12"
        " --max-iterations 2 --json");
    REQUIRE(r.code == 2);
    REQUIRE_THAT(r.err, ContainsSubstring("did not converge"));
    // The partial result is still reported.
    nlohmann::json doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["converged"] == false);
    REQUIRE(doc["iterations"] == 2);
}

TEST_CASE("missing files exit with the IO code") {
    fs::path ghost = work_dir() / "does_not_exist.json";
    REQUIRE(run_cli("solve --scenario \"" + ghost.string() + "\"").code == 3);
    fs::path out = work_dir() / "ghost_trace.csv";
    REQUIRE(run_cli("trace --scenario \"" + ghost.string() + "\" --out \"" + out.string() +
                    "\"").code == 3);
}

TEST_CASE("help exits cleanly") {
    REQUIRE(run_cli("--help").code == 0);
    REQUIRE(run_cli("solve --help").code == 0);
}

TEST_CASE("solve loads a scenario file and honors its label") {
    noma::Scenario s = noma::make_scenario({1.2389, 0.7192, 0.4322, 0.3614}, 10.0);
    s.set_label("cell edge");
    fs::path file = work_dir() / "four_user.json";
    noma::save_scenario(s, file.string());

    RunResult r = run_cli("solve --scenario \"" + file.string() + "\" --tolerance 1e-10 --json");
    REQUIRE(r.code == 0);
    REQUIRE(r.err.empty());
    nlohmann::json doc = nlohmann::json::parse(r.out);
    REQUIRE(doc["label"] == "cell edge");
    REQUIRE_THAT(doc["fairness_rate"].get<double>(), WithinAbs(0.75575936429477481, 1e-9));

    // Mixing the file with inline gains is rejected.
    REQUIRE(run_cli("solve --scenario \"" + file.string() + "\" --gains 1.0,0.5 --power 10")
                .code == 1);
}

TEST_CASE("an unsorted scenario file is sorted with a note on stderr") {
    fs::path file = work_dir() / "unsorted.json";
    {
        std::ofstream out(file);
        out << R"({"gains": [0.5, 1.0], "total_power": 10.0})";
    }
    RunResult r = run_cli("solve --scenario \"" + file.string() + "\" --json");
    REQUIRE(r.code == 0);
    REQUIRE_THAT(r.err, ContainsSubstring("sorted"));
    auto gains = nlohmann::json::parse(r.out)["gains"].get<std::vector<double>>();
    REQUIRE(gains == std::vector<double>{1.0, 0.5});
}

TEST_CASE("trace writes the expected CSV") {
    noma::Scenario s = noma::make_scenario({1.2389, 0.7192, 0.4322, 0.3614}, 10.0);
    fs::path file = work_dir() / "trace_scenario.json";
    noma::save_scenario(s, file.string());
    fs::path out = work_dir() / "trace.csv";

    RunResult r = run_cli("trace --scenario \"" + file.string() + "\" --tolerance 1e-6 --out \"" +
                          out.string() + "\"");
    REQUIRE(r.code == 0);

    auto lines = lines_of(read_file(out));
    REQUIRE(lines.size() >= 4);
    REQUIRE(lines[0].rfind("# ", 0) == 0);
    REQUIRE_THAT(lines[0], ContainsSubstring("tolerance=1e-06"));
    REQUIRE(lines[1] == "iteration,method,R_min,abs_error_vs_Rstar");
    REQUIRE_THAT(read_file(out), ContainsSubstring(",power,"));
    REQUIRE_THAT(read_file(out), ContainsSubstring(",bisection,"));
}

TEST_CASE("sweep-tolerance is reproducible and carries its seed") {
    fs::path a = work_dir() / "sweep_a.csv";
    fs::path b = work_dir() / "sweep_b.csv";
    std::string args = "sweep-tolerance --users 3 --power 10 --trials 5 --tolerances 1e-3,1e-4"
                       " --seed 42 --out ";
    REQUIRE(run_cli(args + "\"" + a.string() + "\"").code == 0);
    REQUIRE(run_cli(args + "\"" + b.string() + "\"").code == 0);

    std::string text = read_file(a);
    REQUIRE(text == read_file(b));
    auto lines = lines_of(text);
    REQUIRE_THAT(lines[0], ContainsSubstring("seed=42"));
    REQUIRE(lines[1] == "tolerance,method,avg_iterations");
    REQUIRE(lines.size() == 2 + 4);
}

TEST_CASE("sweep-power writes one row per budget and method") {
    fs::path out = work_dir() / "sweep_power.csv";
    RunResult r = run_cli("sweep-power --users 2 --tolerance 1e-4 --trials 3 --powers 5,20"
                          " --seed 7 --out \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    auto lines = lines_of(read_file(out));
    REQUIRE(lines[1] == "total_power,method,avg_iterations");
    REQUIRE(lines.size() == 2 + 4);
}

TEST_CASE("compare-schemes covers all four schemes") {
    fs::path out = work_dir() / "schemes.csv";
    RunResult r = run_cli("compare-schemes --gains 1.0,0.5 --powers 10 --out \"" +
                          out.string() + "\"");
    REQUIRE(r.code == 0);
    std::string text = read_file(out);
    auto lines = lines_of(text);
    REQUIRE(lines[1] == "total_power,scheme,min_rate");
    REQUIRE(lines.size() == 2 + 4);
    REQUIRE_THAT(text, ContainsSubstring("maxmin_noma"));
    REQUIRE_THAT(text, ContainsSubstring("maxmin_oma"));
    REQUIRE_THAT(text, ContainsSubstring("equal_noma"));
    REQUIRE_THAT(text, ContainsSubstring("equal_oma"));
}

TEST_CASE("fairness-ratio writes one row per system and budget") {
    fs::path out = work_dir() / "fairness.csv";
    RunResult r = run_cli("fairness-ratio --gains 1.2389,0.7192,0.4322,0.3614 --powers 5,10"
                          " --out \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    auto lines = lines_of(read_file(out));
    REQUIRE(lines[1] == "total_power,system,index_ratio");
    REQUIRE(lines.size() == 2 + 4);
    REQUIRE_THAT(lines[2], ContainsSubstring("noma"));
    REQUIRE_THAT(lines[3], ContainsSubstring("oma"));
}

TEST_CASE("an unwritable output path exits with the IO code") {
    fs::path out = work_dir() / "no_such_dir" / "trace.csv";
    noma::Scenario s = noma::make_scenario({1.0, 0.5}, 10.0);
    fs::path file = work_dir() / "io_scenario.json";
    noma::save_scenario(s, file.string());
    REQUIRE(run_cli("trace --scenario \"" + file.string() + "\" --out \"" + out.string() +
                    "\"").code == 3);
}
