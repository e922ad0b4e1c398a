#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "noma/rate_model.hpp"
#include "noma/scenario.hpp"

using namespace noma;
using Catch::Matchers::WithinAbs;

namespace {
const double kLog2_3 = 1.5849625007211562;   // log2(3)
const double kLog2_11 = 3.4594316186372973;  // log2(11)
}  // namespace

TEST_CASE("make_allocation accepts valid powers and enforces the budget") {
    Scenario s = make_scenario({1.0, 0.5}, 10.0);
    PowerAllocation p = make_allocation(s, {2.0, 8.0});
    REQUIRE(p.powers == std::vector<double>{2.0, 8.0});

    REQUIRE_NOTHROW(make_allocation(s, {0.0, 0.0}));
    REQUIRE_NOTHROW(make_allocation(s, {10.0, 0.0}));

    REQUIRE_THROWS_AS(make_allocation(s, {2.0}), ValidationError);
    REQUIRE_THROWS_AS(make_allocation(s, {2.0, 8.0, 0.0}), ValidationError);
    REQUIRE_THROWS_AS(make_allocation(s, {-1.0, 8.0}), ValidationError);
    REQUIRE_THROWS_AS(make_allocation(s, {2.0, std::nan("")}), ValidationError);
    REQUIRE_THROWS_AS(make_allocation(s, {3.0, 8.0}), ValidationError);
}

TEST_CASE("single user decodes without interference") {
    Scenario s = make_scenario({1.0}, 10.0);
    RateVector r = noma_rates(s, PowerAllocation{{10.0}});
    REQUIRE_THAT(r.rates[0], WithinAbs(kLog2_11, 1e-15));
}

TEST_CASE("zero power means zero rate") {
    Scenario s = make_scenario({1.0, 0.5}, 10.0);
    RateVector r = noma_rates(s, PowerAllocation{{0.0, 0.0}});
    REQUIRE(r.rates == std::vector<double>{0.0, 0.0});
}

TEST_CASE("the [2, 8] split of the two-user instance equalizes rates at log2 3") {
    // R_1 = log2(1 + 2*1.0), R_2 = log2(1 + 8*0.5/(0.5*2 + 1)) = log2 3.
    Scenario s = make_scenario({1.0, 0.5}, 10.0);
    RateVector r = noma_rates(s, PowerAllocation{{2.0, 8.0}});
    REQUIRE_THAT(r.rates[0], WithinAbs(kLog2_3, 1e-15));
    REQUIRE_THAT(r.rates[1], WithinAbs(kLog2_3, 1e-15));
    REQUIRE_THAT(min_rate(r), WithinAbs(kLog2_3, 1e-15));
}

TEST_CASE("interference comes only from stronger users") {
    Scenario s = make_scenario({2.0, 1.0, 0.25}, 12.0);
    RateVector r = noma_rates(s, PowerAllocation{{1.0, 2.0, 9.0}});
    REQUIRE_THAT(r.rates[0], WithinAbs(std::log2(1.0 + 1.0 * 2.0), 1e-15));
    REQUIRE_THAT(r.rates[1], WithinAbs(std::log2(1.0 + 2.0 * 1.0 / (1.0 * 1.0 + 1.0)), 1e-15));
    REQUIRE_THAT(r.rates[2],
                 WithinAbs(std::log2(1.0 + 9.0 * 0.25 / (0.25 * 3.0 + 1.0)), 1e-15));
}

TEST_CASE("rate computation rejects malformed allocations") {
    Scenario s = make_scenario({1.0, 0.5}, 10.0);
    REQUIRE_THROWS_AS(noma_rates(s, PowerAllocation{{1.0}}), ValidationError);
    REQUIRE_THROWS_AS(noma_rates(s, PowerAllocation{{1.0, -2.0}}), ValidationError);
    REQUIRE_THROWS_AS(oma_rates(s, PowerAllocation{{1.0}}), ValidationError);
}

TEST_CASE("min_rate returns the smallest entry and rejects empty input") {
    REQUIRE(min_rate(RateVector{{1.5, 2.0, 0.7}}) == 0.7);
    REQUIRE(min_rate(RateVector{{0.42}}) == 0.42);
    REQUIRE_THROWS_AS(min_rate(RateVector{{}}), ValidationError);
}

TEST_CASE("jain index is 1 exactly for equal rates and 1/K at one active user") {
    REQUIRE(jain_index(RateVector{{0.5, 0.5, 0.5}}) == 1.0);
    REQUIRE_THAT(jain_index(RateVector{{0.7, 0.7, 0.7}}), WithinAbs(1.0, 1e-15));
    REQUIRE_THAT(jain_index(RateVector{{1.0, 0.0, 0.0, 0.0}}), WithinAbs(0.25, 1e-15));
    // [1, 3]: (1+3)^2 / (2 * (1+9)) = 16/20.
    REQUIRE_THAT(jain_index(RateVector{{1.0, 3.0}}), WithinAbs(0.8, 1e-15));
    REQUIRE_THROWS_AS(jain_index(RateVector{{}}), ValidationError);
    REQUIRE_THROWS_AS(jain_index(RateVector{{0.0, 0.0}}), ValidationError);
}

TEST_CASE("jain index stays in (0, 1] on random rate vectors") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng() % 10;
        std::vector<double> rates(n);
        for (auto& r : rates) r = 0.01 + static_cast<double>(rng() % 1000) / 100.0;
        double j = jain_index(RateVector{rates});
        REQUIRE(j > 0.0);
        REQUIRE(j <= 1.0 + 1e-15);
    }
}

TEST_CASE("orthogonal rates follow the equal-bandwidth split") {
    Scenario s = make_scenario({1.0, 0.5}, 10.0);
    RateVector r = oma_rates(s, PowerAllocation{{5.0, 5.0}});
    REQUIRE_THAT(r.rates[0], WithinAbs(0.5 * std::log2(1.0 + 2.0 * 5.0 * 1.0), 1e-15));
    REQUIRE_THAT(r.rates[1], WithinAbs(0.5 * std::log2(1.0 + 2.0 * 5.0 * 0.5), 1e-15));

    // K=1 collapses to the NOMA rate.
    Scenario one = make_scenario({1.0}, 10.0);
    RateVector ro = oma_rates(one, PowerAllocation{{10.0}});
    REQUIRE_THAT(ro.rates[0], WithinAbs(kLog2_11, 1e-15));
}
