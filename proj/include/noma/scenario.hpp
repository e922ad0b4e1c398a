#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "noma/errors.hpp"

namespace noma {

/// A downlink power-allocation problem instance: per-user channel power
/// gains |h_k|^2 sorted non-increasing (user 0 is the strongest) and a
/// total transmit power budget, in units of the (unit) noise power.
///
/// Immutable after construction; all invariants are enforced by the
/// factories below, so a Scenario in hand is always valid.
class Scenario {
public:
    [[nodiscard]] const std::vector<double>& gains() const { return gains_; }
    [[nodiscard]] double total_power() const { return total_power_; }
    [[nodiscard]] std::size_t num_users() const { return gains_.size(); }

    /// input_order()[i] = position of sorted user i in the caller's
    /// original gain list, so results can be reported in input order.
    [[nodiscard]] const std::vector<std::size_t>& input_order() const { return input_order_; }

    [[nodiscard]] const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    friend bool operator==(const Scenario& a, const Scenario& b) {
        return a.gains_ == b.gains_ && a.total_power_ == b.total_power_;
    }

private:
    Scenario(std::vector<double> gains, double total_power, std::vector<std::size_t> order)
        : gains_(std::move(gains)), total_power_(total_power), input_order_(std::move(order)) {}

    friend Scenario make_scenario(std::vector<double> gains, double total_power);

    std::vector<double> gains_;
    double total_power_ = 0.0;
    std::vector<std::size_t> input_order_;
    std::string label_;
};

/// Builds a Scenario from gains in any order. Gains are stably sorted
/// non-increasing (ties keep input order) and the permutation is recorded.
/// Throws ValidationError on an empty list, a gain that is not finite and
/// strictly positive, or a budget that is not finite and strictly positive.
inline Scenario make_scenario(std::vector<double> gains, double total_power) {
    if (gains.empty()) {
        throw ValidationError("scenario: gain list must be non-empty");
    }
    for (std::size_t k = 0; k < gains.size(); ++k) {
        if (!std::isfinite(gains[k]) || gains[k] <= 0.0) {
            throw ValidationError("scenario: gain[" + std::to_string(k) +
                                  "] must be finite and > 0, got " + std::to_string(gains[k]));
        }
    }
    if (!std::isfinite(total_power) || total_power <= 0.0) {
        throw ValidationError("scenario: total_power must be finite and > 0, got " +
                              std::to_string(total_power));
    }

    std::vector<std::size_t> order(gains.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&gains](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });

    std::vector<double> sorted(gains.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = gains[order[i]];

    return Scenario(std::move(sorted), total_power, std::move(order));
}

namespace detail {

/// Uniform draw in (0,1), never hitting either endpoint, from one 64-bit
/// generator word. Fixed mapping so that a given mt19937_64 seed yields
/// the same doubles on every conforming platform.
inline double uniform_open01(std::uint64_t word) {
    return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace detail

/// Draws num_users i.i.d. unit-mean exponential gains (Rayleigh power
/// fading) via the inverse CDF g = -ln(u) on a freshly seeded mt19937_64,
/// then sorts them into a Scenario. Identical seed, identical Scenario.
inline Scenario sample_rayleigh_scenario(std::size_t num_users, double total_power,
                                         std::uint64_t seed) {
    if (num_users < 1) {
        throw ValidationError("scenario: num_users must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::vector<double> gains(num_users);
    for (auto& g : gains) {
        g = -std::log(detail::uniform_open01(rng()));
    }
    return make_scenario(std::move(gains), total_power);
}

} // namespace noma
