#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "noma/errors.hpp"
#include "noma/scenario.hpp"

namespace noma {

/// Per-user transmit powers, one entry per scenario user.
struct PowerAllocation {
    std::vector<double> powers;
};

/// Per-user achievable rates in bits/s/Hz.
struct RateVector {
    std::vector<double> rates;
};

namespace detail {

inline void check_allocation_shape(const Scenario& s, std::span<const double> powers) {
    if (powers.size() != s.num_users()) {
        throw ValidationError("allocation: expected " + std::to_string(s.num_users()) +
                              " powers, got " + std::to_string(powers.size()));
    }
    for (std::size_t k = 0; k < powers.size(); ++k) {
        if (!std::isfinite(powers[k]) || powers[k] < 0.0) {
            throw ValidationError("allocation: power[" + std::to_string(k) +
                                  "] must be finite and >= 0, got " + std::to_string(powers[k]));
        }
    }
}

} // namespace detail

/// Validates powers against a scenario (shape, non-negativity, and the
/// budget sum(P) <= P_T up to 1e-12 relative slack).
inline PowerAllocation make_allocation(const Scenario& s, std::vector<double> powers) {
    detail::check_allocation_shape(s, powers);
    double sum = 0.0;
    for (double p : powers) sum += p;
    if (sum > s.total_power() * (1.0 + 1e-12)) {
        throw ValidationError("allocation: powers sum to " + std::to_string(sum) +
                              ", exceeding the budget " + std::to_string(s.total_power()));
    }
    return PowerAllocation{std::move(powers)};
}

/// Achievable rates under superposition coding with successive
/// interference cancellation: the strongest user decodes free of
/// interference, user k sees residual interference from users 1..k-1,
///   R_1 = log2(1 + P_1 g_1)
///   R_k = log2(1 + P_k g_k / (g_k * sum_{j<k} P_j + 1)),  k >= 2.
/// Interference prefix sums make the whole vector O(K).
inline RateVector noma_rates(const Scenario& s, const PowerAllocation& p) {
    detail::check_allocation_shape(s, p.powers);
    const auto& g = s.gains();
    std::vector<double> rates(p.powers.size());
    double interference = 0.0;
    for (std::size_t k = 0; k < p.powers.size(); ++k) {
        rates[k] = std::log2(1.0 + p.powers[k] * g[k] / (g[k] * interference + 1.0));
        interference += p.powers[k];
    }
    return RateVector{std::move(rates)};
}

/// Orthogonal baseline: equal-bandwidth FDMA. Each user gets a 1/K slice
/// of the band and a proportional slice of the noise, so
///   R_k = (1/K) * log2(1 + K * P_k * g_k).
inline RateVector oma_rates(const Scenario& s, const PowerAllocation& p) {
    detail::check_allocation_shape(s, p.powers);
    const auto& g = s.gains();
    const double K = static_cast<double>(s.num_users());
    std::vector<double> rates(p.powers.size());
    for (std::size_t k = 0; k < p.powers.size(); ++k) {
        rates[k] = std::log2(1.0 + K * p.powers[k] * g[k]) / K;
    }
    return RateVector{std::move(rates)};
}

inline double min_rate(const RateVector& r) {
    if (r.rates.empty()) throw ValidationError("min_rate: empty rate vector");
    double m = r.rates.front();
    for (double v : r.rates) m = std::min(m, v);
    return m;
}

/// Jain's fairness index (sum R)^2 / (K * sum R^2), in (0, 1]; equals 1
/// iff all rates are equal. Throws on an all-zero vector (0/0).
inline double jain_index(const RateVector& r) {
    if (r.rates.empty()) throw ValidationError("jain_index: empty rate vector");
    double sum = 0.0, sum_sq = 0.0;
    for (double v : r.rates) {
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0.0) throw ValidationError("jain_index: all rates are zero");
    return (sum * sum) / (static_cast<double>(r.rates.size()) * sum_sq);
}

} // namespace noma
