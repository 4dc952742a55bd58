#pragma once

#include <string>
#include <vector>

namespace aoi {

struct SystemParams {
    double mu_h = 1.0;  // energy arrival rate
    int battery = 1;    // capacity in unit-energy slots
};

// Throws std::invalid_argument unless mu_h is positive and finite and battery >= 1.
void require_valid(const SystemParams& params);

// taus[k] is the age threshold that triggers an update when k+1 energy units
// are stored. A valid policy is nonincreasing: more energy, more eager.
struct ThresholdPolicy {
    std::vector<double> taus;

    // 1-based accessor: tau(level) for level in [1, battery].
    double tau(int level) const { return taus.at(static_cast<std::size_t>(level) - 1); }
};

enum class PolicyError {
    none,
    length_mismatch,
    non_finite_threshold,
    negative_threshold,
    not_monotone,
};

PolicyError validate_policy(const SystemParams& params, const ThresholdPolicy& policy);
std::string describe(PolicyError err);

// Throws std::invalid_argument carrying describe() when validation fails.
void require_valid_policy(const SystemParams& params, const ThresholdPolicy& policy);

}  // namespace aoi
