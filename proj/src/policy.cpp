#include "aoi/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace aoi {

void require_valid(const SystemParams& params) {
    if (!std::isfinite(params.mu_h) || !(params.mu_h > 0.0))
        throw std::invalid_argument("params: mu_h must be positive and finite");
    if (params.battery < 1)
        throw std::invalid_argument("params: battery must be at least 1");
}

PolicyError validate_policy(const SystemParams& params, const ThresholdPolicy& policy) {
    require_valid(params);
    if (policy.taus.size() != static_cast<std::size_t>(params.battery))
        return PolicyError::length_mismatch;
    for (double t : policy.taus)
        if (!std::isfinite(t)) return PolicyError::non_finite_threshold;
    for (double t : policy.taus)
        if (t < 0.0) return PolicyError::negative_threshold;
    for (std::size_t i = 1; i < policy.taus.size(); ++i)
        if (policy.taus[i] > policy.taus[i - 1]) return PolicyError::not_monotone;
    return PolicyError::none;
}

std::string describe(PolicyError err) {
    switch (err) {
        case PolicyError::none:
            return "ok";
        case PolicyError::length_mismatch:
            return "policy length does not match battery capacity";
        case PolicyError::non_finite_threshold:
            return "thresholds must be finite";
        case PolicyError::negative_threshold:
            return "thresholds must be nonnegative";
        case PolicyError::not_monotone:
            return "thresholds must be nonincreasing in energy level";
    }
    return "unknown policy error";
}

void require_valid_policy(const SystemParams& params, const ThresholdPolicy& policy) {
    PolicyError err = validate_policy(params, policy);
    if (err != PolicyError::none) throw std::invalid_argument("policy: " + describe(err));
}

}  // namespace aoi
