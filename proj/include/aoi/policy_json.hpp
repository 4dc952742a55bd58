#pragma once

#include <json.hpp>

#include <utility>

#include "aoi/policy.hpp"

namespace aoi {

// {"mu_h": number, "battery": integer, "taus": [numbers]}
nlohmann::json policy_to_json(const SystemParams& params, const ThresholdPolicy& policy);

// Accepts exactly the object above; rejects unknown fields and invalid policies.
std::pair<SystemParams, ThresholdPolicy> policy_from_json(const nlohmann::json& j);

}  // namespace aoi
