#include "aoi/policy_json.hpp"

#include <stdexcept>

namespace aoi {

nlohmann::json policy_to_json(const SystemParams& params, const ThresholdPolicy& policy) {
    require_valid_policy(params, policy);
    return nlohmann::json{
        {"mu_h", params.mu_h}, {"battery", params.battery}, {"taus", policy.taus}};
}

std::pair<SystemParams, ThresholdPolicy> policy_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("policy: expected a JSON object");
    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        if (key != "mu_h" && key != "battery" && key != "taus")
            throw std::invalid_argument("policy: unknown field \"" + key + "\"");
    }
    for (const char* key : {"mu_h", "battery", "taus"})
        if (!j.contains(key))
            throw std::invalid_argument(std::string("policy: missing field \"") + key + "\"");
    if (!j["mu_h"].is_number())
        throw std::invalid_argument("policy: mu_h must be a number");
    if (!j["battery"].is_number_integer())
        throw std::invalid_argument("policy: battery must be an integer");
    if (!j["taus"].is_array())
        throw std::invalid_argument("policy: taus must be an array");

    SystemParams params{j["mu_h"].get<double>(), j["battery"].get<int>()};
    ThresholdPolicy policy;
    for (const auto& v : j["taus"]) {
        if (!v.is_number())
            throw std::invalid_argument("policy: taus entries must be numbers");
        policy.taus.push_back(v.get<double>());
    }
    require_valid_policy(params, policy);
    return {params, policy};
}

}  // namespace aoi
