#include <doctest.h>

#include <cstring>
#include <limits>
#include <random>
#include <stdexcept>

#include "aoi/policy.hpp"
#include "aoi/policy_json.hpp"

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("params validation") {
    CHECK_NOTHROW(aoi::require_valid({1.0, 1}));
    CHECK_THROWS_AS(aoi::require_valid({0.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(aoi::require_valid({-2.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(aoi::require_valid({kInf, 1}), std::invalid_argument);
    CHECK_THROWS_AS(aoi::require_valid({std::nan(""), 1}), std::invalid_argument);
    CHECK_THROWS_AS(aoi::require_valid({1.0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(aoi::require_valid({1.0, -1}), std::invalid_argument);
}

TEST_CASE("policy validation outcomes") {
    const aoi::SystemParams p2{1.0, 2};
    CHECK(aoi::validate_policy(p2, {{1.5, 0.72}}) == aoi::PolicyError::none);
    CHECK(aoi::validate_policy(p2, {{0.5, 0.9}}) == aoi::PolicyError::not_monotone);
    CHECK(aoi::validate_policy(p2, {{1.5}}) == aoi::PolicyError::length_mismatch);
    CHECK(aoi::validate_policy(p2, {{1.5, 0.72, 0.1}}) == aoi::PolicyError::length_mismatch);
    CHECK(aoi::validate_policy(p2, {{1.5, -0.1}}) == aoi::PolicyError::negative_threshold);
    CHECK(aoi::validate_policy(p2, {{kInf, 0.5}}) == aoi::PolicyError::non_finite_threshold);
    CHECK(aoi::validate_policy(p2, {{1.5, std::nan("")}}) == aoi::PolicyError::non_finite_threshold);

    // equal thresholds are allowed, zero thresholds are allowed
    const aoi::SystemParams p3{2.0, 3};
    CHECK(aoi::validate_policy(p3, {{1.0, 1.0, 1.0}}) == aoi::PolicyError::none);
    CHECK(aoi::validate_policy(p3, {{0.0, 0.0, 0.0}}) == aoi::PolicyError::none);

    CHECK_THROWS_AS(aoi::require_valid_policy(p2, {{0.5, 0.9}}), std::invalid_argument);
    CHECK_NOTHROW(aoi::require_valid_policy(p2, {{1.5, 0.72}}));
    CHECK(aoi::describe(aoi::PolicyError::not_monotone) ==
          "thresholds must be nonincreasing in energy level");
}

TEST_CASE("tau accessor is 1-based") {
    const aoi::ThresholdPolicy pol{{1.5, 0.72}};
    CHECK(pol.tau(1) == 1.5);
    CHECK(pol.tau(2) == 0.72);
}

TEST_CASE("policy json round-trip preserves bits") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> gap(0.0, 2.0);
    std::uniform_int_distribution<int> size(1, 8);
    for (int rep = 0; rep < 50; ++rep) {
        const int b = size(rng);
        aoi::SystemParams params{0.25 + gap(rng), b};
        aoi::ThresholdPolicy pol;
        double acc = 0.0;
        pol.taus.resize(b);
        for (int i = b - 1; i >= 0; --i) {
            acc += gap(rng);
            pol.taus[i] = acc;
        }
        const nlohmann::json j = aoi::policy_to_json(params, pol);
        const auto [params2, pol2] = aoi::policy_from_json(j);
        CHECK(std::memcmp(&params2.mu_h, &params.mu_h, sizeof(double)) == 0);
        CHECK(params2.battery == params.battery);
        REQUIRE(pol2.taus.size() == pol.taus.size());
        for (int i = 0; i < b; ++i)
            CHECK(std::memcmp(&pol2.taus[i], &pol.taus[i], sizeof(double)) == 0);
    }
}

TEST_CASE("policy json is strict") {
    using nlohmann::json;
    const json good = {{"mu_h", 1.0}, {"battery", 2}, {"taus", {1.5, 0.72}}};
    CHECK_NOTHROW(aoi::policy_from_json(good));

    json extra = good;
    extra["note"] = "hi";
    CHECK_THROWS_AS(aoi::policy_from_json(extra), std::invalid_argument);

    json missing = {{"mu_h", 1.0}, {"taus", {1.5, 0.72}}};
    CHECK_THROWS_AS(aoi::policy_from_json(missing), std::invalid_argument);

    json bad_type = good;
    bad_type["battery"] = 2.5;
    CHECK_THROWS_AS(aoi::policy_from_json(bad_type), std::invalid_argument);

    json bad_taus = good;
    bad_taus["taus"] = {0.72, 1.5};  // increasing: invalid
    CHECK_THROWS_AS(aoi::policy_from_json(bad_taus), std::invalid_argument);

    json string_tau = good;
    string_tau["taus"] = {"1.5", "0.72"};
    CHECK_THROWS_AS(aoi::policy_from_json(string_tau), std::invalid_argument);

    CHECK_THROWS_AS(aoi::policy_from_json(json::array()), std::invalid_argument);
}
