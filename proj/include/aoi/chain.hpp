#pragma once

#include <vector>

#include "aoi/policy.hpp"

namespace aoi {

// Discrete chain over post-update energy levels 0..B-1, sampled at update
// instants. transition is row-major; at(j, i) is the one-step probability of
// moving from level j to level i.
struct ChainModel {
    int size = 0;
    std::vector<double> transition;
    std::vector<double> stationary;

    double at(int j, int i) const {
        return transition[static_cast<std::size_t>(j) * size + i];
    }
};

std::vector<double> build_transition(const SystemParams& params, const ThresholdPolicy& policy);

// Solves pi * P = pi with sum(pi) = 1 by direct elimination. Throws
// std::runtime_error if the verification residual exceeds 1e-10.
std::vector<double> stationary_distribution(const std::vector<double>& transition, int size);

ChainModel build_chain(const SystemParams& params, const ThresholdPolicy& policy);

}  // namespace aoi
