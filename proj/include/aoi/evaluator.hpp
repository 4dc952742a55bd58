#pragma once

#include <vector>

#include "aoi/policy.hpp"

namespace aoi {

struct PolicyEvaluation {
    double avg_age = 0.0;             // long-run time average of the age process
    double mean_cycle = 0.0;          // stationary mean time between updates
    std::vector<double> cond_mean;    // E[X | start level j], j = 0..B-1
    std::vector<double> cond_second;  // E[X^2 | start level j]
    std::vector<double> stationary;   // post-update level distribution
};

// P(X <= x) for an update cycle that begins at post-update level `post_level`.
double interupdate_cdf(const SystemParams& params, const ThresholdPolicy& policy,
                       int post_level, double x);

struct ConditionalMoments {
    double mean = 0.0;
    double second = 0.0;
};

ConditionalMoments conditional_moments(const SystemParams& params, const ThresholdPolicy& policy,
                                       int post_level);

PolicyEvaluation average_age(const SystemParams& params, const ThresholdPolicy& policy);

// Two-slot battery in closed form; agrees with average_age to numerical precision.
double average_age_b2_closed(double mu_h, double tau1, double tau2);

// Central-difference check of the identity d(E[X^2])/d(tau) = 2 tau d(E[X])/d(tau)
// at threshold `level` (1-based); returns the worst defect over start levels.
// Requires tau_level +- step to stay inside the monotone band.
double moment_derivative_residual(const SystemParams& params, const ThresholdPolicy& policy,
                                  int level, double step);

}  // namespace aoi
