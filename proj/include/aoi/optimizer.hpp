#pragma once

#include <cstdint>
#include <vector>

#include "aoi/policy.hpp"

namespace aoi {

struct OptimizerOptions {
    int restarts = 8;             // first start is deterministic, the rest are random
    long long max_evals = 20000;  // objective-evaluation budget per start
    double tol = 1e-9;            // relative objective spread / scaled simplex width target
    std::uint64_t seed = 1;
};

struct OptimizationReport {
    ThresholdPolicy best_policy;
    double best_age = 0.0;
    double fixed_point_residual = 0.0;  // |tau_B - best_age|; small at a true optimum
    long long evals = 0;                // objective evaluations across all stages
    bool converged = false;             // the winning start met the tolerance
    std::vector<double> restart_trace;  // best value found by each start, in order
};

OptimizationReport optimize_thresholds(const SystemParams& params,
                                       const OptimizerOptions& options = {});

struct SweepRow {
    int battery = 0;
    double mu_h = 0.0;
    ThresholdPolicy policy;
    double avg_age = 0.0;
    bool converged = false;
};

// Optimizes every (battery, mu_h) pair; batteries ascending outer, rates ascending inner.
std::vector<SweepRow> sweep(std::vector<int> batteries, std::vector<double> rates,
                            const OptimizerOptions& options = {});

}  // namespace aoi
