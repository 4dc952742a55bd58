#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aoi/policy.hpp"

namespace aoi {

struct SimulationConfig {
    std::optional<double> horizon;         // run length in time units...
    std::optional<long long> cycle_count;  // ...or number of update cycles to collect
    std::uint64_t seed = 1;
    int replications = 1;
    std::optional<int> initial_battery;    // default: full
    std::optional<double> warmup;          // discarded prefix; default 1% of horizon, 0 in cycle mode
};

struct SimulationResult {
    double estimate = 0.0;                  // time-average age (mean over replications)
    double std_error = 0.0;                 // sample std deviation across replications / sqrt(n)
    long long updates = 0;                  // updates after warmup, all replications
    long long lost_energy = 0;              // arrivals dropped on a full battery after warmup
    std::vector<double> state_frequencies;  // post-update level shares, 0..B-1
};

SimulationResult simulate(const SystemParams& params, const ThresholdPolicy& policy,
                          const SimulationConfig& config);

// One replication in cycle mode, returning the raw cycles for inspection.
struct CycleRecord {
    int level_before = 0;  // post-update level at the start of the cycle
    int level_after = 0;   // post-update level right after it ends
    double length = 0.0;
};

std::vector<CycleRecord> simulate_cycles(const SystemParams& params, const ThresholdPolicy& policy,
                                         std::uint64_t seed, long long cycles,
                                         double warmup_time = 0.0);

}  // namespace aoi
