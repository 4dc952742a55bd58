#include "aoi/simulator.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "aoi/mix.hpp"

namespace aoi {
namespace {

struct ExpSampler {
    std::mt19937_64 rng;
    double rate;

    ExpSampler(std::uint64_t seed, double rate_) : rng(seed), rate(rate_) {}

    double operator()() {
        // 53-bit uniform in [0, 1); keeps the log argument inside (0, 1].
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return -std::log1p(-u) / rate;
    }
};

struct RepConfig {
    double horizon = 0.0;  // used when cycles == 0
    long long cycles = 0;  // > 0 selects cycle mode
    double warmup = 0.0;
    int initial_level = 0;
};

struct RepStats {
    double area = 0.0;  // age integral over the measured window
    double sum_x = 0.0;
    double sum_x2 = 0.0;
    long long updates = 0;
    long long lost = 0;
    std::vector<long long> level_counts;
};

// Event-driven pass over one sample path. The age grows linearly between
// updates, so the integral is exact; no time stepping is involved.
RepStats run_replication(const SystemParams& params, const ThresholdPolicy& policy,
                         std::uint64_t seed, const RepConfig& cfg,
                         std::vector<CycleRecord>* trace) {
    const int B = params.battery;
    const std::vector<double>& taus = policy.taus;
    const double inf = std::numeric_limits<double>::infinity();
    const bool cycle_mode = cfg.cycles > 0;
    const double t_end = cycle_mode ? inf : cfg.horizon;
    const double t_w = cfg.warmup;

    RepStats st;
    st.level_counts.assign(B, 0);

    ExpSampler next_exp(seed, params.mu_h);
    int level = cfg.initial_level;
    int cycle_level = level;  // post-update level at the start of the open cycle
    double now = 0.0;
    double last_update = 0.0;
    double arrival = next_exp();
    long long counted = 0;

    // Age integral of the open cycle clipped to the measured window.
    const auto clipped_area = [&](double start, double stop) {
        const double lo = std::max(start, t_w), hi = std::min(stop, t_end);
        if (hi <= lo) return 0.0;
        return 0.5 * ((hi - start) * (hi - start) - (lo - start) * (lo - start));
    };

    while (true) {
        // Next threshold crossing; an update may also be overdue right after an
        // arrival raised the level, in which case it fires at the current time.
        const double t_fire =
            (level >= 1) ? std::max(last_update + taus[level - 1], now) : inf;
        if (t_fire < arrival) {
            if (!cycle_mode && t_fire > t_end) break;
            if (level < 1 || t_fire < last_update)
                throw std::logic_error("simulate: update invariant violated");
            if (!cycle_mode) st.area += clipped_area(last_update, t_fire);
            --level;
            now = t_fire;
            if (t_fire > t_w) {
                ++st.updates;
                ++st.level_counts[level];
                const double x = t_fire - last_update;
                st.sum_x += x;
                st.sum_x2 += x * x;
                if (trace) trace->push_back({cycle_level, level, x});
                if (cycle_mode && ++counted == cfg.cycles) break;
            }
            last_update = t_fire;
            cycle_level = level;
        } else {
            if (!cycle_mode && arrival > t_end) break;
            now = arrival;
            if (level == B) {
                if (now > t_w) ++st.lost;
            } else {
                ++level;
            }
            arrival = now + next_exp();
        }
    }
    if (!cycle_mode) st.area += clipped_area(last_update, t_end);
    return st;
}

}  // namespace

SimulationResult simulate(const SystemParams& params, const ThresholdPolicy& policy,
                          const SimulationConfig& config) {
    require_valid_policy(params, policy);
    const int B = params.battery;
    if (config.horizon.has_value() == config.cycle_count.has_value())
        throw std::invalid_argument("simulate: set exactly one of horizon and cycle_count");
    if (config.replications < 1)
        throw std::invalid_argument("simulate: replications must be >= 1");
    const int init = config.initial_battery.value_or(B);
    if (init < 0 || init > B)
        throw std::invalid_argument("simulate: initial_battery out of range");

    RepConfig rep;
    rep.initial_level = init;
    if (config.horizon) {
        const double h = *config.horizon;
        if (!std::isfinite(h) || !(h > 0.0))
            throw std::invalid_argument("simulate: horizon must be positive and finite");
        rep.horizon = h;
        rep.warmup = config.warmup.value_or(0.01 * h);
    } else {
        if (*config.cycle_count < 1)
            throw std::invalid_argument("simulate: cycle_count must be >= 1");
        rep.cycles = *config.cycle_count;
        rep.warmup = config.warmup.value_or(0.0);
    }
    if (!std::isfinite(rep.warmup) || rep.warmup < 0.0)
        throw std::invalid_argument("simulate: warmup must be nonnegative and finite");
    if (config.horizon && rep.warmup >= rep.horizon)
        throw std::invalid_argument("simulate: warmup must leave a positive window");

    SimulationResult out;
    out.state_frequencies.assign(B, 0.0);
    std::vector<long long> counts(B, 0);
    std::vector<double> estimates;
    estimates.reserve(config.replications);

    for (int r = 0; r < config.replications; ++r) {
        const std::uint64_t seed = mix64(config.seed + static_cast<std::uint64_t>(r));
        const RepStats st = run_replication(params, policy, seed, rep, nullptr);
        double estimate;
        if (config.horizon) {
            estimate = st.area / (rep.horizon - rep.warmup);
        } else {
            if (!(st.sum_x > 0.0)) throw std::logic_error("simulate: degenerate cycle sample");
            estimate = st.sum_x2 / (2.0 * st.sum_x);
        }
        estimates.push_back(estimate);
        out.updates += st.updates;
        out.lost_energy += st.lost;
        for (int j = 0; j < B; ++j) counts[j] += st.level_counts[j];
    }

    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(estimates.size());
    out.estimate = mean;
    if (estimates.size() > 1) {
        double ss = 0.0;
        for (double e : estimates) ss += (e - mean) * (e - mean);
        out.std_error =
            std::sqrt(ss / (static_cast<double>(estimates.size()) *
                            static_cast<double>(estimates.size() - 1)));
    }
    if (out.updates > 0)
        for (int j = 0; j < B; ++j)
            out.state_frequencies[j] =
                static_cast<double>(counts[j]) / static_cast<double>(out.updates);
    return out;
}

std::vector<CycleRecord> simulate_cycles(const SystemParams& params, const ThresholdPolicy& policy,
                                         std::uint64_t seed, long long cycles,
                                         double warmup_time) {
    require_valid_policy(params, policy);
    if (cycles < 1) throw std::invalid_argument("simulate_cycles: cycles must be >= 1");
    if (!std::isfinite(warmup_time) || warmup_time < 0.0)
        throw std::invalid_argument("simulate_cycles: warmup must be nonnegative and finite");

    RepConfig rep;
    rep.cycles = cycles;
    rep.warmup = warmup_time;
    rep.initial_level = params.battery;

    std::vector<CycleRecord> trace;
    trace.reserve(static_cast<std::size_t>(cycles));
    run_replication(params, policy, mix64(seed), rep, &trace);
    return trace;
}

}  // namespace aoi
