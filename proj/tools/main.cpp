#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aoi/evaluator.hpp"
#include "aoi/optimizer.hpp"
#include "aoi/policy.hpp"
#include "aoi/policy_json.hpp"
#include "aoi/simulator.hpp"

namespace {

using nlohmann::json;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Manifest fields and command-line flags merged into one place; flags win.
struct Inputs {
    std::optional<double> mu_h;
    std::optional<int> battery;
    std::optional<std::vector<double>> taus;

    std::optional<int> restarts;
    std::optional<long long> max_evals;
    std::optional<double> tol;
    std::optional<std::uint64_t> opt_seed;

    std::optional<double> horizon;
    std::optional<long long> cycles;
    std::optional<std::uint64_t> sim_seed;
    std::optional<int> replications;
    std::optional<int> initial_battery;
    std::optional<double> warmup;

    std::optional<std::vector<int>> battery_grid;
    std::optional<std::vector<double>> rate_grid;

    std::optional<std::string> output;
};

void expect_keys(const json& j, const std::string& what,
                 std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) known = true;
        if (!known)
            throw ValidationError("manifest: unknown field \"" + item.key() + "\" in " + what);
    }
}

double as_number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ValidationError("manifest: " + what + " must be a number");
    return v.get<double>();
}

long long as_integer(const json& v, const std::string& what) {
    if (!v.is_number_integer()) throw ValidationError("manifest: " + what + " must be an integer");
    return v.get<long long>();
}

int as_int(const json& v, const std::string& what) {
    const long long x = as_integer(v, what);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw ValidationError("manifest: " + what + " is out of range");
    return static_cast<int>(x);
}

std::uint64_t as_seed(const json& v, const std::string& what) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0)
        return static_cast<std::uint64_t>(v.get<long long>());
    throw ValidationError("manifest: " + what + " must be a nonnegative integer");
}

json load_manifest(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read manifest " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("cannot read manifest " + path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
}

Inputs parse_manifest(const json& j, const std::string& cmd) {
    Inputs in;
    if (!j.is_object()) throw ValidationError("manifest: expected a JSON object");
    expect_keys(j, "manifest",
                {"command", "params", "policy", "optimizer", "simulation", "grid", "output_path"});

    if (j.contains("command")) {
        if (!j["command"].is_string())
            throw ValidationError("manifest: command must be a string");
        const std::string c = j["command"].get<std::string>();
        if (c != cmd)
            throw ValidationError("manifest: command \"" + c + "\" does not match subcommand \"" +
                                  cmd + "\"");
    }

    const bool takes_policy = (cmd == "evaluate" || cmd == "simulate");
    const bool takes_optimizer = (cmd == "optimize" || cmd == "sweep");

    if (j.contains("params")) {
        if (cmd == "sweep")
            throw ValidationError("manifest: params is not used by sweep (use grid)");
        const json& p = j["params"];
        if (!p.is_object()) throw ValidationError("manifest: params must be an object");
        expect_keys(p, "params", {"mu_h", "battery"});
        if (!p.contains("mu_h") || !p.contains("battery"))
            throw ValidationError("manifest: params needs mu_h and battery");
        in.mu_h = as_number(p["mu_h"], "params.mu_h");
        in.battery = as_int(p["battery"], "params.battery");
    }

    if (j.contains("policy")) {
        if (!takes_policy)
            throw ValidationError("manifest: policy is not used by " + cmd);
        std::pair<aoi::SystemParams, aoi::ThresholdPolicy> parsed;
        try {
            parsed = aoi::policy_from_json(j["policy"]);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(std::string("manifest: ") + e.what());
        }
        if (in.mu_h && *in.mu_h != parsed.first.mu_h)
            throw ValidationError("manifest: params.mu_h and policy.mu_h disagree");
        if (in.battery && *in.battery != parsed.first.battery)
            throw ValidationError("manifest: params.battery and policy.battery disagree");
        in.mu_h = parsed.first.mu_h;
        in.battery = parsed.first.battery;
        in.taus = parsed.second.taus;
    }

    if (j.contains("optimizer")) {
        if (!takes_optimizer)
            throw ValidationError("manifest: optimizer is not used by " + cmd);
        const json& o = j["optimizer"];
        if (!o.is_object()) throw ValidationError("manifest: optimizer must be an object");
        expect_keys(o, "optimizer", {"restarts", "max_evals", "tol", "seed"});
        if (o.contains("restarts")) in.restarts = as_int(o["restarts"], "optimizer.restarts");
        if (o.contains("max_evals"))
            in.max_evals = as_integer(o["max_evals"], "optimizer.max_evals");
        if (o.contains("tol")) in.tol = as_number(o["tol"], "optimizer.tol");
        if (o.contains("seed")) in.opt_seed = as_seed(o["seed"], "optimizer.seed");
    }

    if (j.contains("simulation")) {
        if (cmd != "simulate")
            throw ValidationError("manifest: simulation is not used by " + cmd);
        const json& s = j["simulation"];
        if (!s.is_object()) throw ValidationError("manifest: simulation must be an object");
        expect_keys(s, "simulation",
                    {"horizon", "cycle_count", "seed", "replications", "initial_battery", "warmup"});
        if (s.contains("horizon")) in.horizon = as_number(s["horizon"], "simulation.horizon");
        if (s.contains("cycle_count"))
            in.cycles = as_integer(s["cycle_count"], "simulation.cycle_count");
        if (s.contains("seed")) in.sim_seed = as_seed(s["seed"], "simulation.seed");
        if (s.contains("replications"))
            in.replications = as_int(s["replications"], "simulation.replications");
        if (s.contains("initial_battery"))
            in.initial_battery = as_int(s["initial_battery"], "simulation.initial_battery");
        if (s.contains("warmup")) in.warmup = as_number(s["warmup"], "simulation.warmup");
    }

    if (j.contains("grid")) {
        if (cmd != "sweep") throw ValidationError("manifest: grid is only used by sweep");
        const json& g = j["grid"];
        if (!g.is_object()) throw ValidationError("manifest: grid must be an object");
        expect_keys(g, "grid", {"mu_h", "battery"});
        if (!g.contains("mu_h") || !g.contains("battery"))
            throw ValidationError("manifest: grid needs mu_h and battery arrays");
        if (!g["mu_h"].is_array() || !g["battery"].is_array())
            throw ValidationError("manifest: grid.mu_h and grid.battery must be arrays");
        std::vector<double> rates;
        for (const auto& v : g["mu_h"]) rates.push_back(as_number(v, "grid.mu_h entry"));
        std::vector<int> batteries;
        for (const auto& v : g["battery"]) batteries.push_back(as_int(v, "grid.battery entry"));
        in.rate_grid = std::move(rates);
        in.battery_grid = std::move(batteries);
    }

    if (j.contains("output_path")) {
        if (!j["output_path"].is_string())
            throw ValidationError("manifest: output_path must be a string");
        in.output = j["output_path"].get<std::string>();
    }
    return in;
}

template <typename T>
const T& need(const std::optional<T>& v, const std::string& what, const std::string& hint) {
    if (!v) throw ValidationError("missing required input " + what + " (" + hint + ")");
    return *v;
}

void emit(const std::string& text, const std::optional<std::string>& out) {
    if (!out) {
        std::cout << text;
        return;
    }
    std::filesystem::path p = *out;
    if (p.is_relative())
        if (const char* dir = std::getenv("AOI_OUTPUT_DIR"); dir && *dir)
            p = std::filesystem::path(dir) / p;
    std::ofstream f(p);
    if (!f) throw IoError("cannot open output file " + p.string());
    f << text;
    f.flush();
    if (!f) throw IoError("failed writing " + p.string());
}

std::string fmt(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string sweep_csv(const std::vector<aoi::SweepRow>& rows) {
    int widest = 0;
    for (const auto& r : rows) widest = std::max(widest, r.battery);
    std::string s = "battery,mu_h,avg_age";
    for (int i = 1; i <= widest; ++i) s += ",tau_" + std::to_string(i);
    s += ",converged\n";
    for (const auto& r : rows) {
        s += std::to_string(r.battery) + "," + fmt(r.mu_h) + "," + fmt(r.avg_age);
        for (int i = 0; i < widest; ++i) {
            s += ",";
            if (i < r.battery) s += fmt(r.policy.taus[static_cast<std::size_t>(i)]);
        }
        s += r.converged ? ",true\n" : ",false\n";
    }
    return s;
}

aoi::OptimizerOptions optimizer_options(const Inputs& in) {
    aoi::OptimizerOptions opt;
    if (in.restarts) opt.restarts = *in.restarts;
    if (in.max_evals) opt.max_evals = *in.max_evals;
    if (in.tol) opt.tol = *in.tol;
    if (in.opt_seed) opt.seed = *in.opt_seed;
    return opt;
}

int run_evaluate(const Inputs& in) {
    const aoi::SystemParams params{need(in.mu_h, "mu_h", "--mu-h or manifest"),
                                   need(in.battery, "battery", "--battery or manifest")};
    const aoi::ThresholdPolicy policy{need(in.taus, "taus", "--taus or manifest policy")};
    aoi::require_valid_policy(params, policy);
    const aoi::PolicyEvaluation ev = aoi::average_age(params, policy);
    const json out = {{"avg_age", ev.avg_age},
                      {"mean_cycle", ev.mean_cycle},
                      {"cond_mean", ev.cond_mean},
                      {"cond_second", ev.cond_second},
                      {"stationary", ev.stationary}};
    emit(out.dump(2) + "\n", in.output);
    return 0;
}

int run_optimize(const Inputs& in) {
    const aoi::SystemParams params{need(in.mu_h, "mu_h", "--mu-h or manifest"),
                                   need(in.battery, "battery", "--battery or manifest")};
    aoi::require_valid(params);
    const aoi::OptimizationReport rep = aoi::optimize_thresholds(params, optimizer_options(in));
    const json out = {{"best_policy", aoi::policy_to_json(params, rep.best_policy)},
                      {"best_age", rep.best_age},
                      {"fixed_point_residual", rep.fixed_point_residual},
                      {"evals", rep.evals},
                      {"converged", rep.converged},
                      {"restart_trace", rep.restart_trace}};
    emit(out.dump(2) + "\n", in.output);
    return rep.converged ? 0 : 3;
}

int run_simulate(const Inputs& in) {
    const aoi::SystemParams params{need(in.mu_h, "mu_h", "--mu-h or manifest"),
                                   need(in.battery, "battery", "--battery or manifest")};
    const aoi::ThresholdPolicy policy{need(in.taus, "taus", "--taus or manifest policy")};
    aoi::SimulationConfig cfg;
    cfg.horizon = in.horizon;
    cfg.cycle_count = in.cycles;
    if (in.sim_seed) cfg.seed = *in.sim_seed;
    if (in.replications) cfg.replications = *in.replications;
    cfg.initial_battery = in.initial_battery;
    cfg.warmup = in.warmup;
    const aoi::SimulationResult res = aoi::simulate(params, policy, cfg);
    const json out = {{"estimate", res.estimate},
                      {"std_error", res.std_error},
                      {"updates", res.updates},
                      {"lost_energy", res.lost_energy},
                      {"state_frequencies", res.state_frequencies}};
    emit(out.dump(2) + "\n", in.output);
    return 0;
}

int run_sweep(const Inputs& in) {
    const std::vector<aoi::SweepRow> rows =
        aoi::sweep(need(in.battery_grid, "battery grid", "--battery or manifest grid"),
                   need(in.rate_grid, "mu_h grid", "--mu-h or manifest grid"),
                   optimizer_options(in));
    emit(sweep_csv(rows), in.output);
    const bool all_converged =
        std::all_of(rows.begin(), rows.end(), [](const aoi::SweepRow& r) { return r.converged; });
    return all_converged ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"threshold update policies for an energy-harvesting status updater"};
    app.require_subcommand(1);

    std::string manifest_path, out_path;
    double mu_h = 0.0, tol = 0.0, horizon = 0.0, warmup = 0.0;
    int battery = 0, restarts = 0, replications = 0, initial_battery = 0;
    long long max_evals = 0, cycles = 0;
    std::uint64_t seed = 0;
    std::vector<double> taus, rate_grid;
    std::vector<int> battery_grid;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--manifest", manifest_path, "JSON run manifest");
        sub->add_option("--out", out_path,
                        "output file (relative paths resolve under $AOI_OUTPUT_DIR)");
    };

    CLI::App* evaluate = app.add_subcommand("evaluate", "analytic age of a fixed policy");
    add_common(evaluate);
    evaluate->add_option("--mu-h", mu_h, "energy arrival rate");
    evaluate->add_option("--battery", battery, "battery capacity");
    evaluate->add_option("--taus", taus, "thresholds, highest level last")->delimiter(',');

    CLI::App* optimize = app.add_subcommand("optimize", "search for the best policy");
    add_common(optimize);
    optimize->add_option("--mu-h", mu_h, "energy arrival rate");
    optimize->add_option("--battery", battery, "battery capacity");
    optimize->add_option("--restarts", restarts, "search restarts");
    optimize->add_option("--max-evals", max_evals, "evaluation budget per restart");
    optimize->add_option("--tol", tol, "convergence tolerance");
    optimize->add_option("--seed", seed, "restart seed");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo age of a fixed policy");
    add_common(simulate);
    simulate->add_option("--mu-h", mu_h, "energy arrival rate");
    simulate->add_option("--battery", battery, "battery capacity");
    simulate->add_option("--taus", taus, "thresholds, highest level last")->delimiter(',');
    simulate->add_option("--horizon", horizon, "run length in time units");
    simulate->add_option("--cycles", cycles, "update cycles to collect instead of a horizon");
    simulate->add_option("--seed", seed, "simulation seed");
    simulate->add_option("--replications", replications, "independent replications");
    simulate->add_option("--initial-battery", initial_battery, "starting energy level");
    simulate->add_option("--warmup", warmup, "discarded prefix in time units");

    CLI::App* sweep = app.add_subcommand("sweep", "optimize over a (battery, mu_h) grid");
    add_common(sweep);
    sweep->add_option("--mu-h", rate_grid, "energy rate grid")->delimiter(',');
    sweep->add_option("--battery", battery_grid, "battery size grid")->delimiter(',');
    sweep->add_option("--restarts", restarts, "search restarts");
    sweep->add_option("--max-evals", max_evals, "evaluation budget per restart");
    sweep->add_option("--tol", tol, "convergence tolerance");
    sweep->add_option("--seed", seed, "restart seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();

    try {
        Inputs in;
        if (sub->count("--manifest")) in = parse_manifest(load_manifest(manifest_path), cmd);

        if (sub->count("--out")) in.output = out_path;
        if (cmd == "sweep") {
            if (sub->count("--mu-h")) in.rate_grid = rate_grid;
            if (sub->count("--battery")) in.battery_grid = battery_grid;
        } else {
            if (sub->count("--mu-h")) in.mu_h = mu_h;
            if (sub->count("--battery")) in.battery = battery;
        }
        if (cmd == "evaluate" || cmd == "simulate")
            if (sub->count("--taus")) in.taus = taus;
        if (cmd == "optimize" || cmd == "sweep") {
            if (sub->count("--restarts")) in.restarts = restarts;
            if (sub->count("--max-evals")) in.max_evals = max_evals;
            if (sub->count("--tol")) in.tol = tol;
            if (sub->count("--seed")) in.opt_seed = seed;
        }
        if (cmd == "simulate") {
            if (sub->count("--horizon")) in.horizon = horizon;
            if (sub->count("--cycles")) in.cycles = cycles;
            if (sub->count("--seed")) in.sim_seed = seed;
            if (sub->count("--replications")) in.replications = replications;
            if (sub->count("--initial-battery")) in.initial_battery = initial_battery;
            if (sub->count("--warmup")) in.warmup = warmup;
        }

        if (cmd == "evaluate") return run_evaluate(in);
        if (cmd == "optimize") return run_optimize(in);
        if (cmd == "simulate") return run_simulate(in);
        return run_sweep(in);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
