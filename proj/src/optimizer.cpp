#include "aoi/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "aoi/evaluator.hpp"
#include "aoi/mix.hpp"

namespace aoi {
namespace {

// Thresholds are searched through their nonnegative gaps: tau_B = g_B and
// tau_i = tau_{i+1} + g_i, which turns the monotone cone into a box.
std::vector<double> gaps_to_taus(const std::vector<double>& gaps) {
    std::vector<double> taus(gaps.size());
    double acc = 0.0;
    for (int i = static_cast<int>(gaps.size()) - 1; i >= 0; --i) {
        acc += std::max(gaps[static_cast<std::size_t>(i)], 0.0);
        taus[static_cast<std::size_t>(i)] = acc;
    }
    return taus;
}

struct NmResult {
    std::vector<double> x;
    double fx = 0.0;
    bool converged = false;
};

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& start, double scale, double ftol, double xtol,
                     long long budget, long long& evals) {
    const int n = static_cast<int>(start.size());
    const auto eval = [&](const std::vector<double>& v) {
        ++evals;
        return f(v);
    };

    std::vector<std::vector<double>> xs(static_cast<std::size_t>(n) + 1, start);
    std::vector<double> fs(static_cast<std::size_t>(n) + 1);
    fs[0] = eval(xs[0]);
    for (int k = 0; k < n; ++k) {
        auto& v = xs[static_cast<std::size_t>(k) + 1];
        v[static_cast<std::size_t>(k)] +=
            std::max(0.25 * std::fabs(v[static_cast<std::size_t>(k)]), scale);
        fs[static_cast<std::size_t>(k) + 1] = eval(v);
    }

    const auto order = [&] {
        std::vector<std::size_t> idx(xs.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::vector<std::vector<double>> nx;
        std::vector<double> nf;
        nx.reserve(xs.size());
        nf.reserve(fs.size());
        for (std::size_t i : idx) {
            nx.push_back(std::move(xs[i]));
            nf.push_back(fs[i]);
        }
        xs = std::move(nx);
        fs = std::move(nf);
    };

    const auto shrink = [&] {
        for (std::size_t v = 1; v < xs.size(); ++v) {
            for (int k = 0; k < n; ++k)
                xs[v][static_cast<std::size_t>(k)] =
                    xs[0][static_cast<std::size_t>(k)] +
                    0.5 * (xs[v][static_cast<std::size_t>(k)] - xs[0][static_cast<std::size_t>(k)]);
            fs[v] = eval(xs[v]);
        }
    };

    bool converged = false;
    while (true) {
        order();
        bool tight = fs.back() - fs.front() <= ftol * std::fabs(fs.front());
        for (std::size_t v = 1; v < xs.size() && tight; ++v)
            for (int k = 0; k < n && tight; ++k)
                if (std::fabs(xs[v][static_cast<std::size_t>(k)] -
                              xs[0][static_cast<std::size_t>(k)]) > xtol)
                    tight = false;
        if (tight) {
            converged = true;
            break;
        }
        if (evals >= budget) break;

        std::vector<double> centroid(static_cast<std::size_t>(n), 0.0);
        for (std::size_t v = 0; v + 1 < xs.size(); ++v)
            for (int k = 0; k < n; ++k)
                centroid[static_cast<std::size_t>(k)] += xs[v][static_cast<std::size_t>(k)];
        for (int k = 0; k < n; ++k) centroid[static_cast<std::size_t>(k)] /= n;

        const auto along = [&](double c) {
            std::vector<double> p(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k)
                p[static_cast<std::size_t>(k)] =
                    centroid[static_cast<std::size_t>(k)] +
                    c * (centroid[static_cast<std::size_t>(k)] -
                         xs.back()[static_cast<std::size_t>(k)]);
            return p;
        };

        auto reflected = along(1.0);
        const double fr = eval(reflected);
        if (fr < fs[0]) {
            auto expanded = along(2.0);
            const double fe = eval(expanded);
            if (fe < fr) {
                xs.back() = std::move(expanded);
                fs.back() = fe;
            } else {
                xs.back() = std::move(reflected);
                fs.back() = fr;
            }
        } else if (fr < fs[fs.size() - 2]) {
            xs.back() = std::move(reflected);
            fs.back() = fr;
        } else if (fr < fs.back()) {
            auto contracted = along(0.5);
            const double fc = eval(contracted);
            if (fc <= fr) {
                xs.back() = std::move(contracted);
                fs.back() = fc;
            } else {
                shrink();
            }
        } else {
            auto contracted = along(-0.5);
            const double fc = eval(contracted);
            if (fc < fs.back()) {
                xs.back() = std::move(contracted);
                fs.back() = fc;
            } else {
                shrink();
            }
        }
    }
    order();
    return {xs[0], fs[0], converged};
}

struct StartResult {
    std::vector<double> gaps;
    double fx = 0.0;
    bool converged = false;
};

StartResult run_start(const SystemParams& params, const std::vector<double>& g0, double tol,
                      long long budget, long long& total_evals) {
    const auto objective = [&params](const std::vector<double>& gaps) {
        return average_age(params, ThresholdPolicy{gaps_to_taus(gaps)}).avg_age;
    };
    long long used = 0;
    NmResult r = nelder_mead(objective, g0, 0.1 / params.mu_h, tol, tol / params.mu_h,
                             budget, used);
    total_evals += used;
    for (double& g : r.x) g = std::max(g, 0.0);
    return {std::move(r.x), r.fx, r.converged};
}

}  // namespace

OptimizationReport optimize_thresholds(const SystemParams& params,
                                       const OptimizerOptions& options) {
    require_valid(params);
    if (options.restarts < 1)
        throw std::invalid_argument("optimize: restarts must be >= 1");
    if (options.max_evals < 1)
        throw std::invalid_argument("optimize: max_evals must be >= 1");
    if (!std::isfinite(options.tol) || !(options.tol > 0.0) || !(options.tol < 1.0))
        throw std::invalid_argument("optimize: tol must be in (0, 1)");

    const double mu = params.mu_h;
    OptimizationReport report;
    std::vector<double> grown_taus;  // best policy of the previous size
    double grown_age = 0.0;

    // Solve sizes 1..B in turn; each size seeds the next one's deterministic start.
    for (int b = 1; b <= params.battery; ++b) {
        const SystemParams sized{mu, b};
        const bool target = (b == params.battery);

        std::vector<double> g0;
        if (b == 1) {
            g0 = {1.0 / mu};
        } else {
            // Extend the previous optimum by one slot firing at its own value,
            // clamped so the grown policy stays monotone.
            std::vector<double> taus = grown_taus;
            taus.push_back(std::min(grown_age, taus.back()));
            g0.resize(static_cast<std::size_t>(b));
            for (int i = 0; i < b; ++i)
                g0[static_cast<std::size_t>(i)] =
                    taus[static_cast<std::size_t>(i)] -
                    (i + 1 < b ? taus[static_cast<std::size_t>(i) + 1] : 0.0);
        }

        std::vector<double> best_g;
        double best_f = std::numeric_limits<double>::infinity();
        bool best_converged = false;

        for (int r = 0; r < options.restarts; ++r) {
            std::vector<double> start;
            if (r == 0) {
                start = g0;
            } else {
                std::mt19937_64 rng(mix64(options.seed + (static_cast<std::uint64_t>(b) << 16) +
                                          static_cast<std::uint64_t>(r)));
                start.resize(static_cast<std::size_t>(b));
                for (double& g : start)
                    g = static_cast<double>(rng() >> 11) * 0x1.0p-53 * (2.0 / mu);
            }
            StartResult res = run_start(sized, start, options.tol, options.max_evals,
                                        report.evals);
            if (target) report.restart_trace.push_back(res.fx);
            if (res.fx < best_f) {
                best_f = res.fx;
                best_g = std::move(res.gaps);
                best_converged = res.converged;
            }
        }

        grown_taus = gaps_to_taus(best_g);
        grown_age = best_f;
        if (target) {
            report.best_policy.taus = grown_taus;
            report.best_age = best_f;
            report.converged = best_converged;
            report.fixed_point_residual = std::fabs(grown_taus.back() - best_f);
        }
    }
    return report;
}

std::vector<SweepRow> sweep(std::vector<int> batteries, std::vector<double> rates,
                            const OptimizerOptions& options) {
    if (batteries.empty() || rates.empty())
        throw std::invalid_argument("sweep: grids must be nonempty");
    std::sort(batteries.begin(), batteries.end());
    batteries.erase(std::unique(batteries.begin(), batteries.end()), batteries.end());
    std::sort(rates.begin(), rates.end());
    rates.erase(std::unique(rates.begin(), rates.end()), rates.end());
    for (int b : batteries)
        if (b < 1) throw std::invalid_argument("sweep: battery sizes must be >= 1");
    for (double mu : rates)
        if (!std::isfinite(mu) || !(mu > 0.0))
            throw std::invalid_argument("sweep: rates must be positive and finite");

    std::vector<SweepRow> rows;
    rows.reserve(batteries.size() * rates.size());
    for (int b : batteries) {
        for (double mu : rates) {
            OptimizationReport rep = optimize_thresholds({mu, b}, options);
            rows.push_back({b, mu, rep.best_policy, rep.best_age, rep.converged});
        }
    }
    return rows;
}

}  // namespace aoi
