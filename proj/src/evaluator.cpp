#include "aoi/evaluator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aoi/chain.hpp"
#include "aoi/erlang.hpp"

namespace aoi {

double interupdate_cdf(const SystemParams& params, const ThresholdPolicy& policy,
                       int post_level, double x) {
    require_valid_policy(params, policy);
    const int B = params.battery;
    if (post_level < 0 || post_level >= B)
        throw std::invalid_argument("interupdate_cdf: post_level out of range");
    if (std::isnan(x)) throw std::invalid_argument("interupdate_cdf: x is NaN");

    const int j = post_level;
    if (x < policy.taus[B - 1]) return 0.0;
    if (x >= policy.taus[0]) {
        // Beyond tau_1 the cycle fires on the (1-j)-th arrival; for j >= 1 that
        // count is <= 0, i.e. the cycle has certainly ended.
        return std::isinf(x) ? 1.0 : erlang_cdf(1 - j, params.mu_h, x);
    }
    // Bands [tau_m, tau_{m-1}) partition [tau_B, tau_1); equal thresholds make
    // the lower band empty, so the first hit from the top is the right one.
    for (int m = 2; m <= B; ++m)
        if (x >= policy.tau(m)) return erlang_cdf(m - j, params.mu_h, x);
    return 0.0;  // unreachable: x >= tau_B always matches m = B
}

ConditionalMoments conditional_moments(const SystemParams& params, const ThresholdPolicy& policy,
                                       int post_level) {
    require_valid_policy(params, policy);
    const int B = params.battery;
    if (post_level < 0 || post_level >= B)
        throw std::invalid_argument("conditional_moments: post_level out of range");

    const int j = post_level;
    const double mu = params.mu_h;
    const double tau_low = policy.taus[B - 1];
    const double inf = std::numeric_limits<double>::infinity();

    // E[X]   = tau_B   +     int_{tau_B}^inf  P(X > x) dx
    // E[X^2] = tau_B^2 + 2 * int_{tau_B}^inf x P(X > x) dx
    // with P(X > x) equal to an Erlang survival on each threshold band.
    double mean = tau_low;
    double second = tau_low * tau_low;
    for (int m = B; m >= 2; --m) {
        const double lo = policy.tau(m), hi = policy.tau(m - 1);
        mean += survival_partial_moment(m - j, mu, 0, lo, hi);
        second += 2.0 * survival_partial_moment(m - j, mu, 1, lo, hi);
    }
    mean += survival_partial_moment(1 - j, mu, 0, policy.taus[0], inf);
    second += 2.0 * survival_partial_moment(1 - j, mu, 1, policy.taus[0], inf);
    return {mean, second};
}

PolicyEvaluation average_age(const SystemParams& params, const ThresholdPolicy& policy) {
    ChainModel chain = build_chain(params, policy);
    const int B = params.battery;

    PolicyEvaluation ev;
    ev.stationary = chain.stationary;
    ev.cond_mean.resize(B);
    ev.cond_second.resize(B);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < B; ++j) {
        const ConditionalMoments m = conditional_moments(params, policy, j);
        ev.cond_mean[j] = m.mean;
        ev.cond_second[j] = m.second;
        num += chain.stationary[j] * m.second;
        den += chain.stationary[j] * m.mean;
    }
    if (!(den > 0.0)) throw std::runtime_error("average_age: zero mean cycle length");
    ev.mean_cycle = den;
    ev.avg_age = num / (2.0 * den);
    return ev;
}

double average_age_b2_closed(double mu_h, double tau1, double tau2) {
    const SystemParams params{mu_h, 2};
    require_valid_policy(params, ThresholdPolicy{{tau1, tau2}});

    const double a1 = mu_h * tau1, a2 = mu_h * tau2;
    const double e1 = std::exp(-a1), e2 = std::exp(-a2);
    const double rho1 = e1 / (1.0 - e1 * a1);  // stationary share of the empty state
    const double num = 0.5 * a2 * a2
                     + e2 * (a2 + 1.0 + rho1 * (a2 * a2 + 2.0 * a2 + 2.0))
                     - e1 * (a1 + 1.0 + rho1 * (a1 * a1 + a1 + 1.0));
    const double den = a2 + e2 * (1.0 + rho1 * (a2 + 1.0)) - e1 * (1.0 + rho1 * a1);
    return num / (mu_h * den);
}

double moment_derivative_residual(const SystemParams& params, const ThresholdPolicy& policy,
                                  int level, double step) {
    require_valid_policy(params, policy);
    const int B = params.battery;
    if (level < 1 || level > B)
        throw std::invalid_argument("moment_derivative_residual: level out of range");
    if (!std::isfinite(step) || !(step > 0.0))
        throw std::invalid_argument("moment_derivative_residual: step must be positive and finite");

    const double t = policy.tau(level);
    const double lo = (level == B) ? 0.0 : policy.tau(level + 1);
    const double hi = (level == 1) ? std::numeric_limits<double>::infinity()
                                   : policy.tau(level - 1);
    if (t - step < lo || t + step > hi)
        throw std::invalid_argument("moment_derivative_residual: step leaves the monotone band");

    ThresholdPolicy up = policy, down = policy;
    up.taus[level - 1] = t + step;
    down.taus[level - 1] = t - step;

    double worst = 0.0;
    for (int j = 0; j < B; ++j) {
        const ConditionalMoments p = conditional_moments(params, up, j);
        const ConditionalMoments m = conditional_moments(params, down, j);
        const double dmean = (p.mean - m.mean) / (2.0 * step);
        const double dsecond = (p.second - m.second) / (2.0 * step);
        worst = std::max(worst, std::fabs(dsecond - 2.0 * t * dmean));
    }
    return worst;
}

}  // namespace aoi
