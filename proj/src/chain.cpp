#include "aoi/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aoi/erlang.hpp"

namespace aoi {

std::vector<double> build_transition(const SystemParams& params, const ThresholdPolicy& policy) {
    require_valid_policy(params, policy);
    const int B = params.battery;
    const double mu = params.mu_h;
    std::vector<double> P(static_cast<std::size_t>(B) * B, 0.0);
    if (B == 1) {
        P[0] = 1.0;
        return P;
    }
    for (int j = 0; j < B; ++j) {
        for (int i = 0; i < B; ++i) {
            double p;
            if (i == B - 1) {
                // Fires at the lowest threshold with a full battery.
                p = erlang_cdf(B - j, mu, policy.tau(B - 1));
            } else {
                // Lands at i < B-1 when the cycle ends inside [tau_{i+1}, tau_i);
                // the upper factor degenerates to 1 at i = 0 since tau_0 = +inf.
                const double upper = (i == 0) ? 1.0 : erlang_cdf(1 + i - j, mu, policy.tau(i));
                p = upper - erlang_cdf(2 + i - j, mu, policy.tau(i + 1));
            }
            P[static_cast<std::size_t>(j) * B + i] = std::clamp(p, 0.0, 1.0);
        }
    }
    return P;
}

std::vector<double> stationary_distribution(const std::vector<double>& transition, int size) {
    if (size < 1 || transition.size() != static_cast<std::size_t>(size) * size)
        throw std::invalid_argument("stationary_distribution: bad matrix size");
    const int n = size;
    const auto at = [n](std::vector<double>& m, int r, int c) -> double& {
        return m[static_cast<std::size_t>(r) * n + c];
    };

    // (P^T - I) x = 0 with the last equation replaced by sum(x) = 1.
    std::vector<double> A(static_cast<std::size_t>(n) * n);
    std::vector<double> b(n, 0.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            at(A, r, c) = transition[static_cast<std::size_t>(c) * n + r] - (r == c ? 1.0 : 0.0);
    for (int c = 0; c < n; ++c) at(A, n - 1, c) = 1.0;
    b[n - 1] = 1.0;

    // Gaussian elimination with partial pivoting.
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int r = k + 1; r < n; ++r)
            if (std::fabs(at(A, r, k)) > std::fabs(at(A, piv, k))) piv = r;
        if (at(A, piv, k) == 0.0)
            throw std::runtime_error("stationary_distribution: singular system");
        if (piv != k) {
            for (int c = 0; c < n; ++c) std::swap(at(A, piv, c), at(A, k, c));
            std::swap(b[piv], b[k]);
        }
        for (int r = k + 1; r < n; ++r) {
            const double f = at(A, r, k) / at(A, k, k);
            if (f == 0.0) continue;
            for (int c = k; c < n; ++c) at(A, r, c) -= f * at(A, k, c);
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= at(A, r, c) * x[c];
        x[r] = s / at(A, r, r);
    }

    double sum = 0.0;
    for (double& v : x) {
        v = std::max(v, 0.0);
        sum += v;
    }
    if (!(sum > 0.0)) throw std::runtime_error("stationary_distribution: degenerate solution");
    for (double& v : x) v /= sum;

    double resid = 0.0;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += x[j] * transition[static_cast<std::size_t>(j) * n + i];
        resid = std::max(resid, std::fabs(s - x[i]));
    }
    if (resid > 1e-10)
        throw std::runtime_error("stationary_distribution: residual " + std::to_string(resid));
    return x;
}

ChainModel build_chain(const SystemParams& params, const ThresholdPolicy& policy) {
    ChainModel model;
    model.size = params.battery;
    model.transition = build_transition(params, policy);
    model.stationary = stationary_distribution(model.transition, model.size);
    return model;
}

}  // namespace aoi
