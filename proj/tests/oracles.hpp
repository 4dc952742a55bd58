#pragma once

// Slow reference implementations used only to cross-check the library. They
// share no code with it: densities go through lgamma, integrals through
// adaptive Simpson, stationary vectors through power iteration.

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

inline double simpson(double h, double fa, double fm, double fb) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adapt(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(m - a, fa, flm, fm);
    const double right = simpson(b - m, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-13) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adapt(f, a, b, fa, fm, fb, simpson(b - a, fa, fm, fb), eps, 48);
}

// Integral over [a, inf) by fixed-width segments until the tail dies out.
inline double integrate_tail(const std::function<double(double)>& f, double a, double seg,
                             double eps = 1e-13) {
    double total = 0.0, x = a;
    for (int i = 0; i < 5000; ++i) {
        const double piece = integrate(f, x, x + seg, eps);
        total += piece;
        x += seg;
        if (i > 2 && std::fabs(piece) < 0.01 * eps) break;
    }
    return total;
}

inline double erlang_pdf(int shape, double rate, double x) {
    if (shape <= 0 || x < 0.0) return 0.0;
    if (x == 0.0) return shape == 1 ? rate : 0.0;
    const double logp = shape * std::log(rate) + (shape - 1) * std::log(x) - rate * x -
                        std::lgamma(static_cast<double>(shape));
    return std::exp(logp);
}

inline double erlang_survival(int shape, double rate, double x) {
    if (shape <= 0) return 0.0;
    const auto f = [&](double y) { return erlang_pdf(shape, rate, y); };
    return integrate_tail(f, x, 1.0 / rate);
}

inline double erlang_cdf(int shape, double rate, double x) {
    if (shape <= 0) return 1.0;
    return 1.0 - erlang_survival(shape, rate, x);
}

// int_lo^hi x^power P(sum > x) dx, rewritten by swapping the integration order
// so only one quadrature pass over the density is needed:
//   int pdf(y) * g(min(y, hi)) dy over y > lo, with g(u) the inner power integral.
inline double survival_partial_moment(int shape, double rate, int power, double lo, double hi) {
    if (shape <= 0) return 0.0;
    const double q = power + 1;
    const auto inner = [&](double upper) {
        return (std::pow(upper, q) - std::pow(lo, q)) / q;
    };
    const auto f = [&](double y) { return erlang_pdf(shape, rate, y) * inner(y); };
    if (std::isinf(hi)) return integrate_tail(f, lo, 1.0 / rate);
    return integrate(f, lo, hi) + inner(hi) * erlang_survival(shape, rate, hi);
}

inline std::vector<double> stationary_power(const std::vector<double>& transition, int n,
                                            int iters = 400000, double tol = 1e-15) {
    std::vector<double> v(n, 1.0 / n), w(n);
    for (int it = 0; it < iters; ++it) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += v[j] * transition[static_cast<std::size_t>(j) * n + i];
            w[i] = s;
        }
        double diff = 0.0, sum = 0.0;
        for (int i = 0; i < n; ++i) sum += w[i];
        for (int i = 0; i < n; ++i) {
            w[i] /= sum;
            diff = std::max(diff, std::fabs(w[i] - v[i]));
        }
        v = w;
        if (diff < tol) break;
    }
    return v;
}

}  // namespace oracles
