#include "aoi/erlang.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoi {
namespace {

void check_rate(double rate) {
    if (!std::isfinite(rate) || !(rate > 0.0))
        throw std::invalid_argument("erlang: rate must be positive and finite");
}

// P(fewer than n counts by exposure y) = sum_{i<n} e^-y y^i / i!.
// The folded recurrence never overflows; for y beyond ~745 the terms underflow
// to zero, which is the correct answer at working precision.
double poisson_below(int n, double y) {
    if (n <= 0) return 0.0;
    double term = std::exp(-y);
    double sum = term;
    for (int i = 1; i < n; ++i) {
        term *= y / i;
        sum += term;
    }
    return std::min(sum, 1.0);
}

}  // namespace

double erlang_cdf(int shape, double rate, double x) {
    check_rate(rate);
    if (!std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("erlang_cdf: x must be finite and nonnegative");
    if (shape <= 0) return 1.0;
    return std::clamp(1.0 - poisson_below(shape, rate * x), 0.0, 1.0);
}

double survival_partial_moment(int shape, double rate, int power, double lo, double hi) {
    check_rate(rate);
    if (power != 0 && power != 1)
        throw std::invalid_argument("survival_partial_moment: power must be 0 or 1");
    if (std::isnan(lo) || std::isnan(hi) || !std::isfinite(lo) || lo < 0.0 || hi < lo)
        throw std::invalid_argument("survival_partial_moment: need 0 <= lo <= hi");
    if (shape <= 0 || lo == hi) return 0.0;

    const double ya = rate * lo;
    const bool open = std::isinf(hi);
    const double yb = open ? 0.0 : rate * hi;

    // Term i of the integral needs the below-sum of order i+power+1 at both
    // endpoints; q tracks it incrementally, pm is the pmf term about to join.
    auto init = [power](double y, double& q, double& pm) {
        double t = std::exp(-y);
        q = t;
        for (int m = 1; m <= power; ++m) {
            t *= y / m;
            q += t;
        }
        pm = t * y / (power + 1);
    };

    double qa = 0.0, pma = 0.0, qb = 0.0, pmb = 0.0;
    init(ya, qa, pma);
    if (!open) init(yb, qb, pmb);

    double acc = 0.0;
    for (int i = 0; i < shape; ++i) {
        const double weight = (power == 0) ? 1.0 : static_cast<double>(i + 1);
        acc += weight * (qa - qb);
        qa += pma;
        pma *= ya / (i + power + 2);
        if (!open) {
            qb += pmb;
            pmb *= yb / (i + power + 2);
        }
    }
    acc = std::max(acc, 0.0);
    return (power == 0) ? acc / rate : acc / (rate * rate);
}

}  // namespace aoi
