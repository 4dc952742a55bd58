#pragma once

namespace aoi {

// CDF of a sum of `shape` unit-mean-spaced exponential interarrival times at
// `rate` events per unit time. shape <= 0 stands for an empty sum, which is
// identically zero, so its CDF is 1 everywhere on [0, inf).
double erlang_cdf(int shape, double rate, double x);

// Integral of x^power * P(sum > x) over [lo, hi]. power is 0 or 1; hi may be
// +infinity. shape <= 0 integrates to 0.
double survival_partial_moment(int shape, double rate, int power, double lo, double hi);

}  // namespace aoi
