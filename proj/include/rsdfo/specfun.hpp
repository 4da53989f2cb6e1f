#pragma once

#include <cstdint>

namespace rsdfo {

/// ln Gamma(x) for x > 0.
///
/// Arguments below 10 are shifted upward with the recurrence
/// Gamma(x+1) = x Gamma(x); from 10 on, the Stirling series with Bernoulli
/// terms through B_16 is used (truncation error below 1e-17 at x = 10).
double log_gamma(double x);

/// ln Gamma(x) - ln Gamma(x + h) for x > 0, x + h > 0.
///
/// For large arguments this is evaluated as a difference of Stirling series
/// with log1p, so it does not lose accuracy to cancellation as x grows.
double log_gamma_difference(double x, double h);

/// Gamma(d/2) / Gamma(d/2 + 1/2); the dimension factor shared by every
/// expected-decrease formula.
struct GammaRatio {
  std::int64_t d;
  double value;
};

GammaRatio gamma_half_ratio(std::int64_t d);

/// Integral of sin^m over [0, pi/2], via (sqrt(pi)/2) Gamma(m/2+1/2)/Gamma(m/2+1).
double sin_power_integral(std::int64_t m);

struct KershawBounds {
  double lower;
  double upper;
};

/// Bracket for Gamma(x+1)/Gamma(x+s):
/// (x + s/2)^{1-s} < ratio < (x - 1/2 + sqrt(s + 1/4))^{1-s}.
KershawBounds kershaw_bounds(double x, double s);

}  // namespace rsdfo
