#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rsdfo/errors.hpp"
#include "rsdfo/specfun.hpp"

using namespace rsdfo;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Composite Simpson on [0, pi/2]; oracle for the sine-power identity.
double simpson_sin_power(int m, int panels = 20000) {
  const double h = 0.5 * pi / panels;
  double s = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::pow(std::sin(i * h), m);
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("log_gamma on the integer and half-integer lattice") {
  CHECK(log_gamma(1.0) == 0.0);
  CHECK(log_gamma(2.0) == 0.0);
  CHECK(rel(log_gamma(0.5), 0.5 * std::log(pi)) < 1e-12);
  CHECK(rel(log_gamma(6.0), std::log(120.0)) < 1e-12);
  double log_factorial = 0.0;
  for (int n = 2; n <= 170; ++n) {
    log_factorial += std::log(static_cast<double>(n - 1));
    CAPTURE(n);
    if (n > 2) CHECK(rel(log_gamma(n), log_factorial) < 1e-12);
  }
  // Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
  double half = 0.5 * std::log(pi);
  for (int k = 1; k < 60; ++k) {
    half += std::log(k - 0.5);
    CAPTURE(k);
    CHECK(rel(log_gamma(k + 0.5), half) < 1e-12);
  }
}

TEST_CASE("log_gamma agrees with std::lgamma across [0.5, 1e6]") {
  for (double x = 0.5; x < 1e6; x *= 1.37) {
    CAPTURE(x);
    const double ref = std::lgamma(x);
    if (std::abs(ref) > 0.1) {
      CHECK(rel(log_gamma(x), ref) < 1e-12);
    } else {
      CHECK(std::abs(log_gamma(x) - ref) < 1e-14);
    }
  }
}

TEST_CASE("log_gamma domain") {
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
  CHECK_THROWS_AS(log_gamma(std::nan("")), DomainError);
}

TEST_CASE("gamma_half_ratio") {
  CHECK(rel(gamma_half_ratio(1).value, std::sqrt(pi)) < 1e-12);
  CHECK(rel(gamma_half_ratio(2).value, 2.0 / std::sqrt(pi)) < 1e-12);
  CHECK(rel(gamma_half_ratio(4).value, 4.0 / (3.0 * std::sqrt(pi))) < 1e-12);
  CHECK_THROWS_AS(gamma_half_ratio(0), InvalidDimension);

  SUBCASE("recurrence ratio(d+2) = ratio(d) * d / (d + 1)") {
    for (std::int64_t d = 1; d < 5000; ++d) {
      const double expected = gamma_half_ratio(d).value * static_cast<double>(d) / (d + 1.0);
      CHECK(rel(gamma_half_ratio(d + 2).value, expected) < 1e-12);
    }
  }
  SUBCASE("Gautschi sandwich for d in 1..1e4") {
    for (std::int64_t d = 1; d <= 10000; ++d) {
      const double v = gamma_half_ratio(d).value;
      const double dd = static_cast<double>(d);
      CHECK(v > std::sqrt(2.0) / std::sqrt(dd));
      CHECK(v < std::sqrt(2.0) * std::sqrt(dd + 2.0) / dd);
    }
  }
  SUBCASE("sqrt(d) * ratio -> sqrt(2)") {
    CHECK(std::abs(gamma_half_ratio(1000000).value * 1000.0 - std::sqrt(2.0)) < 1e-5);
  }
  SUBCASE("no overflow at d = 1e9") {
    const double v = gamma_half_ratio(1000000000).value;
    CHECK(std::isfinite(v));
    CHECK(rel(v * std::sqrt(1e9), std::sqrt(2.0)) < 1e-9);
  }
}

TEST_CASE("sin_power_integral") {
  CHECK(rel(sin_power_integral(0), pi / 2.0) < 1e-12);
  CHECK(rel(sin_power_integral(1), 1.0) < 1e-12);
  CHECK(rel(sin_power_integral(2), pi / 4.0) < 1e-12);
  for (int m = 0; m <= 12; ++m) {
    CAPTURE(m);
    CHECK(rel(sin_power_integral(m), simpson_sin_power(m)) < 1e-10);
  }
  for (std::int64_t m = 1; m <= 2000; ++m) {
    CHECK(rel(sin_power_integral(m) * sin_power_integral(m - 1), pi / (2.0 * m)) < 1e-12);
  }
  CHECK_THROWS_AS(sin_power_integral(-1), DomainError);
}

TEST_CASE("kershaw_bounds bracket Gamma(x+1)/Gamma(x+s)") {
  const auto b = kershaw_bounds(1.0, 0.5);
  CHECK(b.lower == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
  CHECK(b.lower < 2.0 / std::sqrt(pi));
  CHECK(2.0 / std::sqrt(pi) < b.upper);

  const auto at_half = kershaw_bounds(0.5, 0.5);
  CHECK(at_half.lower < std::sqrt(pi) / 2.0);
  CHECK(std::sqrt(pi) / 2.0 < at_half.upper);

  for (double x : {0.1, 0.5, 1.0, 3.0, 10.0, 77.0, 1000.0}) {
    for (double s : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      CAPTURE(x);
      CAPTURE(s);
      const double ratio = std::exp(std::lgamma(x + 1.0) - std::lgamma(x + s));
      const auto k = kershaw_bounds(x, s);
      CHECK(k.lower < ratio);
      CHECK(ratio < k.upper);
    }
  }
  CHECK_THROWS_AS(kershaw_bounds(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(kershaw_bounds(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(kershaw_bounds(1.0, 0.0), DomainError);
}
