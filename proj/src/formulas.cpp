#include "rsdfo/formulas.hpp"

#include <cmath>
#include <future>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "rsdfo/errors.hpp"
#include "rsdfo/quadrature.hpp"
#include "rsdfo/specfun.hpp"

namespace rsdfo {
namespace {

using std::numbers::pi;

constexpr double kClosedFormError = 1e-12;
// Upper bound on the number of innermost closed-form evaluations per pass.
constexpr double kNodeBudget = 6.0e7;

void check_dims(std::int64_t p, std::int64_t d, const char* who) {
  if (d < 1 || p < 1 || p > d) {
    throw InvalidDimension(std::string(who) + ": need 1 <= p <= d, got p=" +
                           std::to_string(p) + " d=" + std::to_string(d));
  }
}

// Integral of sin^k over [a, pi/2] where a = arctan(1/s), s in (0, 1].
double sin_power_tail(int k, double s) {
  const double h = std::hypot(1.0, s);
  const double sin_a = 1.0 / h;
  const double cos_a = s / h;
  double j_even = std::atan(s);  // pi/2 - a
  double j_odd = cos_a;
  if (k == 0) return j_even;
  if (k == 1) return j_odd;
  double sin_pow = sin_a;  // sin^{m-1}(a) for m = 2
  double result = 0.0;
  for (int m = 2; m <= k; ++m) {
    double& prev = (m % 2 == 0) ? j_even : j_odd;
    prev = sin_pow * cos_a / m + (m - 1.0) / m * prev;
    result = prev;
    sin_pow *= sin_a;
  }
  return result;
}

class NestedIntegrator {
 public:
  NestedIntegrator(int p, const GaussLegendreRule& rule) : p_(p), rule_(rule) {}

  // Integral over phi_level.. phi_{p-1} given s = prod_{j<level} sin phi_j.
  double level(int i, double s) const {
    if (i == p_ - 1) return sin_power_tail(i, s);
    const double half = 0.5 * std::atan(s);
    const double mid = 0.5 * pi - half;
    double acc = 0.0;
    for (std::size_t q = 0; q < rule_.nodes.size(); ++q) {
      const double phi = mid + half * rule_.nodes[q];
      const double sp = std::sin(phi);
      acc += rule_.weights[q] * std::pow(sp, i) * level(i + 1, s * sp);
    }
    return half * acc;
  }

  // Same as level(1, 1) with the outermost nodes evaluated concurrently and
  // summed in node order.
  double outer_parallel() const {
    const double half = 0.5 * std::atan(1.0);
    const double mid = 0.5 * pi - half;
    std::vector<std::future<double>> parts;
    parts.reserve(rule_.nodes.size());
    for (std::size_t q = 0; q < rule_.nodes.size(); ++q) {
      parts.push_back(std::async(std::launch::async, [this, q, half, mid] {
        const double phi = mid + half * rule_.nodes[q];
        const double sp = std::sin(phi);
        return rule_.weights[q] * sp * level(2, sp);
      }));
    }
    double acc = 0.0;
    for (auto& f : parts) acc += f.get();
    return half * acc;
  }

 private:
  int p_;
  const GaussLegendreRule& rule_;
};

IpValue compute_integral_I(std::int64_t p, double tol) {
  if (p == 1) return {1, 1.0, 0.0};
  const int depth = static_cast<int>(p);
  if (p == 2) {
    return {2, NestedIntegrator(depth, gauss_legendre(1)).level(1, 1.0),
            kClosedFormError};
  }
  const int levels = depth - 2;
  double previous = 0.0;
  bool have_previous = false;
  for (int n = 4;; n *= 2) {
    if (std::pow(static_cast<double>(n), levels) > kNodeBudget) {
      throw ConvergenceError("integral_I: tolerance " + std::to_string(tol) +
                             " not reached for p=" + std::to_string(p) +
                             " within the node budget");
    }
    NestedIntegrator integrator(depth, gauss_legendre(n));
    const double value =
        levels >= 3 ? integrator.outer_parallel() : integrator.level(1, 1.0);
    if (have_previous) {
      const double err = std::abs(value - previous);
      if (err <= tol) return {p, value, err};
    }
    previous = value;
    have_previous = true;
  }
}

double log_ds_prefactor(std::int64_t p) {
  const double pd = static_cast<double>(p);
  return std::log(0.5 * pd) + pd * std::numbers::ln2 - 0.5 * pd * std::log(pi) +
         log_gamma(0.5 * pd + 0.5);
}

// ln(Gamma(x/2) / Gamma(x/2 + 1/2)).
double log_half_ratio(std::int64_t x) {
  return log_gamma_difference(0.5 * static_cast<double>(x), 0.5);
}

}  // namespace

std::string_view to_string(FormulaMethod m) noexcept {
  switch (m) {
    case FormulaMethod::closed_form: return "closed-form";
    case FormulaMethod::quadrature: return "quadrature";
    case FormulaMethod::asymptotic: return "asymptotic";
  }
  return "unknown";
}

IpValue integral_I(std::int64_t p, double tol) {
  if (p < 1) throw InvalidDimension("integral_I: p must be >= 1");
  if (p > kMaxQuadratureDepth) {
    throw Unsupported("integral_I: p=" + std::to_string(p) +
                      " exceeds the quadrature depth " +
                      std::to_string(kMaxQuadratureDepth) +
                      "; use the Monte Carlo estimator");
  }
  if (!(tol > 0.0)) throw DomainError("integral_I: tol must be positive");

  static std::mutex mu;
  static std::map<std::pair<std::int64_t, double>, IpValue> memo;
  {
    std::lock_guard lock(mu);
    if (auto it = memo.find({p, tol}); it != memo.end()) return it->second;
  }
  const IpValue result = compute_integral_I(p, tol);
  std::lock_guard lock(mu);
  memo.emplace(std::pair{p, tol}, result);
  return result;
}

FormulaResult expected_decrease_ds(std::int64_t p, std::int64_t d) {
  check_dims(p, d, "expected_decrease_ds");
  if (d == 1) return {1.0, FormulaMethod::closed_form, 1, 1, 0.0};
  const double ratio = gamma_half_ratio(d).value;
  if (p == 1) {
    return {ratio / std::sqrt(pi), FormulaMethod::closed_form, p, d,
            kClosedFormError};
  }
  if (p == 2) {
    return {std::sqrt(2.0 / pi) * ratio, FormulaMethod::closed_form, p, d,
            kClosedFormError};
  }
  if (p > kMaxQuadratureDepth) {
    throw Unsupported("expected_decrease_ds: p=" + std::to_string(p) +
                      " exceeds the quadrature depth; use the Monte Carlo "
                      "estimator");
  }
  const IpValue ip = integral_I(p);
  const double factor = std::exp(log_ds_prefactor(p) + log_half_ratio(d));
  return {factor * ip.value, FormulaMethod::quadrature, p, d,
          factor * ip.abs_error + kClosedFormError};
}

FormulaResult expected_decrease_mb(std::int64_t p, std::int64_t d) {
  check_dims(p, d, "expected_decrease_mb");
  if (p == d) return {1.0, FormulaMethod::closed_form, p, d, 0.0};
  const double value = std::exp(log_half_ratio(d) - log_half_ratio(p));
  return {value, FormulaMethod::closed_form, p, d, kClosedFormError};
}

FormulaResult expected_decrease(Variant v, std::int64_t p, std::int64_t d) {
  return v == Variant::ds ? expected_decrease_ds(p, d) : expected_decrease_mb(p, d);
}

double evaluation_cost(Variant v, std::int64_t p, PollMode mode) {
  if (p < 1) throw InvalidDimension("evaluation_cost: p must be >= 1");
  if (v == Variant::ds) {
    return mode == PollMode::opportunistic ? 1.5 : 2.0 * static_cast<double>(p);
  }
  return p == 1 ? 1.5 : static_cast<double>(p) + 1.0;
}

FormulaResult per_evaluation_ds(std::int64_t p, std::int64_t d, bool opportunistic) {
  check_dims(p, d, "per_evaluation_ds");
  if (opportunistic) {
    FormulaResult r = expected_decrease_ds(1, d);
    r.value /= 1.5;
    r.estimated_abs_error /= 1.5;
    r.p = p;
    return r;
  }
  FormulaResult r = expected_decrease_ds(p, d);
  const double cost = evaluation_cost(Variant::ds, p);
  r.value /= cost;
  r.estimated_abs_error /= cost;
  return r;
}

FormulaResult per_evaluation_mb(std::int64_t p, std::int64_t d) {
  FormulaResult r = expected_decrease_mb(p, d);
  const double cost = evaluation_cost(Variant::mb, p);
  r.value /= cost;
  r.estimated_abs_error /= cost;
  return r;
}

double parallel_cost(Variant v, std::int64_t p, std::int64_t cores) {
  if (cores < 1) throw InvalidDimension("parallel_cost: cores must be >= 1");
  if (p < 1) throw InvalidDimension("parallel_cost: p must be >= 1");
  const auto ceil_div = [](std::int64_t a, std::int64_t b) { return (a + b - 1) / b; };
  if (v == Variant::ds) return static_cast<double>(ceil_div(2 * p, cores));
  // p = 1: the trial point coincides with the poll point half of the time.
  if (p == 1) return 1.5;
  return static_cast<double>(ceil_div(p, cores) + 1);
}

FormulaResult parallel_per_work(std::int64_t p, std::int64_t d, std::int64_t cores,
                                Variant v) {
  check_dims(p, d, "parallel_per_work");
  const double cost = parallel_cost(v, p, cores);
  FormulaResult r = expected_decrease(v, p, d);
  r.value /= cost;
  r.estimated_abs_error /= cost;
  return r;
}

FormulaResult asymptotic_decrease(std::int64_t p, std::int64_t d, Variant v) {
  if (p != 1 && p != 2) {
    throw Unsupported("asymptotic_decrease: only p in {1, 2} has a known limit");
  }
  check_dims(p, d, "asymptotic_decrease");
  const double root = std::sqrt(pi) * std::sqrt(static_cast<double>(d));
  double value = 0.0;
  if (p == 1) {
    value = std::sqrt(2.0) / root;  // same limit for ds and mb
  } else if (v == Variant::ds) {
    value = 2.0 / root;
  } else {
    value = pi / (std::sqrt(2.0) * root);  // sqrt(pi) / (sqrt(2) sqrt(d))
  }
  return {value, FormulaMethod::asymptotic, p, d, 0.0};
}

}  // namespace rsdfo
