#pragma once

#include <cstdint>
#include <string_view>

#include "rsdfo/types.hpp"

namespace rsdfo {

/// Deepest subspace dimension served by the nested quadrature for I(p).
inline constexpr std::int64_t kMaxQuadratureDepth = 8;

enum class FormulaMethod { closed_form, quadrature, asymptotic };

std::string_view to_string(FormulaMethod m) noexcept;

/// Expected decrease of one iteration on a unit linear function with unit
/// step (or a per-evaluation / per-work normalization of it).
struct FormulaResult {
  double value;
  FormulaMethod method;
  std::int64_t p;
  std::int64_t d;
  double estimated_abs_error;
};

struct IpValue {
  std::int64_t p;
  double value;
  double abs_error;
};

/// Nested trigonometric integral I(p) entering the direct-search formula.
///
/// I(1) = 1. For p > 1 the integrand is prod_{i<p} sin^i(phi_i) over
/// phi_1 in [pi/4, pi/2] and phi_i in [arctan(prod_{j<i} csc phi_j), pi/2].
/// The innermost variable is integrated in closed form; the remaining
/// p - 2 levels use tensor Gauss-Legendre with the order doubled until two
/// successive values agree to `tol`.
///
/// Throws Unsupported for p > kMaxQuadratureDepth and ConvergenceError if
/// `tol` cannot be met within the node budget.
IpValue integral_I(std::int64_t p, double tol = 1e-10);

/// E_DS[p, d]. Closed forms for p in {1, 2} and d = 1; quadrature for
/// 3 <= p <= kMaxQuadratureDepth; Unsupported beyond that.
FormulaResult expected_decrease_ds(std::int64_t p, std::int64_t d);

/// E_MB[p, d] = Gamma(d/2) Gamma(p/2+1/2) / (Gamma(d/2+1/2) Gamma(p/2)).
FormulaResult expected_decrease_mb(std::int64_t p, std::int64_t d);

FormulaResult expected_decrease(Variant v, std::int64_t p, std::int64_t d);

/// Evaluations consumed per iteration: 2p (ds complete), 3/2 (ds
/// opportunistic, mb with p = 1), p + 1 (mb otherwise).
double evaluation_cost(Variant v, std::int64_t p,
                       PollMode mode = PollMode::complete);

/// E_DS[p,d] / (2p); with opportunistic polling the decrease of the p = 1
/// case at an average cost of 3/2, independent of p.
FormulaResult per_evaluation_ds(std::int64_t p, std::int64_t d,
                                bool opportunistic = false);

/// E_MB[p,d] / (p+1) for p >= 2, E_MB[1,d] / (3/2) for p = 1.
FormulaResult per_evaluation_mb(std::int64_t p, std::int64_t d);

/// Expected decrease per unit of wall-clock work with `cores` parallel
/// evaluators: E_DS / ceil(2p/c) or E_MB / (ceil(p/c) + 1). For mb with
/// p = 1 the cost is the reuse-adjusted 3/2, so cores = 1 coincides with
/// per_evaluation_mb.
FormulaResult parallel_per_work(std::int64_t p, std::int64_t d,
                                std::int64_t cores, Variant v);

/// Per-iteration cost in rounds of `cores` parallel evaluations.
double parallel_cost(Variant v, std::int64_t p, std::int64_t cores);

/// Large-d limit for p in {1, 2}.
FormulaResult asymptotic_decrease(std::int64_t p, std::int64_t d, Variant v);

}  // namespace rsdfo
