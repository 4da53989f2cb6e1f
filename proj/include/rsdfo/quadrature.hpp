#pragma once

#include <span>
#include <vector>

namespace rsdfo {

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes are computed by Newton iteration on P_n; results are memoized.
const GaussLegendreRule& gauss_legendre(int n);

}  // namespace rsdfo
