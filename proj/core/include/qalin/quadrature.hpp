#pragma once

#include <vector>

namespace qalin {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
QuadratureRule gauss_legendre(int n);

/// Composite rule on [lo, hi]: `panels` equal panels of `order` points each.
QuadratureRule composite_gauss_legendre(double lo, double hi, int panels, int order);

}  // namespace qalin
