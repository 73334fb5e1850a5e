#pragma once

#include <functional>
#include <vector>

namespace concdiff {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss–Legendre rule mapped to [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Composite Gauss–Legendre: `panels` equal panels of `order` points each.
QuadratureRule composite_gauss_legendre(int panels, int order, double a, double b);

/// Weights for integrating samples f(0), f(h), ..., f(m h) over [0, m h].
/// Composite Simpson when m is even; for odd m ≥ 3 the last three intervals
/// use the 3/8 rule. m = 1 falls back to the trapezoid rule.
std::vector<double> simpson_weights(int m, double h);

/// Globally adaptive Gauss–Kronrod integral of f over [a, b].
double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-14);

}  // namespace concdiff
