#include "concdiff/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "concdiff/error.hpp"

namespace concdiff {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error(ErrorKind::Configuration, "Gauss-Legendre order must be positive");
  // boost returns the nonnegative roots of P_n in increasing order.
  const std::vector<double> roots = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> x;
  std::vector<double> w;
  x.reserve(n);
  w.reserve(n);
  auto weight = [n](double r) {
    const double dp = boost::math::legendre_p_prime(n, r);
    return 2.0 / ((1.0 - r * r) * dp * dp);
  };
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
    if (*it == 0.0) continue;
    x.push_back(-*it);
    w.push_back(weight(*it));
  }
  for (double r : roots) {
    x.push_back(r);
    w.push_back(weight(r));
  }

  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  QuadratureRule rule;
  rule.nodes.resize(x.size());
  rule.weights.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.nodes[i] = mid + half * x[i];
    rule.weights[i] = half * w[i];
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(int panels, int order, double a, double b) {
  if (panels < 1) throw Error(ErrorKind::Configuration, "panel count must be positive");
  const QuadratureRule base = gauss_legendre(order, -1.0, 1.0);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * base.size());
  rule.weights.reserve(rule.nodes.capacity());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double mid = lo + 0.5 * width;
    for (std::size_t i = 0; i < base.size(); ++i) {
      rule.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
      rule.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return rule;
}

std::vector<double> simpson_weights(int m, double h) {
  if (m < 0) throw Error(ErrorKind::Configuration, "negative interval count");
  std::vector<double> w(static_cast<std::size_t>(m) + 1, 0.0);
  if (m == 0) return w;
  if (m == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  int simpson_end = m;
  if (m % 2 == 1) simpson_end = m - 3;
  for (int i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (m % 2 == 1) {
    const int s = m - 3;
    w[s] += 3.0 * h / 8.0;
    w[s + 1] += 9.0 * h / 8.0;
    w[s + 2] += 9.0 * h / 8.0;
    w[s + 3] += 3.0 * h / 8.0;
  }
  return w;
}

double adaptive_integral(const std::function<double(double)>& f, double a, double b,
                         double rel_tol) {
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, rel_tol, &error);
}

}  // namespace concdiff
