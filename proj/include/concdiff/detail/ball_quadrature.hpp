#pragma once

#include "concdiff/quadrature.hpp"

namespace concdiff {

// Tensor-product Gauss–Legendre on the bounding box of each bump ball. The
// integrand is zero-extended outside the ball, where the bump vanishes to
// all orders, so the rule keeps its spectral accuracy.
template <class V>
void for_each_ball_node(const DatumSpec& spec, int quad_points, V&& visit) {
  const int d = spec.dimension;
  const QuadratureRule unit = gauss_legendre(quad_points, -1.0, 1.0);
  const double scale = spec.delta;
  const int n = quad_points;
  const int n3 = d == 3 ? n : 1;
  for (const BumpBall& ball : bump_balls(spec)) {
    const double lambda = spec.terms[ball.term].lambda;
    if (lambda == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n3; ++l) {
          const Vec3 offset{scale * unit.nodes[i], scale * unit.nodes[j],
                            d == 3 ? scale * unit.nodes[l] : 0.0};
          const double bump = dilated_profile(spec, offset);
          if (bump == 0.0) continue;
          double w = unit.weights[i] * unit.weights[j] * scale * scale;
          if (d == 3) w *= unit.weights[l] * scale;
          visit(ball.center + offset, ball, lambda * ball.sign * bump, w);
        }
      }
    }
  }
}

template <class F>
double integrate_over_balls(const DatumSpec& spec, int quad_points, F&& f) {
  double total = 0.0;
  for_each_ball_node(spec, quad_points, [&](const Vec3& xi, const BumpBall& ball, double bump, double w) {
    total += w * f(xi, ball, bump);
  });
  return total;
}

}  // namespace concdiff
