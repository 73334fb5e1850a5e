#include "concdiff/datum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "concdiff/error.hpp"

namespace concdiff {

std::vector<BumpBall> bump_balls(const DatumSpec& spec) {
  const TildeMap tilde{spec.dimension};
  std::vector<BumpBall> balls;
  for (std::size_t j = 0; j < spec.terms.size(); ++j) {
    const Vec3& a = spec.terms[j].alpha;
    if (spec.dimension == 2) {
      const Vec3 at = tilde(a);
      balls.push_back({a, 1.0, j});
      balls.push_back({-a, 1.0, j});
      balls.push_back({at, -1.0, j});
      balls.push_back({-at, -1.0, j});
    } else {
      const Vec3 at = tilde(a);
      const Vec3 att = tilde(at);
      for (const Vec3& c : {a, at, att}) {
        balls.push_back({c, 1.0, j});
        balls.push_back({-c, 1.0, j});
      }
    }
  }
  return balls;
}

std::optional<std::string> admissibility_violation(const DatumSpec& spec) {
  std::ostringstream why;
  if (spec.dimension != 2 && spec.dimension != 3) return "dimension must be 2 or 3";
  if (!(spec.delta > 0.0)) return "delta must be positive";
  if (spec.profile.dimension() != spec.dimension) return "profile dimension does not match datum";
  double max_alpha = 0.0;
  for (const auto& t : spec.terms) max_alpha = std::max(max_alpha, norm(t.alpha));
  const double margin = 1e-9 * max_alpha;
  const double delta = spec.delta;

  for (std::size_t j = 0; j < spec.terms.size(); ++j) {
    const Vec3& a = spec.terms[j].alpha;
    if (spec.dimension == 2) {
      if (a[2] != 0.0) {
        why << "term " << j << ": alpha has a third component in 2D";
        return why.str();
      }
      if (a[1] == 0.0) {
        why << "term " << j << ": alpha_2 must be nonzero";
        return why.str();
      }
      if (!(a[0] > std::abs(a[1]) + delta * std::sqrt(2.0) + margin)) {
        why << "term " << j << ": alpha_1 > |alpha_2| + delta*sqrt(2) violated (alpha = (" << a[0]
            << ", " << a[1] << "), delta = " << delta << ")";
        return why.str();
      }
    } else {
      // Ball B(α, δ) inside {ξ2 > ξ1, ξ3 > ξ1, ξ2 > 0, ξ3 > 0}.
      const double s2 = std::sqrt(2.0);
      const bool inside = a[1] - a[0] > delta * s2 + margin && a[2] - a[0] > delta * s2 + margin &&
                          a[1] > delta + margin && a[2] > delta + margin;
      if (!inside) {
        why << "term " << j << ": min(alpha_2, alpha_3) > max(alpha_1, 0) with delta margin violated";
        return why.str();
      }
      if (a[1] == a[2]) {
        why << "term " << j << ": alpha_2 must differ from alpha_3";
        return why.str();
      }
    }
  }

  const auto balls = bump_balls(spec);
  for (std::size_t p = 0; p < balls.size(); ++p) {
    for (std::size_t q = p + 1; q < balls.size(); ++q) {
      const double dist = norm(balls[p].center - balls[q].center);
      if (!(dist > 2.0 * delta + margin)) {
        why << "bump supports overlap: terms " << balls[p].term << " and " << balls[q].term
            << " have centres " << dist << " apart (need > " << 2.0 * delta << ")";
        return why.str();
      }
    }
  }
  return std::nullopt;
}

void validate(const DatumSpec& spec) {
  if (auto reason = admissibility_violation(spec)) throw Error(ErrorKind::InvalidSpec, *reason);
}

double dilated_profile(const DatumSpec& spec, const Vec3& zeta) {
  const double r = norm(zeta) / spec.delta;
  if (r >= 1.0) return 0.0;
  return spec.profile(r) / std::pow(spec.delta, 0.5 * spec.dimension);
}

double psi_hat(const DatumSpec& spec, std::size_t j, const Vec3& xi) {
  double sum = 0.0;
  const TildeMap tilde{spec.dimension};
  const Vec3& a = spec.terms.at(j).alpha;
  if (spec.dimension == 2) {
    const Vec3 at = tilde(a);
    sum += dilated_profile(spec, xi - a) + dilated_profile(spec, xi + a);
    sum -= dilated_profile(spec, xi - at) + dilated_profile(spec, xi + at);
  } else {
    const Vec3 at = tilde(a);
    const Vec3 att = tilde(at);
    for (const Vec3& c : {a, at, att}) sum += dilated_profile(spec, xi - c) + dilated_profile(spec, xi + c);
  }
  return sum;
}

double psi_hat_total(const DatumSpec& spec, const Vec3& xi) {
  double sum = 0.0;
  for (std::size_t j = 0; j < spec.terms.size(); ++j) {
    if (spec.terms[j].lambda != 0.0) sum += spec.terms[j].lambda * psi_hat(spec, j, xi);
  }
  return sum;
}

CVec3 curl_symbol(int dim, const Vec3& xi) {
  using namespace std::complex_literals;
  if (dim == 2) return {-1i * xi[1], 1i * xi[0], 0.0};
  return {1i * (xi[1] - xi[2]), 1i * (xi[2] - xi[0]), 1i * (xi[0] - xi[1])};
}

CVec3 datum_hat(const DatumSpec& spec, const Vec3& xi) {
  const double psi = spec.eta * psi_hat_total(spec, xi);
  CVec3 out = curl_symbol(spec.dimension, xi);
  for (auto& c : out) c *= psi;
  return out;
}

Eigen::MatrixXd moment_matrix_zero(const DatumSpec& spec, int quad_points) {
  const int d = spec.dimension;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      const double v = integrate_over_balls(spec, quad_points, [&](const Vec3& xi, const BumpBall&, double bump) {
        const CVec3 s = curl_symbol(d, xi);
        return std::real(s[a] * std::conj(s[b])) * bump * psi_hat_total(spec, xi);
      });
      m(a, b) = m(b, a) = v * spec.eta * spec.eta * plancherel_factor(d);
    }
  }
  return m;
}

}  // namespace concdiff
