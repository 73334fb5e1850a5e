#include "concdiff/farfield.hpp"

#include <cmath>
#include <numbers>

#include "concdiff/error.hpp"

namespace concdiff {

namespace {

int dimension_of(const Eigen::MatrixXd& K) {
  if (K.rows() != K.cols() || (K.rows() != 2 && K.rows() != 3)) {
    throw Error(ErrorKind::Domain, "K must be a 2x2 or 3x3 matrix");
  }
  return static_cast<int>(K.rows());
}

double quadratic_form(const Eigen::MatrixXd& K, const Vec3& x, int d) {
  double q = 0.0;
  for (int h = 0; h < d; ++h)
    for (int k = 0; k < d; ++k) q += K(h, k) * x[h] * x[k];
  return q;
}

double partial_norm2(const Vec3& x, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += x[i] * x[i];
  return s;
}

}  // namespace

double eval_Pi(const Eigen::MatrixXd& K, const Vec3& x) {
  const int d = dimension_of(K);
  const double r2 = partial_norm2(x, d);
  if (!(r2 > 0.0)) throw Error(ErrorKind::Singularity, "Pi is singular at the origin");
  const double r = std::sqrt(r2);
  return K.trace() / (d * std::pow(r, d)) - quadratic_form(K, x, d) / std::pow(r, d + 2);
}

Vec3 eval_gradPi(const Eigen::MatrixXd& K, const Vec3& omega, double r) {
  const int d = dimension_of(K);
  if (!(r > 0.0)) throw Error(ErrorKind::Singularity, "gradient of Pi requested at r <= 0");
  if (std::abs(std::sqrt(partial_norm2(omega, d)) - 1.0) > 1e-12) {
    throw Error(ErrorKind::Domain, "direction must be a unit vector");
  }
  // On the unit sphere: ∇Π(ω) = −(tr K) ω − 2Kω + (d+2)(ωᵀKω) ω, then the
  // degree −(d+1) homogeneity.
  const double trace = K.trace();
  const double q = quadratic_form(K, omega, d);
  const double scale = std::pow(r, -(d + 1));
  Vec3 g{0.0, 0.0, 0.0};
  for (int h = 0; h < d; ++h) {
    double kw = 0.0;
    for (int k = 0; k < d; ++k) kw += K(h, k) * omega[k];
    g[h] = scale * (-trace * omega[h] - 2.0 * kw + (d + 2) * q * omega[h]);
  }
  return g;
}

DecayClass classify_decay(const Eigen::MatrixXd& K, double tolerance) {
  const int d = dimension_of(K);
  DecayClass c;
  c.tolerance = tolerance;
  const double kmax = K.cwiseAbs().maxCoeff();
  if (kmax == 0.0) {
    c.exponent = -(d + 2);
    return c;
  }
  for (int h = 0; h < d; ++h) {
    for (int k = 0; k < d; ++k) {
      if (h != k) c.off_diagonal = std::max(c.off_diagonal, std::abs(K(h, k)) / kmax);
      c.diagonal_spread = std::max(c.diagonal_spread, std::abs(K(h, h) - K(k, k)) / kmax);
    }
  }
  c.deviation = std::max(c.off_diagonal, c.diagonal_spread);
  c.exponent = c.deviation <= tolerance ? -(d + 2) : -(d + 1);
  return c;
}

std::vector<AsymptoticProfile> classify_trajectory(const MomentTrajectory& moment, double tolerance) {
  std::vector<AsymptoticProfile> out;
  out.reserve(moment.times.size());
  for (std::size_t n = 0; n < moment.times.size(); ++n) {
    out.push_back({moment.times[n], moment.K[n], 1.0, classify_decay(moment.K[n], tolerance)});
  }
  return out;
}

std::vector<Vec3> sphere_samples(int dim, int n) {
  if (n < 1) throw Error(ErrorKind::Configuration, "sphere sample count must be positive");
  std::vector<Vec3> out;
  out.reserve(n);
  if (dim == 2) {
    for (int i = 0; i < n; ++i) {
      const double theta = 2.0 * std::numbers::pi * (i + 0.5) / n;
      out.push_back({std::cos(theta), std::sin(theta), 0.0});
    }
    return out;
  }
  if (dim != 3) throw Error(ErrorKind::Configuration, "dimension must be 2 or 3");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    out.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
  }
  return out;
}

COmegaMap c_omega_map(const Eigen::MatrixXd& K, int n, double relative_threshold, double tolerance) {
  const int d = dimension_of(K);
  const DecayClass cls = classify_decay(K, tolerance);
  if (cls.exponent == -(d + 2)) {
    throw Error(ErrorKind::ProfileVanishes, "K is proportional to the identity within tolerance; grad Pi vanishes");
  }
  COmegaMap map;
  map.dimension = d;
  map.directions = sphere_samples(d, n);
  map.magnitudes.reserve(n);
  for (const Vec3& w : map.directions) {
    Vec3 g = eval_gradPi(K, w, 1.0);
    for (auto& v : g) v = std::abs(v);
    for (int j = 0; j < d; ++j) map.max_magnitude = std::max(map.max_magnitude, g[j]);
    map.magnitudes.push_back(g);
  }
  map.threshold = relative_threshold * map.max_magnitude;
  int positive = 0;
  for (const Vec3& g : map.magnitudes) {
    bool all = true;
    for (int j = 0; j < d; ++j) all = all && g[j] > map.threshold;
    positive += all ? 1 : 0;
  }
  map.positive_fraction = static_cast<double>(positive) / n;
  return map;
}

DecayFit fit_power_law(const std::vector<double>& radii, const std::vector<double>& magnitudes,
                       double noise_floor) {
  if (radii.size() != magnitudes.size()) throw Error(ErrorKind::Domain, "radii and magnitudes differ in length");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw Error(ErrorKind::Domain, "radii must be increasing");
  }
  DecayFit fit;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw Error(ErrorKind::Domain, "radii must be positive");
    const double m = magnitudes[i];
    if (std::isfinite(m) && m > noise_floor && m > 0.0) {
      fit.radii.push_back(radii[i]);
      fit.magnitudes.push_back(m);
    } else {
      fit.excluded.push_back(radii[i]);
    }
  }
  const std::size_t n = fit.radii.size();
  if (n < 2) throw Error(ErrorKind::Domain, "fewer than two samples above the noise floor");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += std::log(fit.radii[i]);
    sy += std::log(fit.magnitudes[i]);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(fit.radii[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(fit.magnitudes[i]) - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

DecayFit fit_decay_exponent(const FieldSampler& field, const Vec3& omega, const std::vector<double>& radii,
                            double noise_floor) {
  std::vector<double> mags;
  mags.reserve(radii.size());
  for (double r : radii) mags.push_back(norm(field(r * omega)));
  return fit_power_law(radii, mags, noise_floor);
}

}  // namespace concdiff
