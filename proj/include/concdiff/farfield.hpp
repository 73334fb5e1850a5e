#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "concdiff/geometry.hpp"
#include "concdiff/nsflow.hpp"

namespace concdiff {

/// Π(x) = γ_d Σ_{h,k} (δ_{hk}/(d|x|^d) − x_h x_k/|x|^{d+2}) K_{hk} with γ_d = 1.
/// The dimension is K.rows(); x uses the first d entries.
double eval_Pi(const Eigen::MatrixXd& K, const Vec3& x);

/// ∇Π at x = r·ω. Throws ErrorKind::Singularity for r ≤ 0 and
/// ErrorKind::Domain when |ω| differs from 1 by more than 1e-12.
Vec3 eval_gradPi(const Eigen::MatrixXd& K, const Vec3& omega, double r);

constexpr double kDefaultIdentityTolerance = 1e-6;

struct DecayClass {
  int exponent = 0;            // −(d+2) when K ∝ I within tolerance, else −(d+1)
  double off_diagonal = 0.0;   // max |K_hk|, h ≠ k, relative to |K|_max
  double diagonal_spread = 0.0;  // max |K_hh − K_kk| relative to |K|_max
  double deviation = 0.0;      // max of the two
  double tolerance = 0.0;
};

/// Relative test against |K|_max; the zero matrix is classified −(d+2).
DecayClass classify_decay(const Eigen::MatrixXd& K, double tolerance = kDefaultIdentityTolerance);

struct AsymptoticProfile {
  double time = 0.0;
  Eigen::MatrixXd K;
  double gamma_d = 1.0;
  DecayClass decay;
};

std::vector<AsymptoticProfile> classify_trajectory(const MomentTrajectory& moment,
                                                   double tolerance = kDefaultIdentityTolerance);

/// Deterministic quasi-uniform directions: θ_i = 2π(i + ½)/n in 2D and the
/// Fibonacci lattice in 3D.
std::vector<Vec3> sphere_samples(int dim, int n);

struct COmegaMap {
  int dimension = 2;
  std::vector<Vec3> directions;
  std::vector<Vec3> magnitudes;  // |∂_jΠ(ω)| per component
  double max_magnitude = 0.0;
  double threshold = 0.0;        // absolute: relative_threshold · max_magnitude
  /// Fraction of directions where every component exceeds the threshold.
  double positive_fraction = 0.0;
};

/// Throws ErrorKind::ProfileVanishes when classify_decay(K, tolerance) gives −(d+2).
COmegaMap c_omega_map(const Eigen::MatrixXd& K, int n = 4096, double relative_threshold = 1e-3,
                      double tolerance = kDefaultIdentityTolerance);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> radii;       // samples used
  std::vector<double> magnitudes;  // |field| at those radii
  std::vector<double> excluded;    // radii dropped as non-finite or ≤ noise floor
};

using FieldSampler = std::function<Vec3(const Vec3&)>;

/// Least-squares slope of log|field(rω)| against log r. Samples whose
/// magnitude is not finite or ≤ noise_floor are dropped and listed; fewer
/// than two remaining samples throws ErrorKind::Domain.
DecayFit fit_decay_exponent(const FieldSampler& field, const Vec3& omega, const std::vector<double>& radii,
                            double noise_floor = 0.0);

/// Same fit on precomputed magnitudes.
DecayFit fit_power_law(const std::vector<double>& radii, const std::vector<double>& magnitudes,
                       double noise_floor = 0.0);

}  // namespace concdiff
