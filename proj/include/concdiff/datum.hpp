#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "concdiff/geometry.hpp"
#include "concdiff/profile.hpp"

namespace concdiff {

/// One modulated building block λ·a^δ_α of the initial datum.
struct ModulationTerm {
  double lambda = 0.0;
  Vec3 alpha{0.0, 0.0, 0.0};
};

/// a = η Σ_j λ_j a^δ_{α_j}, where each a^δ_α is the curl of a sum of dilated
/// bumps centred at ±α, ±α̃ (and ±α̃̃ in 3D).
struct DatumSpec {
  int dimension = 2;
  double delta = 0.25;
  double eta = 1.0;
  std::vector<ModulationTerm> terms;
  BumpProfile profile;
};

/// A single dilated bump of the datum's Fourier transform.
struct BumpBall {
  Vec3 center;
  double sign;      // ±1: the coefficient of this bump inside ψ̂_α
  std::size_t term; // index into DatumSpec::terms
};

std::vector<BumpBall> bump_balls(const DatumSpec& spec);

/// Describes the first violated structural constraint, or nullopt if the
/// spec is admissible (cone conditions with the δ margin, disjoint bumps).
std::optional<std::string> admissibility_violation(const DatumSpec& spec);

/// Throws ErrorKind::InvalidSpec naming the violated constraint.
void validate(const DatumSpec& spec);

/// φ̂^δ(ζ) = φ̂(|ζ|/δ) / δ^{d/2}.
double dilated_profile(const DatumSpec& spec, const Vec3& zeta);

/// ψ̂_{α_j}(ξ) for term j (without λ_j).
double psi_hat(const DatumSpec& spec, std::size_t j, const Vec3& xi);

/// Σ_j λ_j ψ̂_{α_j}(ξ).
double psi_hat_total(const DatumSpec& spec, const Vec3& xi);

/// Fourier symbol of the curl acting on ψ: (-iξ2, iξ1) in 2D and
/// (i(ξ2-ξ3), i(ξ3-ξ1), i(ξ1-ξ2)) in 3D.
CVec3 curl_symbol(int dim, const Vec3& xi);

/// â(ξ) = η Σ_j λ_j â_{α_j}(ξ).
CVec3 datum_hat(const DatumSpec& spec, const Vec3& xi);

/// M0_{jk} = ∫ a_j a_k dx by Plancherel quadrature over the bump balls.
Eigen::MatrixXd moment_matrix_zero(const DatumSpec& spec, int quad_points = 48);

/// Integrates f(ξ)·s_b(ξ) over every ball b, where s_b is the (λ- and
/// sign-weighted) bump of ball b. Summing over balls with the total ψ̂ as
/// the other factor integrates products of ψ̂ exactly even if balls overlap.
template <class F>
double integrate_over_balls(const DatumSpec& spec, int quad_points, F&& f);

/// Calls visit(ξ, ball, s_b(ξ), weight) for every quadrature node of every ball.
template <class V>
void for_each_ball_node(const DatumSpec& spec, int quad_points, V&& visit);

}  // namespace concdiff

#include "concdiff/detail/ball_quadrature.hpp"
