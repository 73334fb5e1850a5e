#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "concdiff/datum.hpp"
#include "concdiff/geometry.hpp"

namespace concdiff {

/// Prescribed sign-change times 0 < t_1 < … < t_N for E^app.
struct DesignProblem {
  std::vector<double> times;
  /// Half-width of the window around each t_i; defaults to 0.05·(smallest
  /// gap between consecutive times, or t_1 when N = 1).
  std::optional<double> epsilon;
  double gamma = 4.0;
  /// Right-hand side of the last equation. When absent the system is solved
  /// with c = 1 and μ is rescaled so that max|μ_j| = 1.
  std::optional<double> c;
  int dimension = 2;

  double resolved_epsilon() const;
  /// Throws ErrorKind::InvalidDesign naming the violated constraint.
  void validate() const;
};

struct DesignSolution {
  int dimension = 2;
  double gamma = 4.0;
  double c = 1.0;
  double epsilon = 0.0;
  std::vector<double> times;
  std::vector<double> T;
  std::vector<double> mu;
  std::vector<double> lambdas;
  std::vector<Vec3> alphas;
  double matrix_det = 0.0;
  double condition = 0.0;
};

/// Rows 1..N: (1 − T_i^j)_j; last row: (j·T_1^j)_j, j = 1..N+1.
Eigen::MatrixXd build_matrix(const std::vector<double>& T);

/// Product formula −T_1(1−T_1)∏(1−T_i)∏_{i≥2}(T_1−T_i)∏_{i<i'}(T_{i'}−T_i).
double det_closed(const std::vector<double>& T);

/// T_i = exp(−2γ t_i).
std::vector<double> design_T(const DesignProblem& problem);

struct MuSolution {
  std::vector<double> mu;
  double c = 0.0;
  double condition = 0.0;
};

/// Solves M μ = (0, …, 0, c)ᵀ by LU with partial pivoting. Throws
/// ErrorKind::Conditioning when the estimated condition number exceeds 1e12.
MuSolution solve_mu(const DesignProblem& problem);

/// Σ_j μ_j (1 − e^{−2γ j t}).
double eval_Eapp(const std::vector<double>& mu, double gamma, double t);
/// Σ_j μ_j 2γj e^{−2γ j t}.
double eval_dEapp(const std::vector<double>& mu, double gamma, double t);

/// α1α2/|α|² in 2D, (α1−α3)(α2−α3)/|α|² in 3D.
double geometric_factor(int dim, const Vec3& alpha);

/// Chooses |α_j|² = γj on a fixed ray per sign of μ_j and λ_j ≥ 0 with
/// λ_j² · geometric_factor(α_j) = μ_j.
/// 2D: α = √(γj)(cos θ, sin θ), θ = π/6 (μ > 0) or −π/6.
/// 3D: α = √(γj)(0, cos θ, sin θ), θ = π/3 (μ > 0) or π/6.
DesignSolution realize_phases(const DesignProblem& problem, const MuSolution& mu);

/// solve_mu followed by realize_phases.
DesignSolution solve_design(const DesignProblem& problem);

struct DesignCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct DesignReport {
  std::vector<double> residuals;     // E^app(t_i)
  std::vector<double> derivatives;   // dE^app/dt(t_i)
  std::vector<bool> sign_changes;
  double derivative_t1 = 0.0;
  std::vector<DesignCheck> checks;

  bool passed() const;
};

/// Non-throwing verification of a solved design.
DesignReport verify_design(const DesignSolution& solution);

/// Builds the datum Σ λ_j a^δ_{α_j} from a design.
DatumSpec datum_from_design(const DesignSolution& solution, double delta, double eta,
                            const BumpProfile& profile);

}  // namespace concdiff
