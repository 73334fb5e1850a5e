#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "concdiff/datum.hpp"
#include "concdiff/fft.hpp"
#include "concdiff/spectral_field.hpp"

namespace concdiff {

/// e^{tΔ}f: every coefficient times e^{−t|k|²}. Throws ErrorKind::Domain for t < 0.
SpectralField heat(const SpectralField& f, double t);
void apply_heat(SpectralField& f, double t);

/// Per-mode I − kkᵀ/|k|²; the k = 0 mode passes through.
SpectralField leray_project(const SpectralField& f);
void apply_leray(SpectralField& f);

/// True for modes kept by the 2/3 rule (3|m_i| < N in every direction).
bool in_dealias_band(const GridSpec& grid, const std::array<int, 3>& m);

/// Pseudo-spectral P∇·(u⊗v) with 2/3-rule truncation of inputs and output.
/// Two-argument calls use the symmetric product (u⊗v + v⊗u)/2.
class NonlinearOperator {
 public:
  explicit NonlinearOperator(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  void apply(const SpectralField& u, SpectralField& out);
  void apply(const SpectralField& u, const SpectralField& v, SpectralField& out);
  SpectralField operator()(const SpectralField& u);

  const std::vector<char>& band() const { return band_; }
  const std::vector<double>& k2() const { return k2_; }

 private:
  void apply_impl(const SpectralField& u, const SpectralField* v, SpectralField& out);
  void load_physical(const SpectralField& f, std::array<std::vector<double>, 3>& dst);

  GridSpec grid_;
  SpectralTransform transform_;
  std::vector<char> band_;
  std::array<std::vector<double>, 3> k_;
  std::vector<double> k2_;
  std::array<std::vector<double>, 3> pu_;
  std::array<std::vector<double>, 3> pv_;
  std::vector<double> product_;
  std::vector<Complex> scratch_;
};

/// One-shot P∇·(u⊗u).
SpectralField nonlinear_term(const SpectralField& u);

struct SimulationOptions {
  double t_end = 0.0;
  /// Defaults to default_dt(grid, t_end / 2).
  std::optional<double> dt;
  /// Keep a full field every `snapshot_stride` steps (0: initial and final only).
  int snapshot_stride = 8;
  /// L² norm beyond this multiple of the initial norm aborts with ErrorKind::Divergence.
  double blowup_factor = 10.0;
  double box_length = 128.0;
  int points = 512;
};

/// min(0.25·(L/N)², t_ref/64).
double default_dt(const GridSpec& grid, double t_ref);

struct StepRecord {
  double time = 0.0;
  double energy = 0.0;      // ½∫|u|²
  double divergence = 0.0;  // check_divergence_free
  double symmetry = 0.0;    // symmetry_residual_relative
  Eigen::MatrixXd moments;  // ∫u⊗u dx
};

struct FlowTrajectory {
  GridSpec grid;
  double dt = 0.0;
  std::string scheme = "integrating-factor RK4";
  std::vector<StepRecord> steps;  // steps[n] at time n·dt (last one may be shorter)
  std::vector<SpectralField> snapshots;
  std::vector<std::size_t> snapshot_steps;

  double max_divergence() const;
  double max_symmetry() const;
  /// max_n (E_{n+1} − E_n)/E_n; ≤ 0 when the discrete energy never grows.
  double max_energy_increase() const;
  /// max_n max_i |M₁₁ − M_ii| / M₁₁ over the recorded moment densities.
  double max_diagonal_spread() const;
  const SpectralField& final_state() const { return snapshots.back(); }
};

/// Integrating-factor (Lawson) RK4 for ∂_t u = Δu − P∇·(u⊗u).
class FlowStepper {
 public:
  FlowStepper(const GridSpec& grid, double dt);
  void step(SpectralField& u);
  /// Step of arbitrary size h (multipliers built on the fly).
  void step(SpectralField& u, double h);
  double dt() const { return dt_; }

 private:
  void step_with(SpectralField& u, double h, const std::vector<double>& full, const std::vector<double>& half);

  GridSpec grid_;
  double dt_;
  NonlinearOperator nonlinear_;
  std::vector<double> e_full_;
  std::vector<double> e_half_;
  SpectralField k1_, k2_, k3_, k4_, tmp_, base_;
};

/// Throws ErrorKind::UnderResolved if any nonzero mode lies outside the 2/3-rule band.
void require_in_band(const SpectralField& u0);

/// Requires the datum to lie inside the 2/3-rule band (else ErrorKind::UnderResolved).
FlowTrajectory simulate(const DatumSpec& spec, const SimulationOptions& options);
FlowTrajectory simulate_field(const SpectralField& u0, const SimulationOptions& options);

struct MomentTrajectory {
  int dimension = 2;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> K;
  std::string quadrature = "trapezoid";
};

/// K(t_n) = ∫₀^{t_n} ∫u⊗u by the trapezoid rule over the recorded steps.
MomentTrajectory accumulate_K(const FlowTrajectory& traj);

struct ZeroBracket {
  bool found = false;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double k12_lo = 0.0;
  double k12_hi = 0.0;
  /// Extremes of K₁₂ over the searched interval (reported when not found).
  double k12_min = 0.0;
  double k12_max = 0.0;
  int sign_changes = 0;
  bool refined = false;
  /// Linear-interpolation estimate of the zero and K evaluated there.
  double t_star = 0.0;
  Eigen::MatrixXd K_star;
};

/// First sign change of K₁₂ among the samples inside [a, b].
ZeroBracket find_zero_K12(const MomentTrajectory& moment, double a, double b);

/// Narrows a bracket by re-simulating across it with dt/factor, restarting
/// from the last stored snapshot before it, then integrates exactly to the
/// interpolated zero to obtain K(t*).
ZeroBracket refine_zero_K12(const FlowTrajectory& traj, const MomentTrajectory& moment,
                            const ZeroBracket& bracket, int factor = 16);

/// Diagnostic version of ‖f‖_F = sup(1+|x|)^{d+1}|f| + sup(1+t)^{(d+1)/2}|f|
/// over the grid points with |x| ≤ radius (minimum image) and the given states.
double fnorm_diag(const std::vector<SpectralField>& states, double radius);
double fnorm_diag(const FlowTrajectory& traj, double radius);

/// States e^{tΔ}a at the given times.
std::vector<SpectralField> heat_flow(const SpectralField& datum, const std::vector<double>& times);

/// Fields sampled on the uniform grid s_n = n·dt, n = 0..M.
struct SampledTrajectory {
  double dt = 0.0;
  std::vector<SpectralField> fields;

  double time(std::size_t n) const { return dt * static_cast<double>(n); }
};

/// B(u,v)(s_n) = −∫₀^{s_n} e^{(s_n−s)Δ} P∇·(u⊗v)_sym(s) ds for every node,
/// composite Simpson in s (3/8 closure for odd n, trapezoid for n = 1).
SampledTrajectory bilinear_B(const SampledTrajectory& u, const SampledTrajectory& v);
/// Value at a single node time t = n·dt.
SpectralField bilinear_B(const SampledTrajectory& u, const SampledTrajectory& v, double t);

/// T_1 = heat flow, T_k = Σ_{l=1}^{k−1} B(T_l, T_{k−l}), memoized.
class PicardSeries {
 public:
  PicardSeries(const SpectralField& datum, double t_end, int intervals, int max_order = 4);

  const SampledTrajectory& term(int k);
  /// Σ_{k ≤ order} T_k at node n.
  SpectralField partial_sum(int order, std::size_t n);
  int max_order() const { return max_order_; }
  double dt() const { return dt_; }
  int intervals() const { return intervals_; }

 private:
  SpectralField datum_;
  double dt_;
  int intervals_;
  int max_order_;
  std::vector<std::unique_ptr<SampledTrajectory>> terms_;
};

/// picard_term(k): memo-free convenience wrapper.
SampledTrajectory picard_term(int k, const SpectralField& datum, double t_end, int intervals);

struct CalibrationStep {
  double eta = 0.0;
  double remainder = 0.0;  // max_t |K₁₂ + η²E|
  double scale = 0.0;      // η² max_t |E|
  bool accepted = false;
};

struct CalibrationOptions {
  double t_end = 0.0;
  double ratio = 0.1;
  int max_halvings = 8;
  double fnorm_radius = 0.0;  // 0: L/4
  SimulationOptions simulation;
};

struct CalibrationResult {
  double eta = 0.0;
  double eta0 = 0.0;
  double fnorm_unit = 0.0;
  bool converged = false;
  std::vector<CalibrationStep> history;
};

/// η₀ = 0.1 / fnorm_diag(heat flow of the unit datum), halved until
/// max_t|K₁₂ + η²E| ≤ ratio·η² max_t|E| over [0, t_end] (see
/// second_order_remainder).
CalibrationResult calibrate_eta(const DatumSpec& unit_spec, const CalibrationOptions& options);

/// max_t |K₁₂(t) + η²E(t)| and η² max_t |E(t)| over the trajectory times,
/// with E the lattice heat correlation of the unit datum integrated by the
/// same trapezoid rule as K.
std::pair<double, double> second_order_remainder(const MomentTrajectory& moment, const SpectralField& unit_datum,
                                                 double eta);

}  // namespace concdiff
