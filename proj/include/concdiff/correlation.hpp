#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "concdiff/datum.hpp"
#include "concdiff/design.hpp"
#include "concdiff/spectral_field.hpp"

namespace concdiff {

/// E(a)(t) = −∫₀ᵗ∫ e^{sΔ}a₁ e^{sΔ}a₂ dx ds, written in Fourier variables as
///   (2π)^{−d} ∫ (1 − e^{−2t|ξ|²})/(2|ξ|²) · G(ξ) · |ψ̂(ξ)|² dξ · η²
/// with G = ξ₁ξ₂ (2D) or (ξ₁−ξ₃)(ξ₂−ξ₃) (3D). The quadrature nodes are
/// built once so that many t values are cheap.
class ClosedFormCorrelation {
 public:
  /// Throws ErrorKind::UnderResolved when quad_points < kMinQuadPoints.
  ClosedFormCorrelation(const DatumSpec& spec, int quad_points = 48);

  double operator()(double t) const;
  /// dE/dt = (2π)^{−d} η² ∫ e^{−2t|ξ|²} G |ψ̂|².
  double derivative(double t) const;

  static constexpr int kMinQuadPoints = 8;

 private:
  std::vector<double> k2_;
  std::vector<double> weight_;
};

/// Convenience wrapper around ClosedFormCorrelation.
double eval_E_closed(const DatumSpec& spec, double t, int quad_points = 48);

/// Same quantity from the per-term reduction to a single bump ball, valid
/// only for admissible specs: 2D 2∫(1−e^{−2t|ξ|²})ξ₁ξ₂/|ξ|² φ̂^δ(ξ−α)², 3D
/// ∫(1−e^{−2t|ξ|²})(|ξ|²−ξ₁ξ₂−ξ₂ξ₃−ξ₃ξ₁)/|ξ|² φ̂^δ(ξ−α)², times λ²η²(2π)^{−d}.
double eval_E_reduced(const DatumSpec& spec, double t, int quad_points = 48);

/// 2D only: η²(2π)^{−2}·2∫_{ξ₁≥|ξ₂|}(1−e^{−2t|ξ|²})ξ₁ξ₂/|ξ|²|ψ̂(ξ)|² dξ, the
/// cone-restricted form of E (equal to E for admissible specs).
double eval_E_cone_2d(const DatumSpec& spec, double t, int quad_points = 48);

/// δ → 0 limit of E for the spec's (λ, α): η²(2π)^{−d} Σ λ_j² (1−e^{−2t|α_j|²}) g(α_j)
/// with g = α₁α₂/|α|² in 2D and (|α|²−α₁α₂−α₂α₃−α₃α₁)/(3|α|²) in 3D.
double eval_E_limit(const DatumSpec& spec, double t);

struct OracleOptions {
  int time_steps = 256;
  double box_length = 512.0;
  int points = 1024;
};

/// Independent route: assembles the datum on the lattice, applies the heat
/// multiplier at the nodes of a composite Simpson rule in s, and integrates
/// the discrete Plancherel sum of e^{sΔ}a₁·e^{sΔ}a₂.
double eval_E_oracle(const DatumSpec& spec, double t, const OracleOptions& options = {});

/// Oracle evaluation at several t values sharing one assembled field.
std::vector<double> eval_E_oracle(const DatumSpec& spec, const std::vector<double>& times,
                                  const OracleOptions& options = {});

/// The exact time integral of the lattice Plancherel sum for an already
/// assembled (or evolved) field: E of the periodized datum.
double eval_E_lattice(const SpectralField& field, double t);

/// Cumulative trapezoid in time of −∫_box (e^{sΔ}a)₁(e^{sΔ}a)₂ dx over the
/// given increasing nodes (first node must be 0). Matches the time
/// quadrature used for K, so comparisons against K carry no O(dt²) bias.
std::vector<double> eval_E_lattice_trapezoid(const SpectralField& field, const std::vector<double>& times);

struct CorrelationCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::string method;  // "closed-form", "oracle", "lattice" or "limit"
};

CorrelationCurve sample_curve(const std::function<double(double)>& f, const std::vector<double>& times,
                              std::string method);

struct SignChange {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
};

/// Samples `samples` uniform subintervals of [a, b], then bisects every
/// subinterval whose endpoint values have opposite signs until its width is
/// at most `tolerance`. Returns an empty list when no sign change is seen.
std::vector<SignChange> find_sign_changes(const std::function<double(double)>& f, double a, double b,
                                          double tolerance, int samples = 64);

struct DeltaSweepRow {
  double delta = 0.0;
  bool admissible = false;
  std::string reason;  // admissibility violation, empty when admissible
  /// sup_t |(2π)^d E(a^δ)(t)/η² − E^app(t)| over the sampled times.
  double deviation = 0.0;
  /// Number of sign changes of E(a^δ) inside each (t_i − ε, t_i + ε).
  std::vector<int> crossings;
};

/// Compares E(a^δ) with the design's E^app for each δ. Inadmissible δ values
/// are still evaluated (the closed form does not need disjoint supports) and
/// flagged.
std::vector<DeltaSweepRow> delta_sweep(const DesignSolution& design, const std::vector<double>& deltas,
                                       const std::vector<double>& times, const BumpProfile& profile,
                                       int quad_points = 48);

}  // namespace concdiff
