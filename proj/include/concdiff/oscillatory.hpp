#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "concdiff/farfield.hpp"
#include "concdiff/geometry.hpp"

namespace concdiff {

/// ȧ = η(−∂₂ℓ, ∂₁ℓ, 0) with ℓ = 1/log(e+|x|²), and its modulation
/// ā = ȧ·sin(|x|²). Both have the form η(x₂h(r), −x₁h(r), 0).
enum class KatoKind { Plain, Modulated };

std::string_view to_string(KatoKind kind);
/// Accepts "plain" and "modulated"; throws ErrorKind::Configuration otherwise.
KatoKind parse_kato_kind(std::string_view name);

/// h(r) = 2/((e+r²) log²(e+r²)), times sin(r²) for the modulated kind.
double kato_radial_profile(KatoKind kind, double r);

Vec3 kato_datum(KatoKind kind, double eta, const Vec3& x);

/// Pointwise datum for heat_point; `chirp` c means the field oscillates like
/// sin(c|y|²) and drives the resolution check (0: non-oscillating).
struct PointDatum {
  FieldSampler field;
  double chirp = 0.0;
};

PointDatum kato_point_datum(KatoKind kind, double eta);

/// Default truncation radius 12√t: the 3D Gaussian mass outside it is ~2e-15.
double default_heat_radius(double t);

/// Mass of the 3D heat kernel at time t outside the ball of radius R.
double heat_tail_mass(double t, double R);

/// (4πt)^{−3/2}∫ e^{−|y−x|²/4t} a(y) dy over the cube of half-width R
/// centred at x, composite Gauss–Legendre with n nodes per axis (rounded up
/// to a multiple of 8). Throws ErrorKind::Domain unless t > 0 and R ≥ 8√t,
/// and ErrorKind::UnderResolved when n gives fewer than 4 nodes per local
/// wavelength π/(c|x|) of an oscillating datum.
Vec3 heat_point(const PointDatum& datum, const Vec3& x, double t, double R, int n);
Vec3 heat_point(KatoKind kind, double eta, const Vec3& x, double t, int n = 128);

/// Value of the heat flow of h(r)·x_j divided by x_j, i.e. the radial factor
/// H with e^{tΔ}(x_j h) = x_j H: the 5D radial heat semigroup applied to h,
/// evaluated by a 1D quadrature that resolves the sin(r²) oscillation.
/// With `minus_datum`, returns H − h instead.
struct RadialValue {
  double value = 0.0;
  /// Round-off plus truncated-tail bound; values below it are noise.
  double noise_floor = 0.0;
};
RadialValue kato_heat_radial(KatoKind kind, double r, double t, bool minus_datum = false, double R = 0.0);

/// e^{tΔ}a(x) by the radial route.
Vec3 kato_heat(KatoKind kind, double eta, const Vec3& x, double t);

struct KatoSample {
  double r = 0.0;
  double magnitude = 0.0;
  double noise_floor = 0.0;
  bool above_floor = false;
};

struct KatoDecay {
  KatoKind kind = KatoKind::Plain;
  double t = 0.0;
  Vec3 direction{};
  bool difference = false;  // |e^{tΔ}a − a| instead of |e^{tΔ}a|
  std::vector<KatoSample> samples;
  bool fitted = false;      // false when fewer than two samples clear the noise floor
  DecayFit fit;
};

/// Samples |e^{tΔ}a| (or |e^{tΔ}a − a|) along the ray rω and fits the
/// log-log slope using only samples above their noise floor.
KatoDecay measure_heat_decay(KatoKind kind, double eta, double t, const Vec3& omega,
                             const std::vector<double>& radii);
KatoDecay measure_difference_decay(KatoKind kind, double eta, double t, const Vec3& omega,
                                   const std::vector<double>& radii);

struct LqRow {
  double radius = 0.0;
  double partial = 0.0;    // ∫_{|x|≤R} |e^{tΔ}a|^q dx
  double increment = 0.0;  // partial − previous partial
};

struct LqTrend {
  KatoKind kind = KatoKind::Plain;
  double t = 0.0;
  double q = 0.0;
  std::vector<LqRow> rows;
  /// increment / partial at the last radius (0 when the total is 0).
  double last_increment_ratio = 0.0;
};

/// Partial L^q norms over increasing balls. Uses |e^{tΔ}a(x)| = |η| r sinθ |H(r)|,
/// so each partial norm is a radial integral times 2π∫₀^π sin^{q+1}θ dθ.
/// Requires 1 ≤ q < 3 and increasing positive radii.
LqTrend lq_trend(KatoKind kind, double eta, double t, double q, const std::vector<double>& radii);

}  // namespace concdiff
