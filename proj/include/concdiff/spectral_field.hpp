#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <filesystem>
#include <span>
#include <vector>

#include "concdiff/datum.hpp"
#include "concdiff/geometry.hpp"

namespace concdiff {

using Complex = std::complex<double>;

/// Periodic box [−L/2, L/2)^d sampled with N points per dimension.
/// Wavenumbers are (2π/L)·m with m_i ∈ [−N/2, N/2).
struct GridSpec {
  int dimension = 2;
  double box_length = 128.0;
  int points = 512;

  bool operator==(const GridSpec&) const = default;

  double dk() const;
  /// Extent of the last (half-complex) axis: N/2 + 1.
  int half_extent() const { return points / 2 + 1; }
  std::size_t mode_count() const;
  std::size_t physical_size() const;
  /// Largest |m| kept by the 2/3 rule: 3|m| < N, so sums of two kept modes
  /// never alias back into the band.
  int dealias_cutoff() const { return (points - 1) / 3; }
  double max_wavenumber() const { return dk() * (points / 2); }
};

/// Divergence-free real vector field stored as Fourier coefficients c_k of
/// u(x) = Σ_k c_k e^{ik·x}. Only the half lattice m_last ≥ 0 is stored; the
/// rest follows from c_{−k} = conj(c_k). A continuum transform û relates to
/// the coefficients by c_k ≈ û(k) / L^d.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const GridSpec& grid, double time = 0.0);

  const GridSpec& grid() const { return grid_; }
  int dimension() const { return grid_.dimension; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  std::span<Complex> component(int c) { return comp_[c]; }
  std::span<const Complex> component(int c) const { return comp_[c]; }
  std::size_t mode_count() const { return grid_.mode_count(); }

  /// Signed lattice index m of stored mode `idx`.
  std::array<int, 3> lattice(std::size_t idx) const;
  /// Wave vector (2π/L)·m of stored mode `idx`.
  Vec3 wavevector(std::size_t idx) const;
  /// Storage index for m with m_last ≥ 0.
  std::size_t index(const std::array<int, 3>& m) const;
  /// Coefficient at any full-lattice index (uses conjugate symmetry).
  Complex at(int comp, std::array<int, 3> m) const;
  /// Number of full-lattice modes represented by stored mode `idx` (1 or 2).
  double multiplicity(std::size_t idx) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  /// this += s * o
  void axpy(double s, const SpectralField& o);
  void set_zero();

  /// Largest coefficient magnitude over all components.
  double max_abs() const;

 private:
  GridSpec grid_;
  double time_ = 0.0;
  std::array<std::vector<Complex>, 3> comp_;
};

/// Samples the continuum datum at the lattice wavenumbers.
/// Requires 2π/L ≤ δ/4 and a Nyquist wavenumber above max|α_j| + δ with a
/// margin; otherwise throws ErrorKind::UnderResolved.
SpectralField assemble_spectral(const DatumSpec& spec, double box_length, int points);
void check_resolution(const DatumSpec& spec, const GridSpec& grid);

/// max_k |k·û(k)| / max_k |û(k)|; zero for the zero field.
double check_divergence_free(const SpectralField& field);

/// max over the lattice of |û_{next(m)}(k) − û_m(k̃)|, the defect of the
/// rotational symmetry ã(x) = a(x̃).
double check_symmetry(const SpectralField& field);
/// check_symmetry divided by max_abs (0 for the zero field).
double symmetry_residual_relative(const SpectralField& field);

/// max |c_{−k} − conj(c_k)| over the self-conjugate planes of the half lattice.
double conjugate_symmetry_residual(const SpectralField& field);

/// ∫_box u_a v_b dx.
double inner_product(const SpectralField& u, int a, const SpectralField& v, int b);
/// The d×d matrix ∫_box u ⊗ u dx.
Eigen::MatrixXd moment_density(const SpectralField& u);
/// ½∫_box |u|² dx.
double kinetic_energy(const SpectralField& u);
/// sqrt(∫_box |u|² dx).
double l2_norm(const SpectralField& u);

/// Binary checkpoint: see README "Field checkpoint format".
void write_field(const std::filesystem::path& path, const SpectralField& field);
SpectralField read_field(const std::filesystem::path& path);

}  // namespace concdiff
