#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace concdiff {

/// Points and wave vectors in R^2 or R^3. In two dimensions the third
/// entry is kept at zero so the same arithmetic serves both cases.
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<std::complex<double>, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }

/// The cyclic coordinate map α ↦ α̃: (α2, α1) in 2D, (α2, α3, α1) in 3D.
/// Applying it `dim` times gives the identity.
struct TildeMap {
  int dim = 2;

  Vec3 operator()(const Vec3& a) const {
    if (dim == 2) return {a[1], a[0], 0.0};
    return {a[1], a[2], a[0]};
  }

  /// Integer lattice version of the same permutation.
  std::array<int, 3> operator()(const std::array<int, 3>& m) const {
    if (dim == 2) return {m[1], m[0], 0};
    return {m[1], m[2], m[0]};
  }

  /// Component cycle paired with the coordinate map: a symmetric field
  /// satisfies a_{next(m)}(x) = a_m(x̃).
  int next(int m) const { return (m + 1) % dim; }
};

/// (2π)^{-d}, the Plancherel factor for the transform φ̂(ξ) = ∫φ(x)e^{-iξ·x}dx.
inline double plancherel_factor(int dim) {
  return std::pow(2.0 * std::numbers::pi, -static_cast<double>(dim));
}

/// Surface area of the unit sphere S^{d-1}.
inline double sphere_area(int dim) { return dim == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi; }

}  // namespace concdiff
