#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "concdiff/spectral_field.hpp"

namespace concdiff {

/// Real-to-half-complex transforms between the physical grid x_j = j·L/N
/// (periodic, so equivalently [−L/2, L/2)) and the coefficient layout of
/// SpectralField. to_spectral includes the 1/N^d normalization, so the two
/// directions are exact inverses on band-limited data.
class SpectralTransform {
 public:
  explicit SpectralTransform(const GridSpec& grid);
  ~SpectralTransform();
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  const GridSpec& grid() const { return grid_; }

  void to_physical(std::span<const Complex> coeffs, std::span<double> values);
  void to_spectral(std::span<const double> values, std::span<Complex> coeffs);

  /// Inverse transform of every component of `field`.
  std::vector<std::vector<double>> to_physical(const SpectralField& field);

 private:
  struct Plans;
  GridSpec grid_;
  std::unique_ptr<Plans> plans_;
};

/// Caps the number of threads used by transforms planned after the call.
void set_transform_threads(int threads);

}  // namespace concdiff
