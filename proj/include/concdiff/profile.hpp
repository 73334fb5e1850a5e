#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace concdiff {

using RadialFunction = std::function<double(double)>;

/// Radial Fourier-space envelope φ̂(|ξ|): smooth, nonnegative, supported in
/// the closed unit ball and scaled so that ∫_{R^d} φ̂(|ξ|)² dξ = 1/d.
class BumpProfile {
 public:
  BumpProfile() = default;
  BumpProfile(RadialFunction raw, double constant, int dim, std::string name);

  /// φ̂ at radius r; exactly zero for r ≥ 1.
  double operator()(double r) const {
    if (r >= 1.0) return 0.0;
    return constant_ * raw_(r);
  }

  double normalization_constant() const { return constant_; }
  int dimension() const { return dim_; }
  const std::string& name() const { return name_; }
  double peak() const { return peak_; }

 private:
  RadialFunction raw_;
  double constant_ = 0.0;
  int dim_ = 2;
  std::string name_;
  double peak_ = 0.0;
};

/// ∫_{R^d} f(|ξ|)² dξ for f supported in the unit ball.
double radial_l2_norm_squared(const RadialFunction& f, int dim);

/// Scales `raw` so that the squared L² norm over R^d equals 1/d.
/// Throws ErrorKind::InvalidProfile when `raw` vanishes identically.
BumpProfile normalize_profile(RadialFunction raw, int dim, std::string name = "custom");

/// Built-in profiles: "bump" = exp(-1/(1-r²)), "flat-bump" = exp(-1/(1-r⁴)).
BumpProfile named_profile(std::string_view name, int dim);
std::vector<std::string> profile_names();

}  // namespace concdiff
