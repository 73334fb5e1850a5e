#include "concdiff/profile.hpp"

#include <cmath>

#include "concdiff/error.hpp"
#include "concdiff/geometry.hpp"
#include "concdiff/quadrature.hpp"

namespace concdiff {

namespace {

double standard_bump(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

double flat_bump(double r) {
  if (r >= 1.0) return 0.0;
  const double r2 = r * r;
  return std::exp(-1.0 / (1.0 - r2 * r2));
}

}  // namespace

BumpProfile::BumpProfile(RadialFunction raw, double constant, int dim, std::string name)
    : raw_(std::move(raw)), constant_(constant), dim_(dim), name_(std::move(name)) {
  peak_ = constant_ * raw_(0.0);
}

double radial_l2_norm_squared(const RadialFunction& f, int dim) {
  auto integrand = [&](double r) {
    const double v = r < 1.0 ? f(r) : 0.0;
    return std::pow(r, dim - 1) * v * v;
  };
  return sphere_area(dim) * adaptive_integral(integrand, 0.0, 1.0, 1e-14);
}

BumpProfile normalize_profile(RadialFunction raw, int dim, std::string name) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::InvalidProfile, "dimension must be 2 or 3");
  const double norm2 = radial_l2_norm_squared(raw, dim);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw Error(ErrorKind::InvalidProfile, "raw radial profile '" + name + "' is identically zero");
  }
  const double constant = std::sqrt(1.0 / (dim * norm2));
  return BumpProfile(std::move(raw), constant, dim, std::move(name));
}

BumpProfile named_profile(std::string_view name, int dim) {
  if (name == "bump") return normalize_profile(standard_bump, dim, "bump");
  if (name == "flat-bump") return normalize_profile(flat_bump, dim, "flat-bump");
  throw Error(ErrorKind::Configuration, "unknown profile '" + std::string(name) + "'");
}

std::vector<std::string> profile_names() { return {"bump", "flat-bump"}; }

}  // namespace concdiff
