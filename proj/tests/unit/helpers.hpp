#pragma once

#include <cmath>
#include <random>

#include "concdiff/datum.hpp"
#include "concdiff/design.hpp"
#include "concdiff/profile.hpp"

namespace concdiff::testing {

inline double t1_canonical() { return std::log(2.0) / 8.0; }

inline DesignSolution canonical_design(int dim) {
  DesignProblem p;
  p.times = {t1_canonical()};
  p.epsilon = 0.02;
  p.gamma = 4.0;
  p.dimension = dim;
  return solve_design(p);
}

inline DatumSpec canonical_spec(int dim, double delta, double eta = 1.0, const char* profile = "bump") {
  return datum_from_design(canonical_design(dim), delta, eta, named_profile(profile, dim));
}

inline Vec3 random_vec(std::mt19937_64& rng, int dim, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vec3 v{u(rng), u(rng), 0.0};
  if (dim == 3) v[2] = u(rng);
  return v;
}

}  // namespace concdiff::testing
