#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "concdiff/correlation.hpp"
#include "concdiff/datum.hpp"
#include "concdiff/design.hpp"
#include "concdiff/error.hpp"
#include "concdiff/nsflow.hpp"

namespace concdiff {

using Json = nlohmann::json;

/// DatumSpec plus the grid it is meant to be assembled on.
struct DatumConfig {
  DatumSpec spec;
  double box_length = 128.0;
  int points = 512;
};

namespace detail {

template <class T>
T json_required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::Configuration, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Configuration, std::string("key '") + key + "': " + e.what());
  }
}

template <class T>
T json_optional(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return json_required<T>(j, key);
}

}  // namespace detail

/// [{lambda, alpha}] with alpha of length `dimension`.
Json terms_to_json(const std::vector<ModulationTerm>& terms, int dimension);
std::vector<ModulationTerm> terms_from_json(const Json& j, int dimension);

/// Keys: dimension, delta, eta, profile, L, N, terms[{lambda, alpha}].
Json to_json(const DatumConfig& config);
/// Missing L/N fall back to the dimension defaults (2D: 128/512, 3D: 64/96).
/// Malformed input throws ErrorKind::Configuration.
DatumConfig datum_config_from_json(const Json& j);

/// Keys: dimension, times, epsilon, gamma, c (epsilon and c optional).
Json to_json(const DesignProblem& problem);
DesignProblem design_problem_from_json(const Json& j);

/// Problem keys plus T, mu, lambdas, alphas, matrix_det, condition.
Json to_json(const DesignSolution& solution);
DesignSolution design_solution_from_json(const Json& j);

Json to_json(const DesignReport& report);

double default_box_length(int dimension);
int default_points(int dimension);
double default_delta(int dimension);

/// CSV with header t,K11,K12,K22 (2D) or t,K11,K12,K13,K22,K23,K33 (3D),
/// values printed with 17 significant digits.
void write_moments_csv(const std::filesystem::path& path, const MomentTrajectory& moment);
MomentTrajectory read_moments_csv(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; keys sorted, so output is stable.
void write_json_file(const std::filesystem::path& path, const Json& j);

/// Shortest round-trip decimal form of x (used for every CSV number).
std::string format_double(double x);

}  // namespace concdiff
