#include "concdiff/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "concdiff/error.hpp"
#include "concdiff/profile.hpp"

namespace concdiff {

namespace {

Json vec_to_json(const Vec3& v, int d) {
  Json a = Json::array();
  for (int i = 0; i < d; ++i) a.push_back(v[i]);
  return a;
}

Vec3 vec_from_json(const Json& j, int d) {
  if (!j.is_array() || static_cast<int>(j.size()) != d) {
    throw Error(ErrorKind::Configuration, "alpha must be an array of " + std::to_string(d) + " numbers");
  }
  Vec3 v{0.0, 0.0, 0.0};
  for (int i = 0; i < d; ++i) v[i] = j[i].get<double>();
  return v;
}

template <class T>
T required(const Json& j, const char* key) {
  return detail::json_required<T>(j, key);
}

template <class T>
T optional_or(const Json& j, const char* key, T fallback) {
  return detail::json_optional<T>(j, key, fallback);
}

int checked_dimension(const Json& j) {
  const int d = optional_or<int>(j, "dimension", 2);
  if (d != 2 && d != 3) throw Error(ErrorKind::Configuration, "dimension must be 2 or 3");
  return d;
}

}  // namespace

double default_box_length(int dimension) { return dimension == 2 ? 128.0 : 64.0; }
int default_points(int dimension) { return dimension == 2 ? 512 : 96; }
double default_delta(int dimension) { return dimension == 2 ? 0.25 : 0.5; }

Json to_json(const DatumConfig& c) {
  const int d = c.spec.dimension;
  const Json terms = terms_to_json(c.spec.terms, d);
  return {{"dimension", d},
          {"delta", c.spec.delta},
          {"eta", c.spec.eta},
          {"profile", c.spec.profile.name()},
          {"L", c.box_length},
          {"N", c.points},
          {"terms", terms}};
}

DatumConfig datum_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Configuration, "datum config must be a JSON object");
  DatumConfig c;
  const int d = checked_dimension(j);
  c.spec.dimension = d;
  c.spec.delta = required<double>(j, "delta");
  c.spec.eta = optional_or<double>(j, "eta", 1.0);
  c.spec.profile = named_profile(optional_or<std::string>(j, "profile", "bump"), d);
  c.box_length = optional_or<double>(j, "L", default_box_length(d));
  c.points = optional_or<int>(j, "N", default_points(d));
  if (!j.contains("terms") || !j.at("terms").is_array() || j.at("terms").empty()) {
    throw Error(ErrorKind::Configuration, "datum config needs a non-empty 'terms' array");
  }
  c.spec.terms = terms_from_json(j.at("terms"), d);
  return c;
}

Json terms_to_json(const std::vector<ModulationTerm>& terms, int dimension) {
  Json out = Json::array();
  for (const auto& t : terms) out.push_back({{"lambda", t.lambda}, {"alpha", vec_to_json(t.alpha, dimension)}});
  return out;
}

std::vector<ModulationTerm> terms_from_json(const Json& j, int dimension) {
  if (!j.is_array()) throw Error(ErrorKind::Configuration, "'terms' must be an array");
  std::vector<ModulationTerm> terms;
  for (const auto& t : j) {
    if (!t.contains("alpha")) throw Error(ErrorKind::Configuration, "term without 'alpha'");
    terms.push_back({required<double>(t, "lambda"), vec_from_json(t.at("alpha"), dimension)});
  }
  return terms;
}

Json to_json(const DesignProblem& p) {
  Json j = {{"dimension", p.dimension}, {"times", p.times}, {"gamma", p.gamma}};
  j["epsilon"] = p.epsilon ? Json(*p.epsilon) : Json(nullptr);
  j["c"] = p.c ? Json(*p.c) : Json(nullptr);
  return j;
}

DesignProblem design_problem_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Configuration, "design config must be a JSON object");
  DesignProblem p;
  p.dimension = checked_dimension(j);
  p.times = required<std::vector<double>>(j, "times");
  p.gamma = optional_or<double>(j, "gamma", 4.0);
  if (j.contains("epsilon") && !j.at("epsilon").is_null()) p.epsilon = required<double>(j, "epsilon");
  if (j.contains("c") && !j.at("c").is_null()) p.c = required<double>(j, "c");
  return p;
}

Json to_json(const DesignSolution& s) {
  Json alphas = Json::array();
  for (const auto& a : s.alphas) alphas.push_back(vec_to_json(a, s.dimension));
  return {{"dimension", s.dimension}, {"gamma", s.gamma},           {"c", s.c},
          {"epsilon", s.epsilon},     {"times", s.times},           {"T", s.T},
          {"mu", s.mu},               {"lambdas", s.lambdas},       {"alphas", alphas},
          {"matrix_det", s.matrix_det}, {"condition", s.condition}};
}

DesignSolution design_solution_from_json(const Json& j) {
  DesignSolution s;
  s.dimension = checked_dimension(j);
  s.gamma = required<double>(j, "gamma");
  s.c = required<double>(j, "c");
  s.epsilon = required<double>(j, "epsilon");
  s.times = required<std::vector<double>>(j, "times");
  s.T = required<std::vector<double>>(j, "T");
  s.mu = required<std::vector<double>>(j, "mu");
  s.lambdas = required<std::vector<double>>(j, "lambdas");
  for (const auto& a : j.at("alphas")) s.alphas.push_back(vec_from_json(a, s.dimension));
  s.matrix_det = optional_or<double>(j, "matrix_det", 0.0);
  s.condition = optional_or<double>(j, "condition", 0.0);
  if (s.lambdas.size() != s.alphas.size() || s.mu.size() != s.times.size() + 1) {
    throw Error(ErrorKind::Configuration, "design solution arrays have inconsistent lengths");
  }
  return s;
}

Json to_json(const DesignReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  std::vector<int> signs;
  for (bool b : r.sign_changes) signs.push_back(b ? 1 : 0);
  return {{"residuals", r.residuals},
          {"derivatives", r.derivatives},
          {"sign_changes", signs},
          {"derivative_t1", r.derivative_t1},
          {"checks", checks},
          {"passed", r.passed()}};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_moments_csv(const std::filesystem::path& path, const MomentTrajectory& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  const int d = m.dimension;
  out << "t";
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out << ",K" << i + 1 << j + 1;
  out << '\n';
  for (std::size_t n = 0; n < m.times.size(); ++n) {
    out << format_double(m.times[n]);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) out << ',' << format_double(m.K[n](i, j));
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

MomentTrajectory read_moments_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  int d = 0;
  if (line == "t,K11,K12,K22") d = 2;
  if (line == "t,K11,K12,K13,K22,K23,K33") d = 3;
  if (d == 0) throw Error(ErrorKind::Configuration, "unrecognized moment CSV header in " + path.string());
  MomentTrajectory m;
  m.dimension = d;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double x = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw Error(ErrorKind::Configuration, path.string() + ":" + std::to_string(row) + ": bad number '" + cell + "'");
      }
      v.push_back(x);
    }
    const std::size_t expect = 1 + static_cast<std::size_t>(d * (d + 1) / 2);
    if (v.size() != expect) {
      throw Error(ErrorKind::Configuration, path.string() + ":" + std::to_string(row) + ": wrong column count");
    }
    Eigen::MatrixXd K(d, d);
    std::size_t c = 1;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) K(i, j) = K(j, i) = v[c++];
    m.times.push_back(v[0]);
    m.K.push_back(K);
  }
  return m;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Configuration, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace concdiff
