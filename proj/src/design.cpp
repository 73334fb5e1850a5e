#include "concdiff/design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "concdiff/error.hpp"

namespace concdiff {

namespace {

void check_T(const std::vector<double>& T) {
  if (T.empty()) throw Error(ErrorKind::InvalidDesign, "at least one time is required");
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (!(T[i] > 0.0 && T[i] < 1.0)) {
      std::ostringstream why;
      why << "T_" << i + 1 << " = " << T[i] << " is outside (0, 1)";
      throw Error(ErrorKind::InvalidDesign, why.str());
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (T[i] == T[j]) throw Error(ErrorKind::InvalidDesign, "repeated T values");
    }
  }
}

}  // namespace

double DesignProblem::resolved_epsilon() const {
  if (epsilon) return *epsilon;
  double gap = times.empty() ? 0.0 : times.front();
  for (std::size_t i = 1; i < times.size(); ++i) gap = std::min(gap, times[i] - times[i - 1]);
  return 0.05 * gap;
}

void DesignProblem::validate() const {
  if (times.empty()) throw Error(ErrorKind::InvalidDesign, "times: empty list");
  if (!(times.front() > 0.0)) throw Error(ErrorKind::InvalidDesign, "times: t_1 must be positive");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw Error(ErrorKind::InvalidDesign, "times: must be strictly increasing");
  }
  if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidDesign, "gamma: must be positive");
  if (c && *c == 0.0) throw Error(ErrorKind::InvalidDesign, "c: must be nonzero");
  if (epsilon && !(*epsilon > 0.0)) throw Error(ErrorKind::InvalidDesign, "epsilon: must be positive");
  if (dimension != 2 && dimension != 3) throw Error(ErrorKind::InvalidDesign, "dimension: must be 2 or 3");
}

Eigen::MatrixXd build_matrix(const std::vector<double>& T) {
  check_T(T);
  const int n = static_cast<int>(T.size());
  Eigen::MatrixXd m(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 1; j <= n + 1; ++j) m(i, j - 1) = 1.0 - std::pow(T[i], j);
  }
  for (int j = 1; j <= n + 1; ++j) m(n, j - 1) = j * std::pow(T[0], j);
  return m;
}

double det_closed(const std::vector<double>& T) {
  check_T(T);
  const std::size_t n = T.size();
  double det = -T[0] * (1.0 - T[0]);
  for (std::size_t i = 0; i < n; ++i) det *= 1.0 - T[i];
  for (std::size_t i = 1; i < n; ++i) det *= T[0] - T[i];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) det *= T[k] - T[i];
  return det;
}

std::vector<double> design_T(const DesignProblem& problem) {
  std::vector<double> T;
  for (double t : problem.times) T.push_back(std::exp(-2.0 * problem.gamma * t));
  return T;
}

MuSolution solve_mu(const DesignProblem& problem) {
  problem.validate();
  const auto T = design_T(problem);
  const Eigen::MatrixXd m = build_matrix(T);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rcond = lu.rcond();
  const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition <= 1e12)) {
    std::ostringstream why;
    why << "design matrix is numerically singular (estimated condition number " << condition
        << "); spread the times apart or lower gamma";
    throw Error(ErrorKind::Conditioning, why.str());
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.rows());
  const double c = problem.c.value_or(1.0);
  rhs(m.rows() - 1) = c;
  Eigen::VectorXd mu = lu.solve(rhs);
  double scale = 1.0;
  if (!problem.c) scale = 1.0 / mu.cwiseAbs().maxCoeff();
  MuSolution out;
  out.mu.resize(mu.size());
  for (Eigen::Index j = 0; j < mu.size(); ++j) out.mu[j] = mu(j) * scale;
  out.c = c * scale;
  out.condition = condition;
  return out;
}

double eval_Eapp(const std::vector<double>& mu, double gamma, double t) {
  double e = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    e += mu[j] * -std::expm1(-2.0 * gamma * static_cast<double>(j + 1) * t);
  }
  return e;
}

double eval_dEapp(const std::vector<double>& mu, double gamma, double t) {
  double e = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double rate = 2.0 * gamma * static_cast<double>(j + 1);
    e += mu[j] * rate * std::exp(-rate * t);
  }
  return e;
}

double geometric_factor(int dim, const Vec3& a) {
  const double n2 = norm2(a);
  if (dim == 2) return a[0] * a[1] / n2;
  return (a[0] - a[2]) * (a[1] - a[2]) / n2;
}

DesignSolution realize_phases(const DesignProblem& problem, const MuSolution& mu) {
  problem.validate();
  DesignSolution s;
  s.dimension = problem.dimension;
  s.gamma = problem.gamma;
  s.c = mu.c;
  s.epsilon = problem.resolved_epsilon();
  s.times = problem.times;
  s.T = design_T(problem);
  s.mu = mu.mu;
  s.matrix_det = det_closed(s.T);
  s.condition = mu.condition;
  const double pi = std::numbers::pi;
  for (std::size_t j = 0; j < mu.mu.size(); ++j) {
    const double radius = std::sqrt(problem.gamma * static_cast<double>(j + 1));
    const bool positive = mu.mu[j] >= 0.0;
    Vec3 alpha{};
    if (problem.dimension == 2) {
      const double theta = positive ? pi / 6.0 : -pi / 6.0;
      alpha = {radius * std::cos(theta), radius * std::sin(theta), 0.0};
    } else {
      const double theta = positive ? pi / 3.0 : pi / 6.0;
      alpha = {0.0, radius * std::cos(theta), radius * std::sin(theta)};
    }
    s.alphas.push_back(alpha);
    s.lambdas.push_back(mu.mu[j] == 0.0 ? 0.0 : std::sqrt(mu.mu[j] / geometric_factor(problem.dimension, alpha)));
  }
  return s;
}

DesignSolution solve_design(const DesignProblem& problem) { return realize_phases(problem, solve_mu(problem)); }

bool DesignReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const DesignCheck& c) { return c.passed; });
}

DesignReport verify_design(const DesignSolution& s) {
  DesignReport r;
  const double c = std::abs(s.c);
  const std::size_t n = s.times.size();
  auto add = [&r](std::string name, bool ok, std::string detail) { r.checks.push_back({std::move(name), ok, std::move(detail)}); };

  bool zeros = true;
  bool slopes = true;
  bool signs = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = s.times[i];
    r.residuals.push_back(eval_Eapp(s.mu, s.gamma, t));
    r.derivatives.push_back(eval_dEapp(s.mu, s.gamma, t));
    zeros = zeros && std::abs(r.residuals.back()) <= 1e-10 * c;
    slopes = slopes && r.derivatives.back() != 0.0;
    double gap = s.epsilon;
    if (i > 0) gap = std::min(gap, t - s.times[i - 1]);
    if (i + 1 < n) gap = std::min(gap, s.times[i + 1] - t);
    const double h = 0.5 * std::min(s.epsilon, gap / 4.0);
    const double lo = eval_Eapp(s.mu, s.gamma, t - h);
    const double hi = eval_Eapp(s.mu, s.gamma, t + h);
    r.sign_changes.push_back(lo * hi < 0.0);
    signs = signs && r.sign_changes.back();
  }
  r.derivative_t1 = n ? r.derivatives.front() : 0.0;
  add("Eapp(t_i) = 0", zeros, "max residual relative to |c| at most 1e-10");
  add("dEapp/dt(t_i) != 0", slopes, "");
  add("sign change across t_i", signs, "");

  const double expected = 2.0 * s.gamma * s.c;
  std::ostringstream d1;
  d1 << "dEapp/dt(t_1) = " << r.derivative_t1 << ", 2*gamma*c = " << expected;
  add("dEapp/dt(t_1) = 2 gamma c", std::abs(r.derivative_t1 - expected) <= 1e-10 * std::abs(expected), d1.str());

  bool norms = true;
  bool sign_match = true;
  bool recon = true;
  for (std::size_t j = 0; j < s.mu.size(); ++j) {
    const double target = s.gamma * static_cast<double>(j + 1);
    norms = norms && std::abs(norm2(s.alphas[j]) - target) <= 1e-12 * target;
    const double g = geometric_factor(s.dimension, s.alphas[j]);
    if (s.mu[j] != 0.0) sign_match = sign_match && (g > 0.0) == (s.mu[j] > 0.0);
    const double back = s.lambdas[j] * s.lambdas[j] * g;
    recon = recon && std::abs(back - s.mu[j]) <= 1e-12 * std::max(1.0, std::abs(s.mu[j]));
  }
  add("|alpha_j|^2 = gamma j", norms, "");
  add("sign(mu_j) matches geometric factor", sign_match, "");
  add("lambda_j^2 * factor reproduces mu_j", recon, "");

  if (!s.T.empty()) {
    const Eigen::MatrixXd m = build_matrix(s.T);
    Eigen::VectorXd mu(s.mu.size());
    for (std::size_t j = 0; j < s.mu.size(); ++j) mu(j) = s.mu[j];
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.rows());
    rhs(m.rows() - 1) = s.c;
    const double res = (m * mu - rhs).cwiseAbs().maxCoeff();
    std::ostringstream why;
    why << "max residual " << res;
    add("M mu = (0,...,0,c)", res <= 1e-10 * c, why.str());
  }
  return r;
}

DatumSpec datum_from_design(const DesignSolution& solution, double delta, double eta, const BumpProfile& profile) {
  DatumSpec spec;
  spec.dimension = solution.dimension;
  spec.delta = delta;
  spec.eta = eta;
  spec.profile = profile;
  for (std::size_t j = 0; j < solution.mu.size(); ++j) spec.terms.push_back({solution.lambdas[j], solution.alphas[j]});
  return spec;
}

}  // namespace concdiff
