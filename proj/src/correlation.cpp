#include "concdiff/correlation.hpp"

#include <algorithm>
#include <cmath>

#include "concdiff/error.hpp"
#include "concdiff/quadrature.hpp"

namespace concdiff {

namespace {

double symbol_G(int d, const Vec3& xi) {
  if (d == 2) return xi[0] * xi[1];
  return (xi[0] - xi[2]) * (xi[1] - xi[2]);
}

// (1 − e^{−2t k2}) / (2 k2), continuous at k2 = 0.
double time_factor(double t, double k2) {
  if (k2 == 0.0) return t;
  return -std::expm1(-2.0 * t * k2) / (2.0 * k2);
}

void check_quad(int n) {
  if (n < ClosedFormCorrelation::kMinQuadPoints) {
    throw Error(ErrorKind::UnderResolved, "quad_points: at least 8 Gauss-Legendre points per axis are required");
  }
}

void check_time(double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::Domain, "E(a)(t) requires t >= 0");
}

}  // namespace

ClosedFormCorrelation::ClosedFormCorrelation(const DatumSpec& spec, int quad_points) {
  check_quad(quad_points);
  const int d = spec.dimension;
  const double scale = spec.eta * spec.eta * plancherel_factor(d);
  for_each_ball_node(spec, quad_points, [&](const Vec3& xi, const BumpBall&, double bump, double w) {
    k2_.push_back(norm2(xi));
    weight_.push_back(w * scale * symbol_G(d, xi) * bump * psi_hat_total(spec, xi));
  });
}

double ClosedFormCorrelation::operator()(double t) const {
  check_time(t);
  double sum = 0.0;
  for (std::size_t i = 0; i < k2_.size(); ++i) sum += weight_[i] * time_factor(t, k2_[i]);
  return sum;
}

double ClosedFormCorrelation::derivative(double t) const {
  check_time(t);
  double sum = 0.0;
  for (std::size_t i = 0; i < k2_.size(); ++i) sum += weight_[i] * std::exp(-2.0 * t * k2_[i]);
  return sum;
}

double eval_E_closed(const DatumSpec& spec, double t, int quad_points) {
  return ClosedFormCorrelation(spec, quad_points)(t);
}

double eval_E_reduced(const DatumSpec& spec, double t, int quad_points) {
  check_quad(quad_points);
  check_time(t);
  validate(spec);
  const int d = spec.dimension;
  const QuadratureRule unit = gauss_legendre(quad_points, -1.0, 1.0);
  const double h = spec.delta;
  const int n3 = d == 3 ? quad_points : 1;
  double total = 0.0;
  for (const auto& term : spec.terms) {
    if (term.lambda == 0.0) continue;
    double sum = 0.0;
    for (int i = 0; i < quad_points; ++i) {
      for (int j = 0; j < quad_points; ++j) {
        for (int l = 0; l < n3; ++l) {
          const Vec3 z{h * unit.nodes[i], h * unit.nodes[j], d == 3 ? h * unit.nodes[l] : 0.0};
          const double p = dilated_profile(spec, z);
          if (p == 0.0) continue;
          double w = unit.weights[i] * unit.weights[j] * h * h;
          if (d == 3) w *= unit.weights[l] * h;
          const Vec3 xi = term.alpha + z;
          const double k2 = norm2(xi);
          const double geo = d == 2 ? 2.0 * xi[0] * xi[1]
                                    : k2 - xi[0] * xi[1] - xi[1] * xi[2] - xi[2] * xi[0];
          sum += w * -std::expm1(-2.0 * t * k2) * geo / k2 * p * p;
        }
      }
    }
    total += term.lambda * term.lambda * sum;
  }
  return total * spec.eta * spec.eta * plancherel_factor(d);
}

double eval_E_cone_2d(const DatumSpec& spec, double t, int quad_points) {
  check_quad(quad_points);
  check_time(t);
  if (spec.dimension != 2) throw Error(ErrorKind::Configuration, "the cone form is two-dimensional");
  const double v = integrate_over_balls(spec, quad_points, [&](const Vec3& xi, const BumpBall&, double bump) {
    if (!(xi[0] >= std::abs(xi[1]))) return 0.0;
    const double k2 = norm2(xi);
    return -std::expm1(-2.0 * t * k2) * xi[0] * xi[1] / k2 * bump * psi_hat_total(spec, xi);
  });
  return 2.0 * v * spec.eta * spec.eta * plancherel_factor(2);
}

double eval_E_limit(const DatumSpec& spec, double t) {
  check_time(t);
  double sum = 0.0;
  for (const auto& term : spec.terms) {
    const Vec3& a = term.alpha;
    const double n2 = norm2(a);
    const double g = spec.dimension == 2 ? a[0] * a[1] / n2
                                         : (n2 - a[0] * a[1] - a[1] * a[2] - a[2] * a[0]) / (3.0 * n2);
    sum += term.lambda * term.lambda * -std::expm1(-2.0 * t * n2) * g;
  }
  return sum * spec.eta * spec.eta * plancherel_factor(spec.dimension);
}

std::vector<double> eval_E_oracle(const DatumSpec& spec, const std::vector<double>& times,
                                  const OracleOptions& options) {
  if (options.time_steps < 2) throw Error(ErrorKind::Configuration, "oracle needs at least 2 time steps");
  for (double t : times) check_time(t);
  const SpectralField field = assemble_spectral(spec, options.box_length, options.points);
  // Only modes inside the bump balls carry data.
  std::vector<double> k2;
  std::vector<Complex> c0;
  std::vector<Complex> c1;
  std::vector<double> mult;
  for (std::size_t i = 0; i < field.mode_count(); ++i) {
    const Complex a = field.component(0)[i];
    const Complex b = field.component(1)[i];
    if (a == 0.0 && b == 0.0) continue;
    k2.push_back(norm2(field.wavevector(i)));
    c0.push_back(a);
    c1.push_back(b);
    mult.push_back(field.multiplicity(i));
  }
  const double volume = std::pow(options.box_length, spec.dimension);
  std::vector<double> out;
  for (double t : times) {
    const int m = options.time_steps;
    const double h = t / m;
    const std::vector<double> w = simpson_weights(m, h);
    double integral = 0.0;
    for (int s = 0; s <= m; ++s) {
      if (w[s] == 0.0) continue;
      const double time = s * h;
      double plancherel = 0.0;
      for (std::size_t i = 0; i < k2.size(); ++i) {
        const double heat = std::exp(-time * k2[i]);
        const Complex u = heat * c0[i];
        const Complex v = heat * c1[i];
        plancherel += mult[i] * (u.real() * v.real() + u.imag() * v.imag());
      }
      integral += w[s] * plancherel * volume;
    }
    out.push_back(-integral);
  }
  return out;
}

double eval_E_oracle(const DatumSpec& spec, double t, const OracleOptions& options) {
  return eval_E_oracle(spec, std::vector<double>{t}, options).front();
}

double eval_E_lattice(const SpectralField& field, double t) {
  check_time(t);
  const auto a = field.component(0);
  const auto b = field.component(1);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double re = a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    if (re == 0.0) continue;
    sum += field.multiplicity(i) * re * time_factor(t, norm2(field.wavevector(i)));
  }
  return -sum * std::pow(field.grid().box_length, field.dimension());
}

std::vector<double> eval_E_lattice_trapezoid(const SpectralField& field, const std::vector<double>& times) {
  if (times.empty()) return {};
  if (times.front() != 0.0) throw Error(ErrorKind::Domain, "trapezoid correlation must start at t = 0");
  const auto a = field.component(0);
  const auto b = field.component(1);
  std::vector<double> weight;
  std::vector<double> k2;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double re = a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    if (re == 0.0) continue;
    weight.push_back(field.multiplicity(i) * re);
    k2.push_back(norm2(field.wavevector(i)));
  }
  const double volume = std::pow(field.grid().box_length, field.dimension());
  auto density = [&](double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) sum += weight[i] * std::exp(-2.0 * s * k2[i]);
    return sum * volume;
  };
  std::vector<double> out{0.0};
  double prev = density(0.0);
  double acc = 0.0;
  for (std::size_t n = 1; n < times.size(); ++n) {
    const double h = times[n] - times[n - 1];
    if (!(h > 0.0)) throw Error(ErrorKind::Domain, "trapezoid nodes must be increasing");
    const double cur = density(times[n]);
    acc += 0.5 * h * (prev + cur);
    prev = cur;
    out.push_back(-acc);
  }
  return out;
}

CorrelationCurve sample_curve(const std::function<double(double)>& f, const std::vector<double>& times,
                              std::string method) {
  CorrelationCurve c;
  c.times = times;
  c.method = std::move(method);
  for (double t : times) c.values.push_back(f(t));
  return c;
}

std::vector<SignChange> find_sign_changes(const std::function<double(double)>& f, double a, double b,
                                          double tolerance, int samples) {
  if (!(b > a)) throw Error(ErrorKind::Configuration, "sign-change interval must have b > a");
  if (samples < 1) throw Error(ErrorKind::Configuration, "sample count must be positive");
  if (!(tolerance > 0.0)) throw Error(ErrorKind::Configuration, "bisection tolerance must be positive");
  std::vector<double> x(samples + 1);
  std::vector<double> y(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    x[i] = i == samples ? b : a + (b - a) * i / samples;
    y[i] = f(x[i]);
  }
  std::vector<SignChange> out;
  for (int i = 0; i < samples; ++i) {
    int j = i + 1;
    // A sample landing exactly on a zero: bracket across it.
    if (y[j] == 0.0 && j < samples) ++j;
    if (!(y[i] * y[j] < 0.0)) continue;
    SignChange s{x[i], x[j], y[i], y[j]};
    while (s.t_hi - s.t_lo > tolerance) {
      const double mid = 0.5 * (s.t_lo + s.t_hi);
      if (mid <= s.t_lo || mid >= s.t_hi) break;
      const double fm = f(mid);
      if (fm == 0.0) {
        // Sample hit the root: shrink to a tolerance-wide bracket around it,
        // falling back to a degenerate one if the sides do not differ in sign.
        const double lo = std::max(s.t_lo, mid - 0.45 * tolerance);
        const double hi = std::min(s.t_hi, mid + 0.45 * tolerance);
        const double flo = f(lo);
        const double fhi = f(hi);
        s = flo * fhi < 0.0 ? SignChange{lo, hi, flo, fhi} : SignChange{mid, mid, 0.0, 0.0};
        break;
      }
      if ((fm < 0.0) == (s.f_lo < 0.0)) {
        s.t_lo = mid;
        s.f_lo = fm;
      } else {
        s.t_hi = mid;
        s.f_hi = fm;
      }
    }
    out.push_back(s);
    i = j - 1;
  }
  return out;
}

std::vector<DeltaSweepRow> delta_sweep(const DesignSolution& design, const std::vector<double>& deltas,
                                       const std::vector<double>& times, const BumpProfile& profile,
                                       int quad_points) {
  std::vector<DeltaSweepRow> rows;
  const double scale = 1.0 / plancherel_factor(design.dimension);
  for (double delta : deltas) {
    DeltaSweepRow row;
    row.delta = delta;
    const DatumSpec spec = datum_from_design(design, delta, 1.0, profile);
    const auto violation = admissibility_violation(spec);
    row.admissible = !violation.has_value();
    if (violation) row.reason = *violation;
    const ClosedFormCorrelation E(spec, quad_points);
    for (double t : times) {
      row.deviation = std::max(row.deviation, std::abs(scale * E(t) - eval_Eapp(design.mu, design.gamma, t)));
    }
    for (double ti : design.times) {
      const double lo = std::max(0.0, ti - design.epsilon);
      const auto changes = find_sign_changes([&](double t) { return E(t); }, lo, ti + design.epsilon, 1e-10 * ti);
      row.crossings.push_back(static_cast<int>(changes.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace concdiff
