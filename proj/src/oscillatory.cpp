#include "concdiff/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "concdiff/error.hpp"
#include "concdiff/quadrature.hpp"

namespace concdiff {

namespace {

constexpr double kE = std::numbers::e;
constexpr int kRadialOrder = 10;
constexpr int kCubeOrder = 8;

double plain_profile(double r) {
  const double q = kE + r * r;
  const double l = std::log(q);
  return 2.0 / (q * l * l);
}

// (κ cosh κ − sinh κ)/κ³ for κ < 1.
double phi_small(double kappa) {
  const double k2 = kappa * kappa;
  double term = 1.0 / 3.0;  // m = 1: 2m/(2m+1)!
  double sum = term;
  for (int m = 2; m < 20; ++m) {
    // ratio of consecutive coefficients 2m/(2m+1)! over 2(m−1)/(2m−1)!
    term *= k2 * m / ((m - 1.0) * 2.0 * m * (2.0 * m + 1.0));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Mass of the d-dimensional heat kernel N(0, 2t·I) outside radius R (d = 3 or 5).
double tail_mass(int d, double t, double R) {
  const double x = R / std::sqrt(2.0 * t);
  const double g = std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * x * x);
  const double erfc_part = std::erfc(x / std::numbers::sqrt2);
  if (d == 3) return erfc_part + g * x;
  return erfc_part + g * (x + x * x * x / 3.0);
}

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::Domain, "heat evaluation needs t > 0");
}

const QuadratureRule& unit_rule(int order) {
  static const QuadratureRule r10 = gauss_legendre(kRadialOrder, 0.0, 1.0);
  static const QuadratureRule r8 = gauss_legendre(kCubeOrder, 0.0, 1.0);
  return order == kRadialOrder ? r10 : r8;
}

}  // namespace

std::string_view to_string(KatoKind kind) { return kind == KatoKind::Plain ? "plain" : "modulated"; }

KatoKind parse_kato_kind(std::string_view name) {
  if (name == "plain") return KatoKind::Plain;
  if (name == "modulated") return KatoKind::Modulated;
  throw Error(ErrorKind::Configuration, "unknown Kato datum kind '" + std::string(name) + "'");
}

double kato_radial_profile(KatoKind kind, double r) {
  const double h = plain_profile(r);
  return kind == KatoKind::Plain ? h : h * std::sin(r * r);
}

Vec3 kato_datum(KatoKind kind, double eta, const Vec3& x) {
  const double h = eta * kato_radial_profile(kind, norm(x));
  return {x[1] * h, -x[0] * h, 0.0};
}

PointDatum kato_point_datum(KatoKind kind, double eta) {
  return {[kind, eta](const Vec3& y) { return kato_datum(kind, eta, y); }, kind == KatoKind::Modulated ? 1.0 : 0.0};
}

double default_heat_radius(double t) { return 12.0 * std::sqrt(t); }

double heat_tail_mass(double t, double R) {
  check_time(t);
  return tail_mass(3, t, R);
}

Vec3 heat_point(const PointDatum& datum, const Vec3& x, double t, double R, int n) {
  check_time(t);
  if (!(R >= 8.0 * std::sqrt(t) * (1.0 - 1e-12))) {
    throw Error(ErrorKind::Domain, "truncation radius must be at least 8 sqrt(t)");
  }
  if (n < 1) throw Error(ErrorKind::Configuration, "quadrature needs at least one node per axis");
  const int panels = (n + kCubeOrder - 1) / kCubeOrder;
  const int m = panels * kCubeOrder;
  if (datum.chirp > 0.0) {
    const double r = norm(x);
    if (r > 0.0) {
      const double wavelength = std::numbers::pi / (datum.chirp * r);
      const double per_wavelength = m * wavelength / (2.0 * R);
      if (per_wavelength < 4.0) {
        throw Error(ErrorKind::UnderResolved, "heat_point: " + std::to_string(m) + " nodes per axis give " +
                                                  std::to_string(per_wavelength) +
                                                  " nodes per oscillation wavelength at |x| = " + std::to_string(r) +
                                                  " (need 4)");
      }
    }
  }
  const QuadratureRule& base = unit_rule(kCubeOrder);
  std::vector<double> off(m);
  std::vector<double> w(m);
  const double h = 2.0 * R / panels;
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < kCubeOrder; ++i) {
      const double y = -R + h * (p + base.nodes[i]);
      off[p * kCubeOrder + i] = y;
      w[p * kCubeOrder + i] = h * base.weights[i] * std::exp(-y * y / (4.0 * t));
    }
  }
  Vec3 sum{0.0, 0.0, 0.0};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double wij = w[i] * w[j];
      Vec3 line{0.0, 0.0, 0.0};
      for (int k = 0; k < m; ++k) {
        const Vec3 a = datum.field({x[0] + off[i], x[1] + off[j], x[2] + off[k]});
        for (int c = 0; c < 3; ++c) line[c] += w[k] * a[c];
      }
      for (int c = 0; c < 3; ++c) sum[c] += wij * line[c];
    }
  }
  const double norm_const = std::pow(4.0 * std::numbers::pi * t, -1.5);
  return norm_const * sum;
}

Vec3 heat_point(KatoKind kind, double eta, const Vec3& x, double t, int n) {
  return heat_point(kato_point_datum(kind, eta), x, t, default_heat_radius(t), n);
}

RadialValue kato_heat_radial(KatoKind kind, double r, double t, bool minus_datum, double R) {
  check_time(t);
  if (!(r >= 0.0)) throw Error(ErrorKind::Domain, "radius must be nonnegative");
  if (R <= 0.0) R = default_heat_radius(t);
  if (!(R >= 8.0 * std::sqrt(t) * (1.0 - 1e-12))) {
    throw Error(ErrorKind::Domain, "truncation radius must be at least 8 sqrt(t)");
  }
  const double lo = std::max(0.0, r - R);
  const double hi = r + R;
  double width = 0.5 * std::sqrt(t);
  if (kind == KatoKind::Modulated) width = std::min(width, 0.5 * std::numbers::pi / hi);
  const auto panels = static_cast<long>(std::ceil((hi - lo) / width));
  const double h = (hi - lo) / static_cast<double>(panels);
  const QuadratureRule& base = unit_rule(kRadialOrder);

  const double pref = 4.0 * std::numbers::pi * std::numbers::pi * std::pow(4.0 * std::numbers::pi * t, -2.5);
  const double shift = minus_datum ? kato_radial_profile(kind, r) : 0.0;
  const double inv4t = 1.0 / (4.0 * t);
  double sum = 0.0;
  double abs_sum = 0.0;
  for (long p = 0; p < panels; ++p) {
    const double a = lo + h * static_cast<double>(p);
    for (int i = 0; i < kRadialOrder; ++i) {
      const double s = a + h * base.nodes[i];
      const double kappa = r * s / (2.0 * t);
      const double s4 = s * s * s * s;
      double kern;
      if (kappa < 1.0) {
        kern = 2.0 * pref * s4 * std::exp(-(r * r + s * s) * inv4t) * phi_small(kappa);
      } else {
        const double dm = r - s;
        const double dp = r + s;
        kern = pref * s4 / (kappa * kappa * kappa) *
               ((kappa - 1.0) * std::exp(-dm * dm * inv4t) + (kappa + 1.0) * std::exp(-dp * dp * inv4t));
      }
      const double term = h * base.weights[i] * kern * (kato_radial_profile(kind, s) - shift);
      sum += term;
      // Rounding of s² shifts the phase of sin(s²) by up to ~s²ε.
      abs_sum += std::abs(term) * (kind == KatoKind::Modulated ? 64.0 + 2.0 * s * s : 64.0);
    }
  }
  RadialValue out;
  out.value = sum;
  const double eps = std::numeric_limits<double>::epsilon();
  out.noise_floor = eps * abs_sum + tail_mass(5, t, R) * plain_profile(std::max(0.0, r - 2.0 * R)) +
                    tail_mass(5, t, 2.0 * R) * plain_profile(0.0);
  return out;
}

Vec3 kato_heat(KatoKind kind, double eta, const Vec3& x, double t) {
  const double H = eta * kato_heat_radial(kind, norm(x), t).value;
  return {x[1] * H, -x[0] * H, 0.0};
}

namespace {

KatoDecay measure(KatoKind kind, double eta, double t, const Vec3& omega, const std::vector<double>& radii,
                  bool difference) {
  if (std::abs(norm(omega) - 1.0) > 1e-12) throw Error(ErrorKind::Domain, "ray direction must be a unit vector");
  KatoDecay out;
  out.kind = kind;
  out.t = t;
  out.direction = omega;
  out.difference = difference;
  const double rho_unit = std::hypot(omega[0], omega[1]);
  std::vector<double> mags;
  for (double r : radii) {
    const RadialValue v = kato_heat_radial(kind, r, t, difference);
    KatoSample s;
    s.r = r;
    const double scale = std::abs(eta) * rho_unit * r;
    s.magnitude = scale * std::abs(v.value);
    s.noise_floor = scale * v.noise_floor;
    s.above_floor = s.magnitude > s.noise_floor;
    mags.push_back(s.above_floor ? s.magnitude : 0.0);
    out.samples.push_back(s);
  }
  const auto usable = std::count_if(mags.begin(), mags.end(), [](double m) { return m > 0.0; });
  if (usable >= 2) {
    out.fit = fit_power_law(radii, mags);
    out.fitted = true;
  } else {
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (mags[i] == 0.0) out.fit.excluded.push_back(radii[i]);
    }
  }
  return out;
}

}  // namespace

KatoDecay measure_heat_decay(KatoKind kind, double eta, double t, const Vec3& omega,
                             const std::vector<double>& radii) {
  return measure(kind, eta, t, omega, radii, false);
}

KatoDecay measure_difference_decay(KatoKind kind, double eta, double t, const Vec3& omega,
                                   const std::vector<double>& radii) {
  return measure(kind, eta, t, omega, radii, true);
}

LqTrend lq_trend(KatoKind kind, double eta, double t, double q, const std::vector<double>& radii) {
  check_time(t);
  if (!(q >= 1.0 && q < 3.0)) throw Error(ErrorKind::Domain, "lq_trend needs 1 <= q < 3");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > (i == 0 ? 0.0 : radii[i - 1]))) {
      throw Error(ErrorKind::Domain, "partial-norm radii must be positive and increasing");
    }
  }
  LqTrend out;
  out.kind = kind;
  out.t = t;
  out.q = q;
  const double angular = 2.0 * std::pow(std::numbers::pi, 1.5) * std::tgamma(0.5 * q + 1.0) / std::tgamma(0.5 * q + 1.5);
  const double amp = std::pow(std::abs(eta), q) * angular;
  const QuadratureRule& base = unit_rule(kCubeOrder);
  double total = 0.0;
  double prev_r = 0.0;
  for (double R : radii) {
    double shell = 0.0;
    if (eta != 0.0) {
      double a = prev_r;
      while (a < R) {
        // Panels grow with r: the integrand varies on the scale max(√t, r).
        const double b = std::min(R, a + 0.5 * std::sqrt(t) + 0.05 * a);
        for (int i = 0; i < kCubeOrder; ++i) {
          const double r = a + (b - a) * base.nodes[i];
          const RadialValue v = kato_heat_radial(kind, r, t);
          const double H = std::abs(v.value) > v.noise_floor ? std::abs(v.value) : 0.0;
          shell += (b - a) * base.weights[i] * std::pow(r, 2.0 + q) * std::pow(H, q);
        }
        a = b;
      }
    }
    total += amp * shell;
    out.rows.push_back({R, total, amp * shell});
    prev_r = R;
  }
  if (!out.rows.empty() && out.rows.back().partial > 0.0) {
    out.last_increment_ratio = out.rows.back().increment / out.rows.back().partial;
  }
  return out;
}

}  // namespace concdiff
