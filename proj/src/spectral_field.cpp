#include "concdiff/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "concdiff/error.hpp"

namespace concdiff {

double GridSpec::dk() const { return 2.0 * std::numbers::pi / box_length; }

std::size_t GridSpec::mode_count() const {
  const std::size_t n = static_cast<std::size_t>(points);
  const std::size_t h = static_cast<std::size_t>(half_extent());
  return dimension == 2 ? n * h : n * n * h;
}

std::size_t GridSpec::physical_size() const {
  const std::size_t n = static_cast<std::size_t>(points);
  return dimension == 2 ? n * n : n * n * n;
}

SpectralField::SpectralField(const GridSpec& grid, double time) : grid_(grid), time_(time) {
  if (grid.dimension != 2 && grid.dimension != 3) throw Error(ErrorKind::Configuration, "dimension must be 2 or 3");
  if (grid.points < 4 || grid.points % 2 != 0) throw Error(ErrorKind::Configuration, "points per dimension must be even and >= 4");
  if (!(grid.box_length > 0.0)) throw Error(ErrorKind::Configuration, "box length must be positive");
  for (int c = 0; c < grid.dimension; ++c) comp_[c].assign(grid.mode_count(), Complex{});
}

std::array<int, 3> SpectralField::lattice(std::size_t idx) const {
  const int n = grid_.points;
  const int h = grid_.half_extent();
  auto wrap = [n](int i) { return i < n / 2 ? i : i - n; };
  if (grid_.dimension == 2) {
    const int i0 = static_cast<int>(idx / h);
    const int i1 = static_cast<int>(idx % h);
    return {wrap(i0), i1, 0};
  }
  const int i2 = static_cast<int>(idx % h);
  const std::size_t rest = idx / h;
  const int i1 = static_cast<int>(rest % n);
  const int i0 = static_cast<int>(rest / n);
  return {wrap(i0), wrap(i1), i2};
}

Vec3 SpectralField::wavevector(std::size_t idx) const {
  const auto m = lattice(idx);
  const double dk = grid_.dk();
  return {dk * m[0], dk * m[1], dk * m[2]};
}

std::size_t SpectralField::index(const std::array<int, 3>& m) const {
  const std::size_t n = static_cast<std::size_t>(grid_.points);
  const std::size_t h = static_cast<std::size_t>(grid_.half_extent());
  auto unwrap = [n](int v) { return static_cast<std::size_t>(v >= 0 ? v : v + static_cast<int>(n)); };
  if (grid_.dimension == 2) return unwrap(m[0]) * h + static_cast<std::size_t>(m[1]);
  return (unwrap(m[0]) * n + unwrap(m[1])) * h + static_cast<std::size_t>(m[2]);
}

Complex SpectralField::at(int comp, std::array<int, 3> m) const {
  const int n = grid_.points;
  const int d = grid_.dimension;
  auto wrap = [n](int v) {
    v %= n;
    if (v < -n / 2) v += n;
    if (v >= n / 2) v -= n;
    return v;
  };
  for (int i = 0; i < d; ++i) m[i] = wrap(m[i]);
  if (d == 2) m[2] = 0;
  const int last = d - 1;
  if (m[last] >= 0) return comp_[comp][index(m)];
  std::array<int, 3> neg{0, 0, 0};
  for (int i = 0; i < d; ++i) neg[i] = m[i] == -n / 2 ? m[i] : -m[i];
  if (neg[last] < 0) neg[last] = -neg[last];
  return std::conj(comp_[comp][index(neg)]);
}

double SpectralField::multiplicity(std::size_t idx) const {
  const int last = static_cast<int>(idx % static_cast<std::size_t>(grid_.half_extent()));
  return (last == 0 || last == grid_.points / 2) ? 1.0 : 2.0;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  axpy(1.0, o);
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  axpy(-1.0, o);
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (int c = 0; c < dimension(); ++c)
    for (auto& v : comp_[c]) v *= s;
  return *this;
}

void SpectralField::axpy(double s, const SpectralField& o) {
  if (!(o.grid_ == grid_)) throw Error(ErrorKind::GridMismatch, "fields live on different grids");
  for (int c = 0; c < dimension(); ++c) {
    auto* dst = comp_[c].data();
    const auto* src = o.comp_[c].data();
    const std::size_t n = comp_[c].size();
    for (std::size_t i = 0; i < n; ++i) dst[i] += s * src[i];
  }
}

void SpectralField::set_zero() {
  for (int c = 0; c < dimension(); ++c) std::fill(comp_[c].begin(), comp_[c].end(), Complex{});
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (int c = 0; c < dimension(); ++c)
    for (const auto& v : comp_[c]) m = std::max(m, std::abs(v));
  return m;
}

void check_resolution(const DatumSpec& spec, const GridSpec& grid) {
  std::ostringstream why;
  if (grid.dimension != spec.dimension) {
    throw Error(ErrorKind::Configuration, "grid dimension does not match datum dimension");
  }
  if (grid.dk() > spec.delta / 4.0) {
    why << "box_length: lattice spacing 2*pi/L = " << grid.dk() << " exceeds delta/4 = " << spec.delta / 4.0
        << " (increase L to at least " << 8.0 * std::numbers::pi / spec.delta << ")";
    throw Error(ErrorKind::UnderResolved, why.str());
  }
  double reach = 0.0;
  for (const auto& t : spec.terms) reach = std::max(reach, norm(t.alpha));
  reach += spec.delta + 2.0 * grid.dk();
  if (grid.max_wavenumber() < reach) {
    why << "points: Nyquist wavenumber " << grid.max_wavenumber() << " below required " << reach
        << " (max|alpha| + delta + margin)";
    throw Error(ErrorKind::UnderResolved, why.str());
  }
}

SpectralField assemble_spectral(const DatumSpec& spec, double box_length, int points) {
  const GridSpec grid{spec.dimension, box_length, points};
  check_resolution(spec, grid);
  SpectralField field(grid);
  const int d = spec.dimension;
  const int n = points;
  const double dk = grid.dk();
  const double volume = std::pow(box_length, d);

  std::vector<char> touched(grid.mode_count(), 0);
  std::vector<std::size_t> modes;
  for (const BumpBall& ball : bump_balls(spec)) {
    if (spec.terms[ball.term].lambda == 0.0) continue;
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};
    for (int i = 0; i < d; ++i) {
      lo[i] = static_cast<int>(std::ceil((ball.center[i] - spec.delta) / dk));
      hi[i] = static_cast<int>(std::floor((ball.center[i] + spec.delta) / dk));
      lo[i] = std::max(lo[i], -n / 2 + 1);
      hi[i] = std::min(hi[i], n / 2 - 1);
    }
    lo[d - 1] = std::max(lo[d - 1], 0);
    for (int a = lo[0]; a <= hi[0]; ++a) {
      for (int b = lo[1]; b <= hi[1]; ++b) {
        const int c_lo = d == 3 ? lo[2] : 0;
        const int c_hi = d == 3 ? hi[2] : 0;
        for (int c = c_lo; c <= c_hi; ++c) {
          const std::size_t idx = field.index({a, b, c});
          if (!touched[idx]) {
            touched[idx] = 1;
            modes.push_back(idx);
          }
        }
      }
    }
  }
  for (std::size_t idx : modes) {
    const CVec3 v = datum_hat(spec, field.wavevector(idx));
    for (int c = 0; c < d; ++c) field.component(c)[idx] = v[c] / volume;
  }
  return field;
}

double check_divergence_free(const SpectralField& field) {
  double num = 0.0;
  const int d = field.dimension();
  for (std::size_t idx = 0; idx < field.mode_count(); ++idx) {
    const Vec3 k = field.wavevector(idx);
    Complex div{};
    for (int c = 0; c < d; ++c) div += k[c] * field.component(c)[idx];
    num = std::max(num, std::abs(div));
  }
  const double den = field.max_abs();
  return den == 0.0 ? 0.0 : num / den;
}

double check_symmetry(const SpectralField& field) {
  const int d = field.dimension();
  const TildeMap tilde{d};
  double residual = 0.0;
  for (std::size_t idx = 0; idx < field.mode_count(); ++idx) {
    const auto m = field.lattice(idx);
    const auto mt = tilde(m);
    for (int c = 0; c < d; ++c) {
      const Complex lhs = field.component(tilde.next(c))[idx];
      const Complex rhs = field.at(c, mt);
      residual = std::max(residual, std::abs(lhs - rhs));
    }
  }
  return residual;
}

double symmetry_residual_relative(const SpectralField& field) {
  const double den = field.max_abs();
  return den == 0.0 ? 0.0 : check_symmetry(field) / den;
}

double conjugate_symmetry_residual(const SpectralField& field) {
  const int d = field.dimension();
  const int n = field.grid().points;
  double residual = 0.0;
  for (std::size_t idx = 0; idx < field.mode_count(); ++idx) {
    auto m = field.lattice(idx);
    if (m[d - 1] != 0 && m[d - 1] != n / 2) continue;
    std::array<int, 3> neg{0, 0, 0};
    for (int i = 0; i < d; ++i) neg[i] = m[i] == -n / 2 || m[i] == n / 2 ? m[i] : -m[i];
    const std::size_t j = field.index(neg);
    for (int c = 0; c < d; ++c) {
      residual = std::max(residual, std::abs(field.component(c)[j] - std::conj(field.component(c)[idx])));
    }
  }
  return residual;
}

double inner_product(const SpectralField& u, int a, const SpectralField& v, int b) {
  if (!(u.grid() == v.grid())) throw Error(ErrorKind::GridMismatch, "inner product across grids");
  const auto ua = u.component(a);
  const auto vb = v.component(b);
  double sum = 0.0;
  for (std::size_t idx = 0; idx < ua.size(); ++idx) {
    sum += u.multiplicity(idx) * (ua[idx].real() * vb[idx].real() + ua[idx].imag() * vb[idx].imag());
  }
  return sum * std::pow(u.grid().box_length, u.dimension());
}

Eigen::MatrixXd moment_density(const SpectralField& u) {
  const int d = u.dimension();
  Eigen::MatrixXd m(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) m(a, b) = m(b, a) = inner_product(u, a, u, b);
  return m;
}

double kinetic_energy(const SpectralField& u) {
  double e = 0.0;
  for (int c = 0; c < u.dimension(); ++c) e += inner_product(u, c, u, c);
  return 0.5 * e;
}

double l2_norm(const SpectralField& u) { return std::sqrt(2.0 * kinetic_energy(u)); }

namespace {
constexpr char kMagic[4] = {'C', 'D', 'S', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(ErrorKind::Io, "truncated field file");
  return v;
}
}  // namespace

void write_field(const std::filesystem::path& path, const SpectralField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, static_cast<std::int32_t>(field.dimension()));
  put(out, static_cast<std::int32_t>(field.grid().points));
  put(out, field.grid().box_length);
  put(out, field.time());
  put(out, static_cast<std::uint64_t>(field.mode_count()));
  for (int c = 0; c < field.dimension(); ++c) {
    const auto data = field.component(c);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

SpectralField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorKind::Io, path.string() + " is not a field file");
  if (get<std::uint32_t>(in) != kVersion) throw Error(ErrorKind::Io, "unsupported field file version");
  GridSpec grid;
  grid.dimension = get<std::int32_t>(in);
  grid.points = get<std::int32_t>(in);
  grid.box_length = get<double>(in);
  const double time = get<double>(in);
  const auto count = get<std::uint64_t>(in);
  SpectralField field(grid, time);
  if (count != field.mode_count()) throw Error(ErrorKind::Io, "mode count does not match header grid");
  for (int c = 0; c < grid.dimension; ++c) {
    auto data = field.component(c);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size_bytes()));
    if (!in) throw Error(ErrorKind::Io, "truncated field file");
  }
  return field;
}

}  // namespace concdiff
