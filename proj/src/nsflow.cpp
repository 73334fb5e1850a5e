#include "concdiff/nsflow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "concdiff/correlation.hpp"
#include "concdiff/error.hpp"
#include "concdiff/quadrature.hpp"

namespace concdiff {

namespace {

void multiply(SpectralField& f, const std::vector<double>& factor) {
  for (int c = 0; c < f.dimension(); ++c) {
    auto data = f.component(c);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= factor[i];
  }
}

std::vector<double> heat_factors(const SpectralField& f, double t) {
  std::vector<double> out(f.mode_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(-t * norm2(f.wavevector(i)));
  return out;
}

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw Error(ErrorKind::GridMismatch, "fields live on different grids");
}

StepRecord record(const SpectralField& u) {
  StepRecord r;
  r.time = u.time();
  r.energy = kinetic_energy(u);
  r.divergence = check_divergence_free(u);
  r.symmetry = symmetry_residual_relative(u);
  r.moments = moment_density(u);
  return r;
}

}  // namespace

void apply_heat(SpectralField& f, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::Domain, "heat semigroup requires t >= 0");
  if (t == 0.0) return;
  multiply(f, heat_factors(f, t));
  f.set_time(f.time() + t);
}

SpectralField heat(const SpectralField& f, double t) {
  SpectralField out = f;
  apply_heat(out, t);
  return out;
}

void apply_leray(SpectralField& f) {
  const int d = f.dimension();
  for (std::size_t i = 0; i < f.mode_count(); ++i) {
    const Vec3 k = f.wavevector(i);
    const double k2 = norm2(k);
    if (k2 == 0.0) continue;
    Complex dot = 0.0;
    for (int c = 0; c < d; ++c) dot += k[c] * f.component(c)[i];
    if (dot == 0.0) continue;
    for (int c = 0; c < d; ++c) f.component(c)[i] -= k[c] * dot / k2;
  }
}

SpectralField leray_project(const SpectralField& f) {
  SpectralField out = f;
  apply_leray(out);
  return out;
}

bool in_dealias_band(const GridSpec& grid, const std::array<int, 3>& m) {
  const int cut = grid.dealias_cutoff();
  for (int i = 0; i < grid.dimension; ++i)
    if (std::abs(m[i]) > cut) return false;
  return true;
}

NonlinearOperator::NonlinearOperator(const GridSpec& grid) : grid_(grid), transform_(grid) {
  const SpectralField probe(grid);
  const std::size_t modes = grid.mode_count();
  band_.resize(modes);
  k2_.resize(modes);
  for (int c = 0; c < 3; ++c) k_[c].resize(modes);
  for (std::size_t i = 0; i < modes; ++i) {
    band_[i] = in_dealias_band(grid, probe.lattice(i)) ? 1 : 0;
    const Vec3 k = probe.wavevector(i);
    for (int c = 0; c < 3; ++c) k_[c][i] = k[c];
    k2_[i] = norm2(k);
  }
  for (int c = 0; c < grid.dimension; ++c) {
    pu_[c].resize(grid.physical_size());
    pv_[c].resize(grid.physical_size());
  }
  product_.resize(grid.physical_size());
  scratch_.resize(modes);
}

void NonlinearOperator::load_physical(const SpectralField& f, std::array<std::vector<double>, 3>& dst) {
  for (int c = 0; c < grid_.dimension; ++c) {
    const auto src = f.component(c);
    for (std::size_t i = 0; i < src.size(); ++i) scratch_[i] = band_[i] ? src[i] : Complex{};
    transform_.to_physical(scratch_, dst[c]);
  }
}

void NonlinearOperator::apply(const SpectralField& u, SpectralField& out) { apply_impl(u, nullptr, out); }

void NonlinearOperator::apply(const SpectralField& u, const SpectralField& v, SpectralField& out) {
  apply_impl(u, &v, out);
}

SpectralField NonlinearOperator::operator()(const SpectralField& u) {
  SpectralField out(grid_, u.time());
  apply(u, out);
  return out;
}

void NonlinearOperator::apply_impl(const SpectralField& u, const SpectralField* v, SpectralField& out) {
  if (!(u.grid() == grid_) || (v && !(v->grid() == grid_))) {
    throw Error(ErrorKind::GridMismatch, "nonlinear operator applied on a different grid");
  }
  if (!(out.grid() == grid_)) out = SpectralField(grid_);
  out.set_zero();
  out.set_time(u.time());
  const int d = grid_.dimension;
  load_physical(u, pu_);
  if (v) load_physical(*v, pv_);
  const std::size_t np = product_.size();
  const std::size_t modes = scratch_.size();
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      if (v) {
        for (std::size_t x = 0; x < np; ++x) product_[x] = 0.5 * (pu_[i][x] * pv_[j][x] + pv_[i][x] * pu_[j][x]);
      } else {
        for (std::size_t x = 0; x < np; ++x) product_[x] = pu_[i][x] * pu_[j][x];
      }
      transform_.to_spectral(product_, scratch_);
      auto oi = out.component(i);
      auto oj = out.component(j);
      for (std::size_t m = 0; m < modes; ++m) {
        if (!band_[m]) continue;
        const Complex s = scratch_[m];
        oi[m] += Complex(-k_[j][m] * s.imag(), k_[j][m] * s.real());
        if (i != j) oj[m] += Complex(-k_[i][m] * s.imag(), k_[i][m] * s.real());
      }
    }
  }
  for (std::size_t m = 0; m < modes; ++m) {
    if (!band_[m] || k2_[m] == 0.0) continue;
    Complex dot = 0.0;
    for (int c = 0; c < d; ++c) dot += k_[c][m] * out.component(c)[m];
    const Complex q = dot / k2_[m];
    for (int c = 0; c < d; ++c) out.component(c)[m] -= k_[c][m] * q;
  }
}

SpectralField nonlinear_term(const SpectralField& u) {
  NonlinearOperator op(u.grid());
  return op(u);
}

double default_dt(const GridSpec& grid, double t_ref) {
  const double dx = grid.box_length / grid.points;
  double dt = 0.25 * dx * dx;
  if (t_ref > 0.0) dt = std::min(dt, t_ref / 64.0);
  return dt;
}

FlowStepper::FlowStepper(const GridSpec& grid, double dt)
    : grid_(grid), dt_(dt), nonlinear_(grid), k1_(grid), k2_(grid), k3_(grid), k4_(grid), tmp_(grid), base_(grid) {
  if (!(dt > 0.0)) throw Error(ErrorKind::Configuration, "dt must be positive");
  e_full_.resize(grid.mode_count());
  e_half_.resize(grid.mode_count());
  const auto& k2 = nonlinear_.k2();
  for (std::size_t i = 0; i < k2.size(); ++i) {
    e_full_[i] = std::exp(-dt * k2[i]);
    e_half_[i] = std::exp(-0.5 * dt * k2[i]);
  }
}

void FlowStepper::step(SpectralField& u) { step_with(u, dt_, e_full_, e_half_); }

void FlowStepper::step(SpectralField& u, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::Configuration, "step size must be positive");
  const auto& k2 = nonlinear_.k2();
  std::vector<double> full(k2.size());
  std::vector<double> half(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) {
    full[i] = std::exp(-h * k2[i]);
    half[i] = std::exp(-0.5 * h * k2[i]);
  }
  step_with(u, h, full, half);
}

void FlowStepper::step_with(SpectralField& u, double h, const std::vector<double>& full,
                            const std::vector<double>& half) {
  const double t0 = u.time();
  base_ = u;

  nonlinear_.apply(base_, k1_);
  k1_ *= -1.0;

  tmp_ = base_;
  tmp_.axpy(0.5 * h, k1_);
  multiply(tmp_, half);
  nonlinear_.apply(tmp_, k2_);
  k2_ *= -1.0;

  tmp_ = base_;
  multiply(tmp_, half);
  tmp_.axpy(0.5 * h, k2_);
  nonlinear_.apply(tmp_, k3_);
  k3_ *= -1.0;

  multiply(k3_, half);
  tmp_ = base_;
  multiply(tmp_, full);
  tmp_.axpy(h, k3_);
  nonlinear_.apply(tmp_, k4_);
  k4_ *= -1.0;

  u = base_;
  multiply(u, full);
  multiply(k1_, full);
  multiply(k2_, half);
  u.axpy(h / 6.0, k1_);
  u.axpy(h / 3.0, k2_);
  u.axpy(h / 3.0, k3_);
  u.axpy(h / 6.0, k4_);
  u.set_time(t0 + h);
}

double FlowTrajectory::max_divergence() const {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, s.divergence);
  return m;
}

double FlowTrajectory::max_symmetry() const {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, s.symmetry);
  return m;
}

double FlowTrajectory::max_energy_increase() const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < steps.size(); ++n) {
    const double e0 = steps[n - 1].energy;
    if (e0 > 0.0) m = std::max(m, (steps[n].energy - e0) / e0);
  }
  return steps.size() > 1 ? m : 0.0;
}

double FlowTrajectory::max_diagonal_spread() const {
  double m = 0.0;
  for (const auto& s : steps) {
    const double ref = s.moments(0, 0);
    if (ref == 0.0) continue;
    for (Eigen::Index i = 1; i < s.moments.rows(); ++i) m = std::max(m, std::abs(s.moments(i, i) - ref) / std::abs(ref));
  }
  return m;
}

void require_in_band(const SpectralField& u0) {
  for (std::size_t i = 0; i < u0.mode_count(); ++i) {
    bool nonzero = false;
    for (int c = 0; c < u0.dimension(); ++c) nonzero = nonzero || u0.component(c)[i] != 0.0;
    if (nonzero && !in_dealias_band(u0.grid(), u0.lattice(i))) {
      throw Error(ErrorKind::UnderResolved,
                  "points: the datum extends beyond the 2/3-rule band; increase N or reduce max|alpha|");
    }
  }
}

FlowTrajectory simulate(const DatumSpec& spec, const SimulationOptions& options) {
  const SpectralField u0 = assemble_spectral(spec, options.box_length, options.points);
  require_in_band(u0);
  return simulate_field(u0, options);
}

FlowTrajectory simulate_field(const SpectralField& u0, const SimulationOptions& options) {
  if (!(options.t_end >= 0.0)) throw Error(ErrorKind::Configuration, "t_end must be nonnegative");
  if (options.snapshot_stride < 0) throw Error(ErrorKind::Configuration, "snapshot stride must be nonnegative");
  FlowTrajectory traj;
  traj.grid = u0.grid();
  traj.dt = options.dt.value_or(default_dt(traj.grid, 0.5 * options.t_end));
  if (!(traj.dt > 0.0)) throw Error(ErrorKind::Configuration, "dt must be positive");

  SpectralField u = u0;
  u.set_time(0.0);
  traj.steps.push_back(record(u));
  traj.snapshots.push_back(u);
  traj.snapshot_steps.push_back(0);
  const double norm0 = l2_norm(u);
  if (options.t_end == 0.0) return traj;

  FlowStepper stepper(traj.grid, traj.dt);
  const auto n_steps = static_cast<std::size_t>(std::ceil(options.t_end / traj.dt - 1e-9));
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const double remaining = options.t_end - u.time();
    if (n == n_steps && remaining < traj.dt * (1.0 - 1e-12)) {
      stepper.step(u, remaining);
    } else {
      stepper.step(u);
    }
    if (n == n_steps) u.set_time(options.t_end);
    traj.steps.push_back(record(u));
    const double nrm = l2_norm(u);
    if (!std::isfinite(nrm) || (norm0 > 0.0 && nrm > options.blowup_factor * norm0)) {
      std::ostringstream why;
      why << "L2 norm grew from " << norm0 << " to " << nrm << " by t = " << u.time()
          << "; reduce eta or dt";
      throw Error(ErrorKind::Divergence, why.str());
    }
    const bool stride_hit = options.snapshot_stride > 0 && n % static_cast<std::size_t>(options.snapshot_stride) == 0;
    if (stride_hit || n == n_steps) {
      traj.snapshots.push_back(u);
      traj.snapshot_steps.push_back(n);
    }
  }
  return traj;
}

MomentTrajectory accumulate_K(const FlowTrajectory& traj) {
  MomentTrajectory m;
  m.dimension = traj.grid.dimension;
  if (traj.steps.empty()) return m;
  const int d = m.dimension;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(d, d);
  m.times.push_back(traj.steps.front().time);
  m.K.push_back(K);
  for (std::size_t n = 1; n < traj.steps.size(); ++n) {
    const double h = traj.steps[n].time - traj.steps[n - 1].time;
    K += 0.5 * h * (traj.steps[n - 1].moments + traj.steps[n].moments);
    m.times.push_back(traj.steps[n].time);
    m.K.push_back(K);
  }
  return m;
}

ZeroBracket find_zero_K12(const MomentTrajectory& moment, double a, double b) {
  ZeroBracket z;
  bool first = true;
  std::size_t prev = 0;
  bool have_prev = false;
  for (std::size_t n = 0; n < moment.times.size(); ++n) {
    const double t = moment.times[n];
    if (t < a || t > b) continue;
    const double k = moment.K[n](0, 1);
    if (first) {
      z.k12_min = z.k12_max = k;
      first = false;
    }
    z.k12_min = std::min(z.k12_min, k);
    z.k12_max = std::max(z.k12_max, k);
    if (have_prev) {
      const double kp = moment.K[prev](0, 1);
      if (kp * k < 0.0 || (k == 0.0 && kp != 0.0)) {
        ++z.sign_changes;
        if (!z.found) {
          z.found = true;
          z.t_lo = moment.times[prev];
          z.t_hi = t;
          z.k12_lo = kp;
          z.k12_hi = k;
          const double theta = kp / (kp - k);
          z.t_star = z.t_lo + theta * (z.t_hi - z.t_lo);
          z.K_star = moment.K[prev] + theta * (moment.K[n] - moment.K[prev]);
        }
      }
    }
    prev = n;
    have_prev = true;
  }
  return z;
}

ZeroBracket refine_zero_K12(const FlowTrajectory& traj, const MomentTrajectory& moment, const ZeroBracket& bracket,
                            int factor) {
  if (!bracket.found) return bracket;
  if (factor < 2) throw Error(ErrorKind::Configuration, "refinement factor must be at least 2");
  std::size_t n_lo = 0;
  for (std::size_t n = 0; n < moment.times.size(); ++n)
    if (moment.times[n] <= bracket.t_lo) n_lo = n;
  std::size_t snap = 0;
  for (std::size_t s = 0; s < traj.snapshot_steps.size(); ++s)
    if (traj.snapshot_steps[s] <= n_lo) snap = s;

  SpectralField u = traj.snapshots[snap];
  FlowStepper coarse(traj.grid, traj.dt);
  for (std::size_t n = traj.snapshot_steps[snap]; n < n_lo; ++n) coarse.step(u);
  u.set_time(moment.times[n_lo]);

  const double h = (bracket.t_hi - bracket.t_lo) / factor;
  FlowStepper fine(traj.grid, h);
  Eigen::MatrixXd K = moment.K[n_lo];
  Eigen::MatrixXd M = moment_density(u);
  ZeroBracket out = bracket;
  SpectralField before = u;
  Eigen::MatrixXd K_before = K;
  Eigen::MatrixXd M_before = M;
  bool found = false;
  for (int s = 0; s < factor; ++s) {
    before = u;
    K_before = K;
    M_before = M;
    fine.step(u);
    const Eigen::MatrixXd M_new = moment_density(u);
    K += 0.5 * h * (M + M_new);
    M = M_new;
    if (K_before(0, 1) * K(0, 1) < 0.0 || K(0, 1) == 0.0) {
      found = true;
      break;
    }
  }
  if (!found) return out;

  out.refined = true;
  out.t_lo = before.time();
  out.t_hi = u.time();
  out.k12_lo = K_before(0, 1);
  out.k12_hi = K(0, 1);
  const double theta = out.k12_lo / (out.k12_lo - out.k12_hi);
  out.t_star = out.t_lo + theta * (out.t_hi - out.t_lo);
  const double partial = out.t_star - out.t_lo;
  if (partial > 0.0) {
    SpectralField w = before;
    fine.step(w, partial);
    out.K_star = K_before + 0.5 * partial * (M_before + moment_density(w));
  } else {
    out.K_star = K_before;
  }
  return out;
}

double fnorm_diag(const std::vector<SpectralField>& states, double radius) {
  if (states.empty()) return 0.0;
  const GridSpec g = states.front().grid();
  SpectralTransform tr(g);
  const int n = g.points;
  const int d = g.dimension;
  const double dx = g.box_length / n;
  auto coord = [&](int j) {
    double x = j * dx;
    if (x >= 0.5 * g.box_length) x -= g.box_length;
    return x;
  };
  double spatial = 0.0;
  double temporal = 0.0;
  for (const auto& s : states) {
    if (!(s.grid() == g)) throw Error(ErrorKind::GridMismatch, "fnorm_diag states on different grids");
    const auto phys = tr.to_physical(s);
    const double time_weight = std::pow(1.0 + s.time(), 0.5 * (d + 1));
    const int n3 = d == 3 ? n : 1;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n3; ++l) {
          const double x = coord(i);
          const double y = coord(j);
          const double z = d == 3 ? coord(l) : 0.0;
          const double r = std::sqrt(x * x + y * y + z * z);
          if (r > radius) continue;
          const std::size_t idx = d == 2 ? static_cast<std::size_t>(i) * n + j
                                         : (static_cast<std::size_t>(i) * n + j) * n + l;
          double u2 = 0.0;
          for (int c = 0; c < d; ++c) u2 += phys[c][idx] * phys[c][idx];
          const double u = std::sqrt(u2);
          spatial = std::max(spatial, std::pow(1.0 + r, d + 1) * u);
          temporal = std::max(temporal, time_weight * u);
        }
      }
    }
  }
  return spatial + temporal;
}

double fnorm_diag(const FlowTrajectory& traj, double radius) { return fnorm_diag(traj.snapshots, radius); }

std::vector<SpectralField> heat_flow(const SpectralField& datum, const std::vector<double>& times) {
  std::vector<SpectralField> out;
  for (double t : times) {
    SpectralField f = heat(datum, t);
    f.set_time(datum.time() + t);
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

// out_n = −Σ_m w^{(n)}_m e^{−(n−m)dt|k|²} N_m over the modes where any N_m is nonzero.
SampledTrajectory duhamel(const std::vector<SpectralField>& forcing, double dt) {
  SampledTrajectory out;
  out.dt = dt;
  if (forcing.empty()) return out;
  const SpectralField& proto = forcing.front();
  const int d = proto.dimension();
  const std::size_t modes = proto.mode_count();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < modes; ++i) {
    bool nz = false;
    for (const auto& f : forcing)
      for (int c = 0; c < d && !nz; ++c) nz = f.component(c)[i] != 0.0;
    if (nz) active.push_back(i);
  }
  const std::size_t m_count = forcing.size();
  // lag_factor[p][a] = e^{−p dt |k_a|²}
  std::vector<std::vector<double>> lag(m_count, std::vector<double>(active.size()));
  for (std::size_t a = 0; a < active.size(); ++a) {
    const double e1 = std::exp(-dt * norm2(proto.wavevector(active[a])));
    double v = 1.0;
    for (std::size_t p = 0; p < m_count; ++p) {
      lag[p][a] = v;
      v *= e1;
    }
  }
  for (std::size_t n = 0; n < m_count; ++n) {
    SpectralField f(proto.grid(), dt * static_cast<double>(n));
    if (n > 0) {
      const std::vector<double> w = simpson_weights(static_cast<int>(n), dt);
      for (std::size_t m = 0; m <= n; ++m) {
        const auto& lf = lag[n - m];
        for (int c = 0; c < d; ++c) {
          auto dst = f.component(c);
          const auto src = forcing[m].component(c);
          for (std::size_t a = 0; a < active.size(); ++a) dst[active[a]] -= w[m] * lf[a] * src[active[a]];
        }
      }
    }
    out.fields.push_back(std::move(f));
  }
  return out;
}

void check_pair(const SampledTrajectory& u, const SampledTrajectory& v) {
  if (u.fields.size() != v.fields.size() || u.dt != v.dt) {
    throw Error(ErrorKind::GridMismatch, "trajectories sampled on different time grids");
  }
  if (u.fields.empty()) throw Error(ErrorKind::Configuration, "empty trajectory");
  for (std::size_t n = 0; n < u.fields.size(); ++n) require_same_grid(u.fields[n], v.fields[n]);
}

}  // namespace

SampledTrajectory bilinear_B(const SampledTrajectory& u, const SampledTrajectory& v) {
  check_pair(u, v);
  NonlinearOperator op(u.fields.front().grid());
  std::vector<SpectralField> forcing;
  for (std::size_t n = 0; n < u.fields.size(); ++n) {
    SpectralField f(op.grid());
    op.apply(u.fields[n], v.fields[n], f);
    forcing.push_back(std::move(f));
  }
  return duhamel(forcing, u.dt);
}

SpectralField bilinear_B(const SampledTrajectory& u, const SampledTrajectory& v, double t) {
  check_pair(u, v);
  const double pos = t / u.dt;
  const auto n = static_cast<std::size_t>(std::llround(pos));
  if (std::abs(pos - static_cast<double>(n)) > 1e-9 || n >= u.fields.size()) {
    throw Error(ErrorKind::Configuration, "bilinear_B evaluation time is not a sample node");
  }
  SampledTrajectory cu{u.dt, {u.fields.begin(), u.fields.begin() + static_cast<std::ptrdiff_t>(n + 1)}};
  SampledTrajectory cv{v.dt, {v.fields.begin(), v.fields.begin() + static_cast<std::ptrdiff_t>(n + 1)}};
  return bilinear_B(cu, cv).fields.back();
}

PicardSeries::PicardSeries(const SpectralField& datum, double t_end, int intervals, int max_order)
    : datum_(datum), dt_(t_end / intervals), intervals_(intervals), max_order_(max_order) {
  if (intervals < 1) throw Error(ErrorKind::Configuration, "Picard time grid needs at least one interval");
  if (!(t_end > 0.0)) throw Error(ErrorKind::Configuration, "Picard horizon must be positive");
  if (max_order < 1 || max_order > 8) throw Error(ErrorKind::Configuration, "Picard order must be in 1..8");
  terms_.resize(max_order);
}

const SampledTrajectory& PicardSeries::term(int k) {
  if (k < 1 || k > max_order_) {
    throw Error(ErrorKind::Configuration, "Picard order " + std::to_string(k) + " exceeds configured maximum");
  }
  auto& slot = terms_[k - 1];
  if (slot) return *slot;
  if (k == 1) {
    auto t1 = std::make_unique<SampledTrajectory>();
    t1->dt = dt_;
    for (int n = 0; n <= intervals_; ++n) {
      SpectralField f = heat(datum_, dt_ * n);
      f.set_time(dt_ * n);
      t1->fields.push_back(std::move(f));
    }
    slot = std::move(t1);
    return *slot;
  }
  for (int l = 1; l < k; ++l) term(l);
  NonlinearOperator op(datum_.grid());
  std::vector<SpectralField> forcing;
  SpectralField piece(datum_.grid());
  for (int n = 0; n <= intervals_; ++n) {
    SpectralField total(datum_.grid(), dt_ * n);
    // Σ_{l=1}^{k−1} B(T_l, T_{k−l}) with the symmetric product: pairs (l, k−l)
    // and (k−l, l) coincide.
    for (int l = 1; 2 * l <= k; ++l) {
      const auto& a = terms_[l - 1]->fields[n];
      const auto& b = terms_[k - l - 1]->fields[n];
      if (2 * l == k) {
        op.apply(a, piece);
        total += piece;
      } else {
        op.apply(a, b, piece);
        total.axpy(2.0, piece);
      }
    }
    forcing.push_back(std::move(total));
  }
  slot = std::make_unique<SampledTrajectory>(duhamel(forcing, dt_));
  return *slot;
}

SpectralField PicardSeries::partial_sum(int order, std::size_t n) {
  SpectralField sum = term(1).fields.at(n);
  for (int k = 2; k <= order; ++k) sum += term(k).fields.at(n);
  return sum;
}

SampledTrajectory picard_term(int k, const SpectralField& datum, double t_end, int intervals) {
  PicardSeries series(datum, t_end, intervals, std::max(k, 1));
  return series.term(k);
}

std::pair<double, double> second_order_remainder(const MomentTrajectory& moment, const SpectralField& unit_datum,
                                                 double eta) {
  double rem = 0.0;
  double scale = 0.0;
  const std::vector<double> e_curve = eval_E_lattice_trapezoid(unit_datum, moment.times);
  for (std::size_t n = 0; n < moment.times.size(); ++n) {
    const double e = e_curve[n];
    rem = std::max(rem, std::abs(moment.K[n](0, 1) + eta * eta * e));
    scale = std::max(scale, eta * eta * std::abs(e));
  }
  return {rem, scale};
}

CalibrationResult calibrate_eta(const DatumSpec& unit_spec, const CalibrationOptions& options) {
  if (!(options.t_end > 0.0)) throw Error(ErrorKind::Configuration, "calibration horizon must be positive");
  DatumSpec unit = unit_spec;
  unit.eta = 1.0;
  const SpectralField u_unit = assemble_spectral(unit, options.simulation.box_length, options.simulation.points);
  std::vector<double> probe;
  for (int i = 0; i <= 8; ++i) probe.push_back(options.t_end * i / 8.0);
  const double radius = options.fnorm_radius > 0.0 ? options.fnorm_radius : 0.25 * options.simulation.box_length;

  CalibrationResult result;
  result.fnorm_unit = fnorm_diag(heat_flow(u_unit, probe), radius);
  if (!(result.fnorm_unit > 0.0)) throw Error(ErrorKind::Configuration, "unit datum vanishes");
  result.eta0 = 0.1 / result.fnorm_unit;
  double eta = result.eta0;
  SimulationOptions sim = options.simulation;
  sim.t_end = options.t_end;
  sim.snapshot_stride = 0;
  for (int attempt = 0; attempt <= options.max_halvings; ++attempt) {
    SpectralField u0 = u_unit;
    u0 *= eta;
    const FlowTrajectory traj = simulate_field(u0, sim);
    const auto [rem, scale] = second_order_remainder(accumulate_K(traj), u_unit, eta);
    CalibrationStep step{eta, rem, scale, rem <= options.ratio * scale};
    result.history.push_back(step);
    if (step.accepted) {
      result.eta = eta;
      result.converged = true;
      return result;
    }
    eta *= 0.5;
  }
  result.eta = result.history.back().eta;
  return result;
}

}  // namespace concdiff
