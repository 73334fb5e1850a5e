#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "concdiff/correlation.hpp"
#include "concdiff/error.hpp"
#include "concdiff/fft.hpp"
#include "concdiff/nsflow.hpp"
#include "helpers.hpp"

using namespace concdiff;
using concdiff::testing::canonical_spec;
using concdiff::testing::t1_canonical;

namespace {

// Random real field restricted to the 2/3 band and made divergence-free.
SpectralField random_band_field(const GridSpec& g, unsigned seed, bool project = true) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  SpectralTransform tr(g);
  SpectralField f(g);
  std::vector<double> phys(g.physical_size());
  for (int c = 0; c < g.dimension; ++c) {
    for (auto& v : phys) v = n(rng);
    tr.to_spectral(phys, f.component(c));
  }
  for (std::size_t i = 0; i < f.mode_count(); ++i) {
    if (!in_dealias_band(g, f.lattice(i)))
      for (int c = 0; c < g.dimension; ++c) f.component(c)[i] = 0.0;
  }
  if (project) apply_leray(f);
  return f;
}

// P∇·(u⊗u) by explicit convolution over the full lattice (small grids only).
SpectralField convolution_oracle(const SpectralField& u) {
  const GridSpec& g = u.grid();
  const int d = g.dimension;
  const int n = g.points;
  std::vector<std::array<int, 3>> modes;
  const int lo = -n / 2 + 1;
  const int hi = n / 2 - 1;
  for (int a = lo; a <= hi; ++a)
    for (int b = lo; b <= hi; ++b)
      for (int c = (d == 3 ? lo : 0); c <= (d == 3 ? hi : 0); ++c) {
        std::array<int, 3> m{a, b, c};
        if (in_dealias_band(g, m)) modes.push_back(m);
      }
  SpectralField out(g);
  const double dk = g.dk();
  for (std::size_t idx = 0; idx < out.mode_count(); ++idx) {
    const auto k = out.lattice(idx);
    if (!in_dealias_band(g, k)) continue;
    std::array<std::array<Complex, 3>, 3> t{};
    for (const auto& p : modes) {
      std::array<int, 3> q{k[0] - p[0], k[1] - p[1], k[2] - p[2]};
      if (!in_dealias_band(g, q)) continue;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) t[i][j] += u.at(i, p) * u.at(j, q);
    }
    std::array<Complex, 3> div{};
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) div[i] += Complex(0.0, dk * k[j]) * t[i][j];
    Vec3 kv{dk * k[0], dk * k[1], dk * k[2]};
    const double k2 = norm2(kv);
    Complex dot = 0.0;
    for (int i = 0; i < d; ++i) dot += kv[i] * div[i];
    for (int i = 0; i < d; ++i) out.component(i)[idx] = k2 == 0.0 ? div[i] : div[i] - kv[i] * dot / k2;
  }
  return out;
}

double max_diff(const SpectralField& a, const SpectralField& b) {
  SpectralField d = a;
  d -= b;
  return d.max_abs();
}

}  // namespace

TEST(Heat, IdentitySemigroupAndMultiplier) {
  const GridSpec g{2, 2.0 * std::numbers::pi, 16};
  const SpectralField f = random_band_field(g, 1);
  EXPECT_EQ(max_diff(heat(f, 0.0), f), 0.0);
  EXPECT_LE(max_diff(heat(heat(f, 0.1), 0.1), heat(f, 0.2)), 1e-14 * f.max_abs());
  SpectralField single(g);
  const std::size_t idx = single.index({2, 0, 0});
  single.component(1)[idx] = 1.0;
  const SpectralField h = heat(single, std::log(2.0) / 8.0);
  EXPECT_NEAR(h.component(1)[idx].real(), std::pow(2.0, -0.5), 1e-15);
  try {
    heat(f, -1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Leray, ProjectorProperties) {
  for (int d : {2, 3}) {
    const GridSpec g{d, 5.0, d == 2 ? 16 : 8};
    const SpectralField div_free = random_band_field(g, 2);
    EXPECT_LE(max_diff(leray_project(div_free), div_free), 1e-14 * div_free.max_abs());

    const SpectralField raw = random_band_field(g, 3, false);
    const SpectralField p = leray_project(raw);
    EXPECT_LE(max_diff(leray_project(p), p), 1e-14 * raw.max_abs());
    EXPECT_LE(check_divergence_free(p), 1e-14);

    // Gradient of a scalar: û = ik s(k).
    SpectralField grad(g);
    const SpectralField s = random_band_field(g, 4, false);
    for (std::size_t i = 0; i < grad.mode_count(); ++i) {
      const Vec3 k = grad.wavevector(i);
      for (int c = 0; c < d; ++c) grad.component(c)[i] = Complex(0.0, k[c]) * s.component(0)[i];
    }
    EXPECT_LE(leray_project(grad).max_abs(), 1e-14 * grad.max_abs());
  }
}

TEST(Nonlinear, MatchesConvolutionOracle) {
  for (int d : {2, 3}) {
    const GridSpec g{d, 3.0, d == 2 ? 12 : 6};
    const SpectralField u = random_band_field(g, 10 + d);
    const SpectralField fast = nonlinear_term(u);
    const SpectralField slow = convolution_oracle(u);
    EXPECT_LE(max_diff(fast, slow), 1e-12 * slow.max_abs()) << "d=" << d;
  }
}

TEST(Nonlinear, StructuralIdentities) {
  for (int d : {2, 3}) {
    const GridSpec g{d, 9.0, d == 2 ? 64 : 24};
    SpectralField zero(g);
    EXPECT_EQ(nonlinear_term(zero).max_abs(), 0.0);
    const SpectralField u = random_band_field(g, 20 + d);
    const SpectralField nu = nonlinear_term(u);
    EXPECT_LE(check_divergence_free(nu), 1e-12);
    double flux = 0.0;
    for (int c = 0; c < d; ++c) flux += inner_product(u, c, nu, c);
    double scale = 0.0;
    for (int c = 0; c < d; ++c) scale += std::sqrt(inner_product(u, c, u, c) * inner_product(nu, c, nu, c));
    EXPECT_LE(std::abs(flux), 1e-10 * scale);
    NonlinearOperator op(g);
    SpectralField sym(g);
    op.apply(u, u, sym);
    EXPECT_LE(max_diff(sym, nu), 1e-13 * nu.max_abs());
  }
}

TEST(Nonlinear, TaylorGreenIsSteadyForEuler) {
  const GridSpec g{2, 2.0 * std::numbers::pi, 16};
  SpectralField u(g);
  // u = (sin x cos y, −cos x sin y)
  for (int sx : {-1, 1}) {
    const std::size_t idx = u.index({sx, 1, 0});
    u.component(0)[idx] = Complex(0.0, -0.25 * sx);
    u.component(1)[idx] = Complex(0.0, 0.25);
  }
  SpectralTransform tr(g);
  const auto phys = tr.to_physical(u);
  const double h = g.box_length / g.points;
  EXPECT_NEAR(phys[0][1 * 16 + 2], std::sin(h) * std::cos(2 * h), 1e-14);
  EXPECT_NEAR(phys[1][1 * 16 + 2], -std::cos(h) * std::sin(2 * h), 1e-14);
  EXPECT_LE(nonlinear_term(u).max_abs(), 1e-15);

  SimulationOptions o;
  o.t_end = 0.3;
  o.dt = 0.01;
  o.box_length = g.box_length;
  o.points = g.points;
  const FlowTrajectory traj = simulate_field(u, o);
  EXPECT_LE(max_diff(traj.final_state(), heat(u, 0.3)), 1e-14);
}

TEST(Stepper, ZeroAmplitudeIsHeatFlow) {
  DatumSpec s = canonical_spec(2, 0.25, 0.0);
  SimulationOptions o;
  o.t_end = 0.02;
  o.box_length = 128.0;
  o.points = 192;
  const FlowTrajectory traj = simulate(s, o);
  EXPECT_EQ(traj.final_state().max_abs(), 0.0);
  const MomentTrajectory m = accumulate_K(traj);
  for (const auto& K : m.K) EXPECT_EQ(K.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Stepper, InvariantsAlongCanonicalRun) {
  const DatumSpec s = canonical_spec(2, 0.25, 4.0);
  SimulationOptions o;
  o.t_end = 0.03;
  o.box_length = 128.0;
  o.points = 192;
  o.dt = 0.002;
  o.snapshot_stride = 5;
  const FlowTrajectory traj = simulate(s, o);
  EXPECT_LE(traj.max_divergence(), 1e-10);
  EXPECT_LE(traj.max_symmetry(), 1e-10);
  EXPECT_LE(traj.max_energy_increase(), 1e-8);
  EXPECT_LE(traj.max_diagonal_spread(), 1e-8);
  EXPECT_EQ(traj.snapshot_steps.back(), traj.steps.size() - 1);
  EXPECT_NEAR(traj.steps.back().time, 0.03, 1e-15);

  const MomentTrajectory m = accumulate_K(traj);
  EXPECT_EQ(m.K.front().cwiseAbs().maxCoeff(), 0.0);
  for (std::size_t n = 1; n < m.K.size(); ++n) {
    EXPECT_GE(m.K[n](0, 0), m.K[n - 1](0, 0));
    EXPECT_NEAR(m.K[n](1, 1), m.K[n](0, 0), 1e-8 * m.K[n](0, 0));
  }
}

TEST(Stepper, AmplitudeHomogeneityOfSecondOrder) {
  SimulationOptions o;
  o.t_end = 0.03;
  o.box_length = 128.0;
  o.points = 192;
  o.dt = 0.003;
  o.snapshot_stride = 0;
  const auto k1 = accumulate_K(simulate(canonical_spec(2, 0.25, 1.0), o)).K.back()(0, 1);
  const auto k2 = accumulate_K(simulate(canonical_spec(2, 0.25, 2.0), o)).K.back()(0, 1);
  EXPECT_NEAR(k2 / k1, 4.0, 1e-3);
}

TEST(Stepper, DatumOutsideBandRejected) {
  SimulationOptions o;
  o.t_end = 0.01;
  o.box_length = 128.0;
  o.points = 160;  // Nyquist is enough for the datum but not the 2/3 band
  try {
    simulate(canonical_spec(2, 0.25), o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnderResolved);
  }
}

TEST(Moments, ZeroBracketContract) {
  MomentTrajectory m;
  m.dimension = 2;
  for (int n = 0; n <= 100; ++n) {
    const double t = 0.01 * n;
    Eigen::MatrixXd K(2, 2);
    K << t, (t - 0.437) * t, (t - 0.437) * t, t;
    m.times.push_back(t);
    m.K.push_back(K);
  }
  const ZeroBracket z = find_zero_K12(m, 0.3, 0.6);
  ASSERT_TRUE(z.found);
  EXPECT_LT(z.k12_lo * z.k12_hi, 0.0);
  EXPECT_LE(z.t_hi - z.t_lo, 0.01 + 1e-15);
  EXPECT_LE(z.t_lo, 0.437);
  EXPECT_GE(z.t_hi, 0.437);
  EXPECT_NEAR(z.K_star(0, 1), 0.0, 1e-15);

  const ZeroBracket none = find_zero_K12(m, 0.5, 0.9);
  EXPECT_FALSE(none.found);
  EXPECT_GT(none.k12_min, 0.0);
  EXPECT_GT(none.k12_max, none.k12_min);
}

TEST(Moments, SecondOrderPredictionAndRefinement) {
  const double t1 = t1_canonical();
  const DatumSpec unit = canonical_spec(2, 0.25, 1.0);
  SimulationOptions o;
  o.t_end = t1 + 0.02;
  o.box_length = 128.0;
  o.points = 192;
  o.dt = (t1 + 0.02) / 48.0;
  o.snapshot_stride = 4;
  const double eta = 0.5;
  DatumSpec s = unit;
  s.eta = eta;
  const FlowTrajectory traj = simulate(s, o);
  const MomentTrajectory m = accumulate_K(traj);
  const SpectralField a = assemble_spectral(unit, 128.0, 192);
  const auto [rem, scale] = second_order_remainder(m, a, eta);
  EXPECT_LE(rem, 1e-3 * scale);

  const ZeroBracket z = find_zero_K12(m, t1 - 0.02, t1 + 0.02);
  ASSERT_TRUE(z.found);
  const ZeroBracket r = refine_zero_K12(traj, m, z, 16);
  ASSERT_TRUE(r.refined);
  EXPECT_GE(r.t_lo, z.t_lo - 1e-15);
  EXPECT_LE(r.t_hi, z.t_hi + 1e-15);
  EXPECT_LT(r.k12_lo * r.k12_hi, 0.0);
  EXPECT_LE(std::abs(r.K_star(0, 1)), 1e-6 * r.K_star(0, 0));
}

TEST(Fnorm, ZeroAndHomogeneity) {
  const GridSpec g{2, 128.0, 192};
  EXPECT_EQ(fnorm_diag({SpectralField(g)}, 32.0), 0.0);
  const SpectralField a = assemble_spectral(canonical_spec(2, 0.25, 1.0), 128.0, 192);
  SpectralField b = a;
  b *= 3.0;
  const double fa = fnorm_diag(heat_flow(a, {0.0, 0.05}), 32.0);
  EXPECT_GT(fa, 0.0);
  EXPECT_NEAR(fnorm_diag(heat_flow(b, {0.0, 0.05}), 32.0), 3.0 * fa, 1e-12 * fa);
}

TEST(Picard, DuhamelOfConstantForcing) {
  const GridSpec g{2, 8.0, 8};
  SpectralField f = random_band_field(g, 30);
  SampledTrajectory one{0.01, {}};
  // Frozen u ≡ v ≡ f: the Duhamel integral has a closed form per mode.
  for (int n = 0; n <= 16; ++n) one.fields.push_back(f);
  const SampledTrajectory b = bilinear_B(one, one);
  const SpectralField force = nonlinear_term(f);
  const double t = 0.16;
  SpectralField expect(g);
  for (std::size_t i = 0; i < expect.mode_count(); ++i) {
    const double k2 = norm2(expect.wavevector(i));
    const double w = k2 == 0.0 ? t : -std::expm1(-t * k2) / k2;
    for (int c = 0; c < 2; ++c) expect.component(c)[i] = -w * force.component(c)[i];
  }
  EXPECT_LE(max_diff(b.fields.back(), expect), 1e-7 * force.max_abs());
  EXPECT_EQ(b.fields.front().max_abs(), 0.0);

  SampledTrajectory zero{0.01, std::vector<SpectralField>(17, SpectralField(g))};
  EXPECT_EQ(bilinear_B(one, zero).fields.back().max_abs(), 0.0);
  EXPECT_LE(max_diff(bilinear_B(one, one, 0.08), b.fields[8]), 1e-15 * force.max_abs());
}

TEST(Picard, TermDefinitions) {
  const GridSpec g{2, 6.0, 16};
  const SpectralField a = random_band_field(g, 40);
  PicardSeries ps(a, 0.1, 8, 3);
  const auto& t1 = ps.term(1);
  EXPECT_LE(max_diff(t1.fields[8], heat(a, 0.1)), 1e-15 * a.max_abs());
  const SampledTrajectory b11 = bilinear_B(t1, t1);
  EXPECT_LE(max_diff(ps.term(2).fields[8], b11.fields[8]), 1e-15 * b11.fields[8].max_abs());
  const SampledTrajectory b12 = bilinear_B(t1, ps.term(2));
  SpectralField expect3 = b12.fields[8];
  expect3 *= 2.0;
  EXPECT_LE(max_diff(ps.term(3).fields[8], expect3), 1e-14 * expect3.max_abs());
  try {
    ps.term(4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Configuration);
  }
}

TEST(Picard, SeriesNormsDecayAtSmallAmplitude) {
  const DatumSpec s = canonical_spec(2, 0.25, 1.0);
  const SpectralField a = assemble_spectral(s, 128.0, 192);
  PicardSeries ps(a, t1_canonical(), 8, 4);
  std::vector<double> norms;
  for (int k = 1; k <= 4; ++k) {
    double m = 0.0;
    for (const auto& f : ps.term(k).fields) m = std::max(m, l2_norm(f));
    norms.push_back(m);
  }
  for (int k = 1; k < 4; ++k) EXPECT_LT(norms[k], 0.1 * norms[k - 1]) << "k=" << k + 1;
}
