#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "concdiff/correlation.hpp"
#include "concdiff/error.hpp"
#include "concdiff/nsflow.hpp"
#include "helpers.hpp"

using namespace concdiff;
using concdiff::testing::canonical_design;
using concdiff::testing::canonical_spec;
using concdiff::testing::t1_canonical;

namespace {

DatumSpec single_term(int dim, const Vec3& alpha, double delta, double lambda = 1.0) {
  DatumSpec s;
  s.dimension = dim;
  s.delta = delta;
  s.eta = 1.0;
  s.terms = {{lambda, alpha}};
  s.profile = named_profile("bump", dim);
  return s;
}

double two_pi_d(int d) { return std::pow(2.0 * std::numbers::pi, d); }

}  // namespace

TEST(Correlation, VanishesAtZero) {
  for (int d : {2, 3}) {
    const DatumSpec s = canonical_spec(d, d == 2 ? 0.25 : 0.5);
    EXPECT_EQ(eval_E_closed(s, 0.0), 0.0);
    EXPECT_EQ(eval_E_limit(s, 0.0), 0.0);
  }
  const GridSpec g{2, 128.0, 192};
  const SpectralField a = assemble_spectral(canonical_spec(2, 0.25), 128.0, 192);
  EXPECT_EQ(eval_E_lattice(a, 0.0), 0.0);
  EXPECT_EQ(eval_E_lattice_trapezoid(a, {0.0, 0.01}).front(), 0.0);
}

TEST(Correlation, RejectsCoarseQuadrature) {
  try {
    ClosedFormCorrelation c(canonical_spec(2, 0.25), ClosedFormCorrelation::kMinQuadPoints - 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnderResolved);
  }
}

TEST(Correlation, SingleBumpLimitHasUnitConstant) {
  const Vec3 alpha{2.0, 0.7, 0.0};
  const double t = 0.1;
  const double a2 = norm2(alpha);
  const double expect = -std::expm1(-2.0 * t * a2) * alpha[0] * alpha[1] / a2;
  double prev = 1e300;
  for (double delta : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    const double e = two_pi_d(2) * eval_E_closed(single_term(2, alpha, delta), t);
    const double err = std::abs(e - expect);
    EXPECT_LT(err, prev) << "delta=" << delta;
    prev = err;
  }
  EXPECT_LE(prev, 2e-3 * std::abs(expect));
}

TEST(Correlation, ThreeDimensionalLimit) {
  const Vec3 alpha{0.3, 1.9, 1.1};
  const double t = 0.07;
  const DatumSpec s = single_term(3, alpha, 0.02);
  const double a2 = norm2(alpha);
  const double g = (a2 - alpha[0] * alpha[1] - alpha[1] * alpha[2] - alpha[2] * alpha[0]) / (3.0 * a2);
  const double expect = -std::expm1(-2.0 * t * a2) * g;
  EXPECT_NEAR(two_pi_d(3) * eval_E_closed(s, t), expect, 2e-3 * std::abs(expect));
  EXPECT_NEAR(two_pi_d(3) * eval_E_limit(s, t), expect, 1e-15);
}

TEST(Correlation, QuadraticInLambda) {
  for (int d : {2, 3}) {
    DatumSpec s = canonical_spec(d, d == 2 ? 0.25 : 0.5);
    const double e = eval_E_closed(s, 0.05);
    for (auto& term : s.terms) term.lambda *= -3.0;
    EXPECT_NEAR(eval_E_closed(s, 0.05), 9.0 * e, 1e-12 * std::abs(e));
  }
}

TEST(Correlation, ReducedAndConeFormsAgree) {
  for (int d : {2, 3}) {
    const DatumSpec s = canonical_spec(d, d == 2 ? 0.25 : 0.5);
    const double scale = std::abs(eval_E_closed(s, 0.3));
    for (double t : {0.01, 0.0866, 0.3}) {
      const double e = eval_E_closed(s, t);
      EXPECT_NEAR(eval_E_reduced(s, t), e, 1e-12 * scale) << d << " " << t;
      if (d == 2) EXPECT_NEAR(eval_E_cone_2d(s, t), e, 1e-12 * scale) << t;
    }
  }
}

TEST(Correlation, InitialSlopeIsMinusMomentOffDiagonal) {
  for (int d : {2, 3}) {
    const DatumSpec s = canonical_spec(d, d == 2 ? 0.25 : 0.5);
    const ClosedFormCorrelation e(s);
    const double m12 = moment_matrix_zero(s)(0, 1);
    EXPECT_NEAR(e.derivative(0.0), -m12, 1e-10 * std::abs(m12));
    const double h = 1e-6;
    const double fd = (-e(2 * h) + 4 * e(h) - 3 * e(0.0)) / (2 * h);
    EXPECT_NEAR(fd, -m12, 1e-6 * std::abs(m12));
  }
}

TEST(Correlation, DerivativeMatchesFiniteDifference) {
  const ClosedFormCorrelation e(canonical_spec(2, 0.25));
  for (double t : {0.02, 0.0866, 0.2}) {
    const double h = 1e-5;
    EXPECT_NEAR((e(t + h) - e(t - h)) / (2 * h), e.derivative(t), 1e-7 * std::abs(e.derivative(0.0)));
  }
}

TEST(Correlation, SingleBumpIsIncreasing) {
  const ClosedFormCorrelation e(single_term(2, {2.0, 0.7, 0.0}, 0.25));
  double prev = e(0.0);
  for (int i = 1; i <= 40; ++i) {
    const double v = e(0.02 * i);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Correlation, OracleAgreesWithClosedForm2d) {
  const DatumSpec s = canonical_spec(2, 0.25);
  const std::vector<double> times{0.03, t1_canonical(), 0.15};
  const auto oracle = eval_E_oracle(s, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double closed = eval_E_closed(s, times[i]);
    EXPECT_LE(std::abs(closed - oracle[i]), 1e-6 * std::max(1.0, std::abs(closed)));
  }
  EXPECT_EQ(eval_E_oracle(s, 0.0), 0.0);
}

TEST(Correlation, LatticeTrapezoidConvergesToExactLattice) {
  const SpectralField a = assemble_spectral(canonical_spec(2, 0.25), 128.0, 192);
  const double t = 0.08;
  const double exact = eval_E_lattice(a, t);
  double prev_err = 0.0;
  for (int m : {8, 16, 32}) {
    std::vector<double> nodes;
    for (int n = 0; n <= m; ++n) nodes.push_back(t * n / m);
    const double err = std::abs(eval_E_lattice_trapezoid(a, nodes).back() - exact);
    if (prev_err > 0.0) EXPECT_NEAR(prev_err / err, 4.0, 0.1);
    prev_err = err;
  }
  try {
    eval_E_lattice_trapezoid(a, {0.01, 0.02});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(SignChanges, ContractAndTrivialCases) {
  const DesignSolution sol = canonical_design(2);
  const double t1 = t1_canonical();
  auto eapp = [&](double t) { return eval_Eapp(sol.mu, sol.gamma, t); };
  const auto c = find_sign_changes(eapp, t1 - sol.epsilon, t1 + sol.epsilon, 1e-10 * t1);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_LE(c[0].t_lo, t1);
  EXPECT_GE(c[0].t_hi, t1);
  EXPECT_LE(c[0].t_hi - c[0].t_lo, 1e-10 * t1);
  EXPECT_LT(c[0].f_lo * c[0].f_hi, 0.0);
  EXPECT_TRUE(find_sign_changes([](double) { return 1.0; }, 0.0, 1.0, 1e-6).empty());
  const auto many = find_sign_changes([](double t) { return std::sin(20.0 * t); }, 0.1, 1.0, 1e-9);
  EXPECT_EQ(many.size(), 6u);
  for (const auto& s : many) EXPECT_LT(s.f_lo * s.f_hi, 0.0);
}

TEST(DeltaSweep, DeviationDecreasesAndInadmissibleFlagged) {
  const DesignSolution sol = canonical_design(2);
  std::vector<double> times;
  for (int i = 0; i <= 40; ++i) times.push_back(2.0 * t1_canonical() * i / 40.0);
  const auto rows = delta_sweep(sol, {1.0, 0.5, 0.25}, times, named_profile("bump", 2));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_FALSE(rows[0].admissible);
  EXPECT_NE(rows[0].reason.find("alpha_1 > |alpha_2| + delta*sqrt(2)"), std::string::npos);
  EXPECT_TRUE(rows[1].admissible);
  EXPECT_TRUE(rows[2].admissible);
  EXPECT_GT(rows[0].deviation, rows[1].deviation);
  EXPECT_GT(rows[1].deviation, rows[2].deviation);
  ASSERT_EQ(rows[2].crossings.size(), 1u);
  EXPECT_EQ(rows[2].crossings[0], 1);
}

TEST(DeltaSweep, SingleBumpDeviationScalesWithLambdaSquared) {
  const std::vector<double> times{0.0, 0.05, 0.1, 0.2};
  DatumSpec s1 = single_term(2, {2.0, 0.7, 0.0}, 0.25, 1.0);
  DatumSpec s3 = single_term(2, {2.0, 0.7, 0.0}, 0.25, 3.0);
  auto dev = [&](const DatumSpec& s, double lambda) {
    double m = 0.0;
    const double a2 = norm2(s.terms[0].alpha);
    for (double t : times) {
      const double app = lambda * lambda * -std::expm1(-2.0 * t * a2) * 2.0 * 0.7 / a2;
      m = std::max(m, std::abs(two_pi_d(2) * eval_E_closed(s, t) - app));
    }
    return m;
  };
  EXPECT_NEAR(dev(s3, 3.0), 9.0 * dev(s1, 1.0), 1e-12);
}
