#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "concdiff/error.hpp"
#include "concdiff/farfield.hpp"

using namespace concdiff;

namespace {

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd K(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) K(i, j) = K(j, i) = u(rng);
  return K;
}

Vec3 random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v{n(rng), n(rng), d == 3 ? n(rng) : 0.0};
  return (1.0 / norm(v)) * v;
}

double max_abs(const Vec3& v) { return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])}); }

}  // namespace

TEST(GradPi, IdentityCancels) {
  std::mt19937_64 rng(5);
  for (int d : {2, 3}) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < 10; ++i) EXPECT_LE(max_abs(eval_gradPi(I, random_unit(rng, d), 1.7)), 1e-15);
  }
}

TEST(GradPi, Homogeneity) {
  std::mt19937_64 rng(6);
  for (int d : {2, 3}) {
    for (int i = 0; i < 20; ++i) {
      const auto K = random_symmetric(rng, d);
      const Vec3 w = random_unit(rng, d);
      const Vec3 g1 = eval_gradPi(K, w, 1.0);
      const Vec3 g2 = eval_gradPi(K, w, 2.0);
      for (int j = 0; j < d; ++j) EXPECT_NEAR(g2[j], std::pow(2.0, -(d + 1)) * g1[j], 1e-15 * max_abs(g1));
    }
  }
}

TEST(GradPi, FiniteDifferenceOfPi) {
  std::mt19937_64 rng(7);
  for (int d : {2, 3}) {
    for (int i = 0; i < 20; ++i) {
      const auto K = random_symmetric(rng, d);
      const Vec3 w = random_unit(rng, d);
      const double r = 0.5 + 2.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const Vec3 x = r * w;
      const Vec3 g = eval_gradPi(K, w, r);
      const double h = 1e-5;
      for (int j = 0; j < d; ++j) {
        Vec3 xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const double fd = (eval_Pi(K, xp) - eval_Pi(K, xm)) / (2 * h);
        EXPECT_NEAR(fd, g[j], 1e-8 * max_abs(g) + 1e-12);
      }
    }
  }
}

TEST(GradPi, TraceShiftInvariance) {
  std::mt19937_64 rng(8);
  for (int d : {2, 3}) {
    const auto K = random_symmetric(rng, d);
    const Eigen::MatrixXd K2 = K + 3.5 * Eigen::MatrixXd::Identity(d, d);
    const Vec3 w = random_unit(rng, d);
    const Vec3 a = eval_gradPi(K, w, 1.3);
    const Vec3 b = eval_gradPi(K2, w, 1.3);
    for (int j = 0; j < d; ++j) EXPECT_NEAR(a[j], b[j], 1e-14);
  }
}

TEST(GradPi, Errors) {
  const Eigen::MatrixXd K = Eigen::MatrixXd::Identity(2, 2);
  try {
    eval_gradPi(K, {1.0, 0.0, 0.0}, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Singularity);
  }
  try {
    eval_gradPi(K, {1.0, 1.0, 0.0}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Classify, Examples) {
  for (int d : {2, 3}) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    EXPECT_EQ(classify_decay(3.0 * I).exponent, -(d + 2));
    EXPECT_EQ(classify_decay(-0.2 * I).exponent, -(d + 2));
    Eigen::MatrixXd K = I;
    K(0, 1) = K(1, 0) = 0.1;
    EXPECT_EQ(classify_decay(K).exponent, -(d + 1));
    EXPECT_NEAR(classify_decay(K).off_diagonal, 0.1, 1e-15);
    Eigen::MatrixXd spread = I;
    spread(0, 0) = 1.0 + 1e-3;
    EXPECT_EQ(classify_decay(spread).exponent, -(d + 1));
    EXPECT_EQ(classify_decay(spread, 1e-2).exponent, -(d + 2));
  }
}

TEST(Classify, DiagonalShiftInvariantForSymmetryClass) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int d : {2, 3}) {
    for (int i = 0; i < 200; ++i) {
      // Equal diagonals, equal off-diagonals.
      const double diag = 1.0 + std::abs(u(rng));
      const double off = u(rng) * std::pow(10.0, -8.0 * std::abs(u(rng)));
      Eigen::MatrixXd K = Eigen::MatrixXd::Constant(d, d, off);
      K.diagonal().setConstant(diag);
      const double tol = 1e-6;
      const bool by_k12 = std::abs(K(0, 1)) <= tol * K.cwiseAbs().maxCoeff();
      EXPECT_EQ(classify_decay(K, tol).exponent == -(d + 2), by_k12);
    }
  }
}

TEST(COmega, ProfileVanishesForIdentity) {
  try {
    c_omega_map(2.0 * Eigen::MatrixXd::Identity(3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ProfileVanishes);
  }
}

TEST(COmega, OffDiagonalCubicZeroSet2d) {
  Eigen::MatrixXd K(2, 2);
  K << 0.0, 1.0, 1.0, 0.0;
  // ∂₁Π(θ) = 2 sinθ (4cos²θ − 1), ∂₂Π(θ) = 2 cosθ (4sin²θ − 1).
  const int n = 4096;
  const COmegaMap map = c_omega_map(K, n);
  std::array<int, 2> sign_changes{0, 0};
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * (i + 0.5) / n;
    const double c = std::cos(th), s = std::sin(th);
    EXPECT_NEAR(map.magnitudes[i][0], std::abs(2.0 * s * (4.0 * c * c - 1.0)), 1e-13);
    EXPECT_NEAR(map.magnitudes[i][1], std::abs(2.0 * c * (4.0 * s * s - 1.0)), 1e-13);
    const Vec3 g = eval_gradPi(K, map.directions[i], 1.0);
    const Vec3 h = eval_gradPi(K, map.directions[(i + 1) % n], 1.0);
    for (int j = 0; j < 2; ++j) sign_changes[j] += g[j] * h[j] < 0.0 ? 1 : 0;
  }
  EXPECT_EQ(sign_changes[0], 6);
  EXPECT_EQ(sign_changes[1], 6);
  double prev = 0.0;
  for (double thr : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double f = c_omega_map(K, n, thr).positive_fraction;
    EXPECT_GE(f, prev);
    prev = f;
  }
  EXPECT_GE(prev, 0.999);
}

TEST(COmega, GenericPositivityAndScaling) {
  std::mt19937_64 rng(10);
  for (int d : {2, 3}) {
    const auto K = random_symmetric(rng, d);
    EXPECT_GE(c_omega_map(K).positive_fraction, 0.95) << "d=" << d;
    Eigen::MatrixXd off = Eigen::MatrixXd::Constant(d, d, 0.3);
    off.diagonal().setZero();
    const COmegaMap a = c_omega_map(off, 256);
    const COmegaMap b = c_omega_map(4.0 * off, 256);
    for (int i = 0; i < 256; ++i)
      for (int j = 0; j < d; ++j) EXPECT_NEAR(b.magnitudes[i][j], 4.0 * a.magnitudes[i][j], 1e-14);
  }
}

TEST(COmega, TildeEquivariance) {
  for (int d : {2, 3}) {
    Eigen::MatrixXd K = Eigen::MatrixXd::Constant(d, d, -0.4);
    K.diagonal().setConstant(1.2);
    const TildeMap tilde{d};
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
      const Vec3 w = random_unit(rng, d);
      const Vec3 g = eval_gradPi(K, w, 1.0);
      const Vec3 gt = eval_gradPi(K, tilde(w), 1.0);
      // Symmetric flows: component next(m) at ω equals component m at ω̃.
      for (int m = 0; m < d; ++m) EXPECT_NEAR(g[tilde.next(m)], gt[m], 1e-14);
    }
  }
}

TEST(SphereSamples, DeterministicAndUnit) {
  for (int d : {2, 3}) {
    const auto a = sphere_samples(d, 100);
    const auto b = sphere_samples(d, 100);
    EXPECT_EQ(a, b);
    Vec3 mean{0.0, 0.0, 0.0};
    for (const auto& w : a) {
      EXPECT_NEAR(norm(w), 1.0, 1e-15);
      mean = mean + 0.01 * w;
    }
    EXPECT_LE(norm(mean), 2e-2);
  }
}

TEST(DecayFit, SyntheticAndProfileSlopes) {
  const Vec3 w{0.6, 0.8, 0.0};
  std::vector<double> radii;
  for (int i = 0; i < 12; ++i) radii.push_back(10.0 * std::pow(1.5, i));
  const auto fit = fit_decay_exponent([](const Vec3& x) { return Vec3{7.0 * std::pow(norm(x), -3.0), 0.0, 0.0}; },
                                      w, radii);
  EXPECT_NEAR(fit.slope, -3.0, 1e-6);
  EXPECT_TRUE(fit.excluded.empty());

  std::mt19937_64 rng(12);
  for (int d : {2, 3}) {
    const auto K = random_symmetric(rng, d);
    const Vec3 dir = random_unit(rng, d);
    const auto f = fit_decay_exponent(
        [&](const Vec3& x) { return eval_gradPi(K, (1.0 / norm(x)) * x, norm(x)); }, dir, radii);
    EXPECT_NEAR(f.slope, -(d + 1), 1e-10);
  }
}

TEST(DecayFit, NoiseFloorExclusion) {
  const std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
  const auto fit = fit_power_law(radii, {1.0, 0.25, 0.0, std::nan("")});
  EXPECT_NEAR(fit.slope, -2.0, 1e-14);
  EXPECT_EQ(fit.excluded, (std::vector<double>{4.0, 8.0}));
  const auto floor = fit_power_law(radii, {1.0, 0.25, 1e-20, 1e-21}, 1e-18);
  EXPECT_EQ(floor.excluded.size(), 2u);
  try {
    fit_power_law(radii, {1.0, 0.0, 0.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}
