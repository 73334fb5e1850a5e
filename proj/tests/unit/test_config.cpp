#include <gtest/gtest.h>

#include <filesystem>

#include "concdiff/config.hpp"
#include "concdiff/error.hpp"
#include "concdiff/pipeline.hpp"
#include "helpers.hpp"

using namespace concdiff;
using concdiff::testing::canonical_design;
using concdiff::testing::canonical_spec;

namespace fs = std::filesystem;

TEST(Config, DatumRoundTrip) {
  for (int d : {2, 3}) {
    DatumConfig c{canonical_spec(d, default_delta(d), 0.25), 100.0, 64};
    const DatumConfig back = datum_config_from_json(Json::parse(to_json(c).dump()));
    EXPECT_EQ(back.spec.dimension, d);
    EXPECT_EQ(back.spec.delta, c.spec.delta);
    EXPECT_EQ(back.spec.eta, 0.25);
    EXPECT_EQ(back.box_length, 100.0);
    EXPECT_EQ(back.points, 64);
    ASSERT_EQ(back.spec.terms.size(), c.spec.terms.size());
    for (std::size_t j = 0; j < back.spec.terms.size(); ++j) {
      EXPECT_EQ(back.spec.terms[j].lambda, c.spec.terms[j].lambda);
      EXPECT_EQ(back.spec.terms[j].alpha, c.spec.terms[j].alpha);
    }
  }
}

TEST(Config, DatumDefaultsAndErrors) {
  const Json j = {{"dimension", 3}, {"delta", 0.5}, {"terms", {{{"lambda", 1.0}, {"alpha", {0.0, 1.0, 2.0}}}}}};
  const DatumConfig c = datum_config_from_json(j);
  EXPECT_EQ(c.box_length, 64.0);
  EXPECT_EQ(c.points, 96);
  EXPECT_EQ(c.spec.profile.name(), "bump");

  Json bad = j;
  bad["terms"][0]["alpha"] = {1.0, 2.0};
  EXPECT_THROW(datum_config_from_json(bad), Error);
  bad = j;
  bad.erase("delta");
  EXPECT_THROW(datum_config_from_json(bad), Error);
  bad = j;
  bad["dimension"] = 4;
  EXPECT_THROW(datum_config_from_json(bad), Error);
}

TEST(Config, DesignSolutionRoundTrip) {
  const DesignSolution s = canonical_design(3);
  const DesignSolution back = design_solution_from_json(Json::parse(to_json(s).dump()));
  EXPECT_EQ(back.mu, s.mu);
  EXPECT_EQ(back.lambdas, s.lambdas);
  EXPECT_EQ(back.alphas, s.alphas);
  EXPECT_EQ(back.T, s.T);
  EXPECT_EQ(back.c, s.c);
  EXPECT_TRUE(verify_design(back).passed());
}

TEST(Config, MomentsCsvRoundTripIsExact) {
  MomentTrajectory m;
  m.dimension = 3;
  for (int n = 0; n < 5; ++n) {
    Eigen::MatrixXd K(3, 3);
    K << 1.0 / 3 + n, 1e-17 * n, -2.0 / 7, 1e-17 * n, 0.1 * n, std::sqrt(2.0), -2.0 / 7, std::sqrt(2.0), -1e300;
    m.times.push_back(0.1 * n);
    m.K.push_back(K);
  }
  const fs::path p = fs::temp_directory_path() / "concdiff_moments_roundtrip.csv";
  write_moments_csv(p, m);
  const MomentTrajectory back = read_moments_csv(p);
  ASSERT_EQ(back.times, m.times);
  for (std::size_t n = 0; n < m.K.size(); ++n) EXPECT_EQ(back.K[n], m.K[n]);
}

TEST(Config, PipelineConfigParsing) {
  const Json j = {{"design", {{"times", {1.0, 2.0}}, {"gamma", 0.25}}}, {"delta", 0.125}, {"L", 512}, {"N", 256}};
  const PipelineConfig c = pipeline_config_from_json(j);
  EXPECT_EQ(c.design.times.size(), 2u);
  EXPECT_DOUBLE_EQ(c.resolved_t_end(), 4.0);
  EXPECT_FALSE(c.eta.has_value());
  EXPECT_NO_THROW(c.validate());
  const PipelineConfig back = pipeline_config_from_json(Json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back), to_json(c));

  Json unknown = j;
  unknown["detla"] = 0.1;
  EXPECT_THROW(pipeline_config_from_json(unknown), Error);
  PipelineConfig bad = c;
  bad.points = 63;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Config, CanonicalExamples) {
  const PipelineConfig c2 = canonical_example(2);
  EXPECT_EQ(c2.delta, 0.25);
  EXPECT_EQ(c2.box_length, 128.0);
  EXPECT_EQ(c2.points, 512);
  // max(2·t₁, t₁ + 0.1) with t₁ ≈ 0.0866
  EXPECT_DOUBLE_EQ(c2.resolved_t_end(), std::log(2.0) / 8.0 + 0.1);
  EXPECT_EQ(c2.resolved_bracket_halfwidth(), 0.02);
  const PipelineConfig c3 = canonical_example(3);
  EXPECT_EQ(c3.points, 96);
  EXPECT_EQ(c3.remainder_ratio, 0.2);
  EXPECT_THROW(canonical_example(4), Error);
}

TEST(Config, CheckRelations) {
  EXPECT_TRUE(make_check("s", "n", 1.0, "<=", 1.0).passed);
  EXPECT_FALSE(make_check("s", "n", 1.1, "<=", 1.0).passed);
  EXPECT_TRUE(make_check("s", "n", 0.96, ">=", 0.95).passed);
  EXPECT_TRUE(make_check("s", "n", -4.0, "==", -4.0).passed);
  EXPECT_FALSE(make_check("s", "n", 0.0, "true", 1.0).passed);
  EXPECT_FALSE(make_check("s", "n", std::nan(""), "<=", 1.0).passed);
  EXPECT_THROW(make_check("s", "n", 0.0, "<", 1.0), Error);
}
