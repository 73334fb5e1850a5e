#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "concdiff/config.hpp"
#include "concdiff/spectral_field.hpp"

namespace fs = std::filesystem;
using concdiff::Json;

namespace {

const fs::path kCli = CONCDIFF_CLI;
const fs::path kConfigs = fs::path(CONCDIFF_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("concdiff_cli_" + name);
  fs::remove_all(p);
  return p;
}

struct RunResult {
  int code = -1;
  std::string err;
};

RunResult run(const std::string& args, const fs::path& log) {
  const std::string cmd = kCli.string() + " " + args + " >" + log.string() + ".out 2>" + log.string() + ".err";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log.string() + ".err");
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, DesignWritesCanonicalRatio) {
  const fs::path out = scratch("design");
  const auto r = run("--out-dir " + out.string() + " design --times 0.08664339756999316 --gamma 4", out);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sol = concdiff::design_solution_from_json(concdiff::read_json_file(out / "design.json"));
  ASSERT_EQ(sol.lambdas.size(), 2u);
  EXPECT_NEAR(sol.lambdas[0] * sol.lambdas[0] / (sol.lambdas[1] * sol.lambdas[1]), 1.5, 1e-10);
  const Json manifest = concdiff::read_json_file(out / "manifest.json");
  EXPECT_TRUE(manifest.at("passed").get<bool>());
}

TEST(Cli, Design3dFromFilePassesVerification) {
  const fs::path out = scratch("design3d");
  const auto r = run("--out-dir " + out.string() + " --config " + (kConfigs / "design-3d.json").string() + " design", out);
  ASSERT_EQ(r.code, 0) << r.err;
  const Json report = concdiff::read_json_file(out / "design_report.json");
  EXPECT_TRUE(report.at("passed").get<bool>());
}

TEST(Cli, EmptyTimesIsUsageErrorWithoutArtifacts) {
  const fs::path out = scratch("empty");
  const auto r = run("--out-dir " + out.string() + " design", fs::temp_directory_path() / "concdiff_cli_empty_log");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("times"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, ManifestDirectoryIsAppendOnly) {
  const fs::path out = scratch("append");
  const std::string args = "--out-dir " + out.string() + " design --times 0.5";
  ASSERT_EQ(run(args, out).code, 0);
  const std::string before = slurp(out / "manifest.json");
  const auto again = run(args, fs::temp_directory_path() / "concdiff_cli_append_log");
  EXPECT_NE(again.code, 0);
  EXPECT_NE(again.err.find("append-only"), std::string::npos);
  EXPECT_EQ(slurp(out / "manifest.json"), before);
}

TEST(Cli, OverlappingSupportsFailAtFieldsStage) {
  const fs::path out = scratch("overlap");
  const auto r = run("--out-dir " + out.string() + " --config " + (kConfigs / "overlap-2d.json").string() + " pipeline",
                     fs::temp_directory_path() / "concdiff_cli_overlap_log");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("stage 'fields'"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("overlap"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, BuildDatumCheckpointRoundTrips) {
  const fs::path out = scratch("datum");
  const auto r = run("--out-dir " + out.string() + " --config " + (kConfigs / "datum-small-2d.json").string() +
                         " build-datum",
                     out);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto cfg = concdiff::datum_config_from_json(concdiff::read_json_file(out / "datum.json"));
  const auto expected = concdiff::assemble_spectral(cfg.spec, cfg.box_length, cfg.points);
  const auto got = concdiff::read_field(out / "datum.cdsf");
  ASSERT_EQ(got.mode_count(), expected.mode_count());
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < got.mode_count(); ++i) ASSERT_EQ(got.component(c)[i], expected.component(c)[i]);
}

TEST(Cli, SimulateThenFarfield) {
  const fs::path sim = scratch("simulate");
  auto r = run("--out-dir " + sim.string() + " --config " + (kConfigs / "datum-small-2d.json").string() +
                   " simulate --t-end 0.2",
               sim);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto moment = concdiff::read_moments_csv(sim / "moments.csv");
  EXPECT_NEAR(moment.times.back(), 0.2, 1e-12);
  EXPECT_TRUE(fs::exists(sim / "checkpoints" / "step_000000.cdsf"));

  const fs::path far = scratch("farfield");
  r = run("--out-dir " + far.string() + " farfield --moments " + (sim / "moments.csv").string() + " --at 0.2", far);
  ASSERT_EQ(r.code, 0) << r.err;
  const Json cls = concdiff::read_json_file(far / "classification.json");
  EXPECT_EQ(cls.at("per_time").size(), moment.times.size());
  EXPECT_EQ(cls.at("maps")[0].at("decay").at("exponent").get<int>(), -3);
  std::ifstream csv(far / "comega_1.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "omega1,omega2,g1,g2");
}

TEST(Cli, KatoPlainIsSlow) {
  const fs::path out = scratch("kato");
  const auto r = run("--out-dir " + out.string() + " kato --kind plain --t 1 --count 8", out);
  ASSERT_EQ(r.code, 0) << r.err;
  const Json v = concdiff::read_json_file(out / "verdict.json");
  EXPECT_EQ(v.at("verdict"), "slow-decay");
  EXPECT_LT(v.at("slope").get<double>(), -1.0);
}

TEST(Cli, TwoTimesPipelineReportsTwoBracketsDeterministically) {
  const fs::path a = scratch("two_a");
  const fs::path b = scratch("two_b");
  const std::string cfg = " --config " + (kConfigs / "two-times-2d.json").string() + " pipeline";
  auto r = run("--out-dir " + a.string() + cfg, a);
  ASSERT_EQ(r.code, 0) << r.err;
  r = run("--out-dir " + b.string() + cfg, b);
  ASSERT_EQ(r.code, 0) << r.err;

  const Json brackets = concdiff::read_json_file(a / "brackets.json").at("brackets");
  ASSERT_EQ(brackets.size(), 2u);
  const double targets[] = {1.0, 2.0};
  for (int i = 0; i < 2; ++i) {
    const Json& br = brackets[i].at("bracket");
    EXPECT_TRUE(br.at("found").get<bool>());
    EXPECT_LT(std::abs(br.at("t_star").get<double>() - targets[i]), 0.1);
  }

  int compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string name = entry.path().filename().string();
    if (name == "timings.json" || name.ends_with(".out") || name.ends_with(".err")) continue;
    EXPECT_EQ(slurp(entry.path()), slurp(b / name)) << name;
    ++compared;
  }
  EXPECT_GE(compared, 10);
}
