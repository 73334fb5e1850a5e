#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "concdiff/config.hpp"
#include "concdiff/correlation.hpp"
#include "concdiff/design.hpp"
#include "concdiff/farfield.hpp"
#include "concdiff/nsflow.hpp"

namespace concdiff {

/// An Error raised while running a named stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), "stage '" + stage + "': " + strip_kind(cause)), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  static std::string strip_kind(const Error& e);
  std::string stage_;
};

struct Check {
  std::string stage;
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  /// "<=", ">=", "==" (value against threshold) or "true".
  std::string relation = "<=";
  bool passed = false;
};

Check make_check(std::string stage, std::string name, double value, std::string relation, double threshold);
Json to_json(const Check& check);

/// One manifest per output directory. Construction refuses a directory that
/// already holds manifest.json; write() records outputs, checks and the
/// error (if any) and puts wall-clock timings in timings.json, keeping
/// manifest.json itself reproducible.
class RunManifest {
 public:
  RunManifest(std::string subcommand, std::filesystem::path out_dir);

  const std::filesystem::path& out_dir() const { return out_dir_; }
  std::filesystem::path path(const std::string& name) const { return out_dir_ / name; }

  void set_parameters(Json parameters) { parameters_ = std::move(parameters); }
  /// Registers an artifact (relative name) under a stage; each name at most once.
  void add_output(const std::string& stage, const std::string& name);
  void add_check(Check check);
  void add_checks(const std::vector<Check>& checks);
  void set_error(const std::string& stage, const std::string& message);
  void add_timing(const std::string& stage, double seconds);

  const std::vector<Check>& checks() const { return checks_; }
  bool has_error() const { return !error_.is_null(); }
  bool passed() const;
  std::vector<Check> failed_checks() const;
  void write();

  static constexpr const char* kDefaultsVersion = "1";

 private:
  std::string subcommand_;
  std::filesystem::path out_dir_;
  Json parameters_ = Json::object();
  Json outputs_ = Json::array();
  Json error_;
  Json timings_ = Json::object();
  std::vector<Check> checks_;
};

/// Times a stage into a manifest on destruction.
class StageTimer {
 public:
  StageTimer(RunManifest& manifest, std::string stage);
  ~StageTimer();

 private:
  RunManifest& manifest_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

struct PipelineConfig {
  DesignProblem design;
  /// Replaces the design's phases when present (λ, α used verbatim).
  std::optional<std::vector<ModulationTerm>> terms;
  double delta = 0.25;
  std::string profile = "bump";
  /// Calibrated when absent.
  std::optional<double> eta;
  double box_length = 128.0;
  int points = 512;
  /// Defaults to max(2·t_N, t_N + 0.1).
  std::optional<double> t_end;
  std::optional<double> dt;
  int snapshot_stride = 8;
  double tolerance = kDefaultIdentityTolerance;
  int sphere_samples = 4096;
  double flip_offset = 0.05;
  double comega_threshold = 1e-3;
  double min_positive_fraction = 0.95;
  /// Half-width of the K₁₂ zero search window around t_i; defaults to ε.
  std::optional<double> bracket_halfwidth;
  int correlation_samples = 256;
  bool oracle = false;
  double remainder_ratio = 0.1;
  int refine_factor = 16;
  double invariant_tolerance = 1e-10;
  double moment_tolerance = 1e-8;

  double resolved_t_end() const;
  double resolved_bracket_halfwidth() const;
  /// Throws ErrorKind::Configuration naming the offending key.
  void validate() const;
};

Json to_json(const PipelineConfig& config);
/// Keys mirror the struct fields; "design" holds a DesignProblem object and
/// "terms" an array of {lambda, alpha}. L and N default per dimension.
PipelineConfig pipeline_config_from_json(const Json& j);

/// The N = 1 example with t₁ = ⅛ log 2 and γ = 4: 2D δ = 1/4 on 128/512,
/// 3D δ = 1/2 on 64/96 with the looser remainder ratio 0.2.
PipelineConfig canonical_example(int dimension);

struct BracketReport {
  double target = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  ZeroBracket bracket;
};

struct FlipReport {
  double time = 0.0;
  DecayClass decay;
  std::optional<double> positive_fraction;
};

struct PipelineResult {
  DesignSolution design;
  DatumSpec spec;
  double eta = 0.0;
  std::optional<CalibrationResult> calibration;
  std::vector<BracketReport> brackets;
  std::vector<FlipReport> flips;
  std::vector<Check> checks;
  bool passed = false;
};

/// Runs design → fields → correlation → calibration → nsflow → brackets →
/// farfield, persisting every intermediate artifact in out_dir. The config
/// is validated and the datum assembled before anything is written.
/// Stage failures throw StageError after the manifest has been written.
PipelineResult run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir,
                            const std::string& subcommand = "pipeline");

Json to_json(const ZeroBracket& bracket);
Json to_json(const DecayClass& decay);
Json to_json(const CalibrationResult& calibration);
Json to_json(const SignChange& change);

/// Header omega1,omega2[,omega3],g1,g2[,g3].
void write_comega_csv(const std::filesystem::path& path, const COmegaMap& map);
/// Header t,E_closed,E_oracle,E_app; absent oracle values print as nan.
void write_correlation_csv(const std::filesystem::path& path, const std::vector<double>& times,
                           const std::vector<double>& closed, const std::vector<double>& oracle,
                           const std::vector<double>& limit);

}  // namespace concdiff
