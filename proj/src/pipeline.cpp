#include "concdiff/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "concdiff/profile.hpp"
#include "concdiff/spectral_field.hpp"

namespace concdiff {

std::string StageError::strip_kind(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = std::string(to_string(e.kind())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

Check make_check(std::string stage, std::string name, double value, std::string relation, double threshold) {
  Check c{std::move(stage), std::move(name), value, threshold, std::move(relation), false};
  if (c.relation == "<=") c.passed = value <= threshold;
  else if (c.relation == ">=") c.passed = value >= threshold;
  else if (c.relation == "==") c.passed = value == threshold;
  else if (c.relation == "true") c.passed = value != 0.0;
  else throw Error(ErrorKind::Configuration, "unknown check relation '" + c.relation + "'");
  return c;
}

Json to_json(const Check& c) {
  return {{"stage", c.stage},         {"name", c.name},     {"value", c.value},
          {"threshold", c.threshold}, {"relation", c.relation}, {"passed", c.passed}};
}

// ---------------------------------------------------------------- manifest

RunManifest::RunManifest(std::string subcommand, std::filesystem::path out_dir)
    : subcommand_(std::move(subcommand)), out_dir_(std::move(out_dir)) {
  if (std::filesystem::exists(out_dir_ / "manifest.json")) {
    throw Error(ErrorKind::Io, out_dir_.string() + " already holds a manifest; manifests are append-only");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + out_dir_.string() + ": " + ec.message());
}

void RunManifest::add_output(const std::string& stage, const std::string& name) {
  for (const auto& o : outputs_) {
    if (o.at("path") == name) throw Error(ErrorKind::Io, "artifact '" + name + "' registered twice");
  }
  outputs_.push_back({{"stage", stage}, {"path", name}});
}

void RunManifest::add_check(Check check) { checks_.push_back(std::move(check)); }

void RunManifest::add_checks(const std::vector<Check>& checks) {
  for (const auto& c : checks) checks_.push_back(c);
}

void RunManifest::set_error(const std::string& stage, const std::string& message) {
  error_ = {{"stage", stage}, {"message", message}};
}

void RunManifest::add_timing(const std::string& stage, double seconds) {
  timings_[stage] = timings_.value(stage, 0.0) + seconds;
}

bool RunManifest::passed() const {
  return !has_error() && std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
}

std::vector<Check> RunManifest::failed_checks() const {
  std::vector<Check> out;
  for (const auto& c : checks_)
    if (!c.passed) out.push_back(c);
  return out;
}

void RunManifest::write() {
  add_output("manifest", "timings.json");
  Json checks = Json::array();
  for (const auto& c : checks_) checks.push_back(to_json(c));
  Json m = {{"subcommand", subcommand_}, {"defaults_version", kDefaultsVersion},
            {"parameters", parameters_},  {"checks", checks},
            {"outputs", outputs_},        {"passed", passed()},
            {"error", error_},            {"timings_file", "timings.json"}};
  write_json_file(out_dir_ / "timings.json", {{"wall_clock_seconds", timings_}});
  write_json_file(out_dir_ / "manifest.json", m);
}

StageTimer::StageTimer(RunManifest& manifest, std::string stage)
    : manifest_(manifest), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}

StageTimer::~StageTimer() {
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
  manifest_.add_timing(stage_, elapsed.count());
}

// ------------------------------------------------------------------ config

double PipelineConfig::resolved_t_end() const {
  if (t_end) return *t_end;
  const double tn = design.times.empty() ? 0.0 : design.times.back();
  return std::max(2.0 * tn, tn + 0.1);
}

double PipelineConfig::resolved_bracket_halfwidth() const {
  return bracket_halfwidth ? *bracket_halfwidth : design.resolved_epsilon();
}

void PipelineConfig::validate() const {
  auto bad = [](const std::string& key, const std::string& why) {
    throw Error(ErrorKind::Configuration, key + ": " + why);
  };
  if (!(delta > 0.0)) bad("delta", "must be positive");
  if (eta && !(*eta > 0.0)) bad("eta", "must be positive");
  if (!(box_length > 0.0)) bad("L", "must be positive");
  if (points < 4 || points % 2 != 0) bad("N", "must be an even number of at least 4");
  if (t_end && !(*t_end > 0.0)) bad("t_end", "must be positive");
  if (dt && !(*dt > 0.0)) bad("dt", "must be positive");
  if (snapshot_stride < 0) bad("snapshot_stride", "must be nonnegative");
  if (!(tolerance > 0.0)) bad("tolerance", "must be positive");
  if (sphere_samples < 8) bad("sphere_samples", "must be at least 8");
  if (!(flip_offset > 0.0)) bad("flip_offset", "must be positive");
  if (!(comega_threshold > 0.0 && comega_threshold < 1.0)) bad("comega_threshold", "must lie in (0, 1)");
  if (bracket_halfwidth && !(*bracket_halfwidth > 0.0)) bad("bracket_halfwidth", "must be positive");
  if (correlation_samples < 8) bad("correlation_samples", "must be at least 8");
  if (!(remainder_ratio > 0.0)) bad("remainder_ratio", "must be positive");
  if (refine_factor < 2) bad("refine_factor", "must be at least 2");
  if (terms && terms->empty()) bad("terms", "must not be empty when given");
  if (!design.times.empty() && resolved_t_end() <= design.times.back()) bad("t_end", "must exceed the last time");
}

namespace {

const std::set<std::string> kPipelineKeys = {
    "design",           "terms",         "delta",          "profile",           "eta",
    "L",                "N",             "t_end",          "dt",                "snapshot_stride",
    "tolerance",        "sphere_samples", "flip_offset",   "comega_threshold",  "min_positive_fraction",
    "bracket_halfwidth", "correlation_samples", "oracle", "remainder_ratio",   "refine_factor",
    "invariant_tolerance", "moment_tolerance"};

template <class T>
Json opt_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <class T>
std::optional<T> opt_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return detail::json_required<T>(j, key);
}

}  // namespace

Json to_json(const PipelineConfig& c) {
  Json j = {{"design", to_json(c.design)},
            {"delta", c.delta},
            {"profile", c.profile},
            {"eta", opt_json(c.eta)},
            {"L", c.box_length},
            {"N", c.points},
            {"t_end", opt_json(c.t_end)},
            {"dt", opt_json(c.dt)},
            {"snapshot_stride", c.snapshot_stride},
            {"tolerance", c.tolerance},
            {"sphere_samples", c.sphere_samples},
            {"flip_offset", c.flip_offset},
            {"comega_threshold", c.comega_threshold},
            {"min_positive_fraction", c.min_positive_fraction},
            {"bracket_halfwidth", opt_json(c.bracket_halfwidth)},
            {"correlation_samples", c.correlation_samples},
            {"oracle", c.oracle},
            {"remainder_ratio", c.remainder_ratio},
            {"refine_factor", c.refine_factor},
            {"invariant_tolerance", c.invariant_tolerance},
            {"moment_tolerance", c.moment_tolerance}};
  j["terms"] = c.terms ? terms_to_json(*c.terms, c.design.dimension) : Json(nullptr);
  return j;
}

PipelineConfig pipeline_config_from_json(const Json& j) {
  using detail::json_optional;
  if (!j.is_object()) throw Error(ErrorKind::Configuration, "pipeline config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kPipelineKeys.count(key)) throw Error(ErrorKind::Configuration, "unknown key '" + key + "'");
  }
  if (!j.contains("design")) throw Error(ErrorKind::Configuration, "missing key 'design'");
  PipelineConfig c;
  c.design = design_problem_from_json(j.at("design"));
  const int d = c.design.dimension;
  if (j.contains("terms") && !j.at("terms").is_null()) c.terms = terms_from_json(j.at("terms"), d);
  c.delta = json_optional<double>(j, "delta", default_delta(d));
  c.profile = json_optional<std::string>(j, "profile", "bump");
  c.eta = opt_from<double>(j, "eta");
  c.box_length = json_optional<double>(j, "L", default_box_length(d));
  c.points = json_optional<int>(j, "N", default_points(d));
  c.t_end = opt_from<double>(j, "t_end");
  c.dt = opt_from<double>(j, "dt");
  c.snapshot_stride = json_optional<int>(j, "snapshot_stride", c.snapshot_stride);
  c.tolerance = json_optional<double>(j, "tolerance", c.tolerance);
  c.sphere_samples = json_optional<int>(j, "sphere_samples", c.sphere_samples);
  c.flip_offset = json_optional<double>(j, "flip_offset", c.flip_offset);
  c.comega_threshold = json_optional<double>(j, "comega_threshold", c.comega_threshold);
  c.min_positive_fraction = json_optional<double>(j, "min_positive_fraction", c.min_positive_fraction);
  c.bracket_halfwidth = opt_from<double>(j, "bracket_halfwidth");
  c.correlation_samples = json_optional<int>(j, "correlation_samples", c.correlation_samples);
  c.oracle = json_optional<bool>(j, "oracle", c.oracle);
  c.remainder_ratio = json_optional<double>(j, "remainder_ratio", c.remainder_ratio);
  c.refine_factor = json_optional<int>(j, "refine_factor", c.refine_factor);
  c.invariant_tolerance = json_optional<double>(j, "invariant_tolerance", c.invariant_tolerance);
  c.moment_tolerance = json_optional<double>(j, "moment_tolerance", c.moment_tolerance);
  return c;
}

PipelineConfig canonical_example(int dimension) {
  if (dimension != 2 && dimension != 3) throw Error(ErrorKind::Configuration, "dimension must be 2 or 3");
  PipelineConfig c;
  c.design.dimension = dimension;
  c.design.times = {std::log(2.0) / 8.0};
  c.design.gamma = 4.0;
  c.delta = default_delta(dimension);
  c.box_length = default_box_length(dimension);
  c.points = default_points(dimension);
  c.bracket_halfwidth = dimension == 2 ? 0.02 : 0.05;
  if (dimension == 3) c.remainder_ratio = 0.2;
  return c;
}

// ------------------------------------------------------------ serialization

Json to_json(const ZeroBracket& b) {
  Json j = {{"found", b.found},
            {"t_lo", b.t_lo},
            {"t_hi", b.t_hi},
            {"k12_lo", b.k12_lo},
            {"k12_hi", b.k12_hi},
            {"k12_min", b.k12_min},
            {"k12_max", b.k12_max},
            {"sign_changes", b.sign_changes},
            {"refined", b.refined}};
  if (b.found) {
    j["t_star"] = b.t_star;
    Json K = Json::array();
    for (Eigen::Index r = 0; r < b.K_star.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < b.K_star.cols(); ++c) row.push_back(b.K_star(r, c));
      K.push_back(row);
    }
    j["K_star"] = K;
  }
  return j;
}

Json to_json(const DecayClass& d) {
  return {{"exponent", d.exponent},
          {"off_diagonal", d.off_diagonal},
          {"diagonal_spread", d.diagonal_spread},
          {"deviation", d.deviation},
          {"tolerance", d.tolerance}};
}

Json to_json(const CalibrationResult& c) {
  Json history = Json::array();
  for (const auto& s : c.history)
    history.push_back({{"eta", s.eta}, {"remainder", s.remainder}, {"scale", s.scale}, {"accepted", s.accepted}});
  return {{"eta", c.eta}, {"eta0", c.eta0}, {"fnorm_unit", c.fnorm_unit}, {"converged", c.converged},
          {"history", history}};
}

Json to_json(const SignChange& s) {
  return {{"t_lo", s.t_lo}, {"t_hi", s.t_hi}, {"f_lo", s.f_lo}, {"f_hi", s.f_hi}};
}

void write_comega_csv(const std::filesystem::path& path, const COmegaMap& map) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  const int d = map.dimension;
  for (int i = 0; i < d; ++i) out << "omega" << i + 1 << ',';
  for (int i = 0; i < d; ++i) out << 'g' << i + 1 << (i + 1 < d ? "," : "\n");
  for (std::size_t n = 0; n < map.directions.size(); ++n) {
    for (int i = 0; i < d; ++i) out << format_double(map.directions[n][i]) << ',';
    for (int i = 0; i < d; ++i) out << format_double(map.magnitudes[n][i]) << (i + 1 < d ? "," : "\n");
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_correlation_csv(const std::filesystem::path& path, const std::vector<double>& times,
                           const std::vector<double>& closed, const std::vector<double>& oracle,
                           const std::vector<double>& limit) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "t,E_closed,E_oracle,E_app\n";
  for (std::size_t n = 0; n < times.size(); ++n) {
    out << format_double(times[n]) << ',' << format_double(closed[n]) << ','
        << format_double(n < oracle.size() ? oracle[n] : std::nan("")) << ',' << format_double(limit[n]) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

// ---------------------------------------------------------------- pipeline

namespace {

template <class F>
auto validation_stage(const char* stage, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

std::size_t nearest_index(const std::vector<double>& times, double t) {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return times.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  return (t - times[hi - 1] <= times[hi] - t) ? hi - 1 : hi;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, const std::filesystem::path& out_dir,
                            const std::string& subcommand) {
  PipelineResult result;
  const int d = config.design.dimension;

  // Everything that can be rejected up front is rejected before writing.
  validation_stage("config", [&] {
    config.validate();
    return 0;
  });
  result.design = validation_stage("design", [&] {
    config.design.validate();
    return solve_design(config.design);
  });
  const SpectralField unit_field = validation_stage("fields", [&] {
    const BumpProfile profile = named_profile(config.profile, d);
    result.spec = datum_from_design(result.design, config.delta, 1.0, profile);
    if (config.terms) result.spec.terms = *config.terms;
    validate(result.spec);
    SpectralField f = assemble_spectral(result.spec, config.box_length, config.points);
    require_in_band(f);
    return f;
  });

  const double t_end = config.resolved_t_end();
  const double halfwidth = config.resolved_bracket_halfwidth();
  const double epsilon = config.design.resolved_epsilon();

  RunManifest manifest(subcommand, out_dir);
  Json params = to_json(config);
  params["resolved"] = {{"t_end", t_end}, {"bracket_halfwidth", halfwidth}, {"epsilon", epsilon}};
  manifest.set_parameters(params);

  auto stage = [&](const char* name, auto&& body) {
    StageTimer timer(manifest, name);
    try {
      body();
    } catch (const Error& e) {
      manifest.set_error(name, e.what());
      manifest.write();
      throw StageError(name, e);
    }
  };

  stage("design", [&] {
    const DesignReport report = verify_design(result.design);
    write_json_file(manifest.path("design.json"), to_json(result.design));
    write_json_file(manifest.path("design_report.json"), to_json(report));
    manifest.add_output("design", "design.json");
    manifest.add_output("design", "design_report.json");
    for (const auto& c : report.checks)
      manifest.add_check(make_check("design", c.name, c.passed ? 1.0 : 0.0, "true", 1.0));
  });

  stage("fields", [&] {
    write_field(manifest.path("datum_unit.cdsf"), unit_field);
    manifest.add_output("fields", "datum_unit.cdsf");
    manifest.add_check(make_check("fields", "divergence_free", check_divergence_free(unit_field), "<=",
                                  config.invariant_tolerance));
    manifest.add_check(make_check("fields", "tilde_symmetry", symmetry_residual_relative(unit_field), "<=",
                                  config.invariant_tolerance));
  });

  stage("correlation", [&] {
    const ClosedFormCorrelation E(result.spec);
    std::vector<double> times, closed, oracle, limit;
    for (int n = 0; n <= config.correlation_samples; ++n) {
      const double t = t_end * n / config.correlation_samples;
      times.push_back(t);
      closed.push_back(E(t));
      limit.push_back(eval_E_limit(result.spec, t));
    }
    if (config.oracle) {
      oracle = eval_E_oracle(result.spec, times);
      double worst = 0.0;
      for (std::size_t n = 0; n < times.size(); ++n)
        worst = std::max(worst, std::abs(closed[n] - oracle[n]) / std::max(1.0, std::abs(closed[n])));
      manifest.add_check(make_check("correlation", "oracle_agreement", worst, "<=", 1e-6));
    }
    write_correlation_csv(manifest.path("correlation.csv"), times, closed, oracle, limit);
    manifest.add_output("correlation", "correlation.csv");

    const auto f = [&](double t) { return E(t); };
    Json crossings = Json::array();
    for (const auto& s : find_sign_changes(f, t_end / config.correlation_samples, t_end, 1e-10,
                                           config.correlation_samples))
      crossings.push_back(to_json(s));
    Json windows = Json::array();
    for (std::size_t i = 0; i < result.design.times.size(); ++i) {
      const double ti = result.design.times[i];
      const auto changes = find_sign_changes(f, std::max(0.0, ti - epsilon), ti + epsilon, 1e-10);
      windows.push_back({{"t", ti}, {"epsilon", epsilon}, {"sign_changes", changes.size()}});
      manifest.add_check(make_check("correlation", "E_sign_changes_near_t" + std::to_string(i + 1),
                                    static_cast<double>(changes.size()), "==", 1.0));
    }
    write_json_file(manifest.path("crossings.json"), {{"crossings", crossings}, {"windows", windows}});
    manifest.add_output("correlation", "crossings.json");
  });

  SimulationOptions sim;
  sim.t_end = t_end;
  sim.dt = config.dt;
  sim.snapshot_stride = config.snapshot_stride;
  sim.box_length = config.box_length;
  sim.points = config.points;

  stage("calibration", [&] {
    if (config.eta) {
      result.eta = *config.eta;
    } else {
      CalibrationOptions options;
      options.t_end = t_end;
      options.ratio = config.remainder_ratio;
      options.simulation = sim;
      result.calibration = calibrate_eta(result.spec, options);
      result.eta = result.calibration->eta;
      manifest.add_check(
          make_check("calibration", "converged", result.calibration->converged ? 1.0 : 0.0, "true", 1.0));
    }
    Json j = result.calibration ? to_json(*result.calibration) : Json{{"eta", result.eta}, {"given", true}};
    write_json_file(manifest.path("calibration.json"), j);
    manifest.add_output("calibration", "calibration.json");
    DatumConfig datum{result.spec, config.box_length, config.points};
    datum.spec.eta = result.eta;
    write_json_file(manifest.path("datum.json"), to_json(datum));
    manifest.add_output("calibration", "datum.json");
  });

  FlowTrajectory traj;
  MomentTrajectory moment;
  stage("nsflow", [&] {
    SpectralField u0 = unit_field;
    u0 *= result.eta;
    traj = simulate_field(u0, sim);
    moment = accumulate_K(traj);
    write_moments_csv(manifest.path("moments.csv"), moment);
    manifest.add_output("nsflow", "moments.csv");
    write_field(manifest.path("final.cdsf"), traj.final_state());
    manifest.add_output("nsflow", "final.cdsf");
    const auto [rem, scale] = second_order_remainder(moment, unit_field, result.eta);
    manifest.add_check(make_check("nsflow", "divergence_free", traj.max_divergence(), "<=", config.invariant_tolerance));
    manifest.add_check(make_check("nsflow", "tilde_symmetry", traj.max_symmetry(), "<=", config.invariant_tolerance));
    manifest.add_check(
        make_check("nsflow", "diagonal_moments_equal", traj.max_diagonal_spread(), "<=", config.moment_tolerance));
    manifest.add_check(
        make_check("nsflow", "energy_nonincreasing", traj.max_energy_increase(), "<=", config.moment_tolerance));
    manifest.add_check(make_check("nsflow", "second_order_remainder_ratio", scale > 0.0 ? rem / scale : rem, "<=",
                                  config.remainder_ratio));
  });

  stage("brackets", [&] {
    Json out = Json::array();
    for (std::size_t i = 0; i < result.design.times.size(); ++i) {
      BracketReport br;
      br.target = result.design.times[i];
      br.window_lo = std::max(0.0, br.target - halfwidth);
      br.window_hi = std::min(t_end, br.target + halfwidth);
      br.bracket = find_zero_K12(moment, br.window_lo, br.window_hi);
      if (br.bracket.found) br.bracket = refine_zero_K12(traj, moment, br.bracket, config.refine_factor);
      manifest.add_check(make_check("brackets", "K12_sign_change_near_t" + std::to_string(i + 1),
                                    br.bracket.found ? 1.0 : 0.0, "true", 1.0));
      out.push_back({{"target", br.target},
                     {"window", {br.window_lo, br.window_hi}},
                     {"bracket", to_json(br.bracket)}});
      result.brackets.push_back(br);
    }
    write_json_file(manifest.path("brackets.json"), {{"brackets", out}});
    manifest.add_output("brackets", "brackets.json");
  });

  stage("farfield", [&] {
    Json per_time = Json::array();
    for (const auto& p : classify_trajectory(moment, config.tolerance))
      per_time.push_back({{"t", p.time}, {"decay", to_json(p.decay)}});
    Json flips = Json::array();
    const int concentrated = -(d + 2);
    const int diffuse = -(d + 1);
    for (std::size_t i = 0; i < result.brackets.size(); ++i) {
      const auto& b = result.brackets[i].bracket;
      if (!b.found) continue;
      const std::string tag = "t" + std::to_string(i + 1);
      FlipReport at{b.t_star, classify_decay(b.K_star, config.tolerance), std::nullopt};
      manifest.add_check(make_check("farfield", "concentrated_at_zero_" + tag, at.decay.exponent, "==", concentrated));
      result.flips.push_back(at);
      Json entry = {{"t_star", b.t_star}, {"at_zero", to_json(at.decay)}};
      for (const auto& [side, sign] : {std::pair{"minus", -1.0}, std::pair{"plus", 1.0}}) {
        const double t = b.t_star + sign * config.flip_offset;
        if (t < 0.0 || t > t_end) {
          manifest.add_check(make_check("farfield", std::string("offset_inside_run_") + side + "_" + tag, t, sign < 0 ? ">=" : "<=",
                                        sign < 0 ? 0.0 : t_end));
          continue;
        }
        const std::size_t n = nearest_index(moment.times, t);
        FlipReport fr{moment.times[n], classify_decay(moment.K[n], config.tolerance), std::nullopt};
        manifest.add_check(
            make_check("farfield", std::string("diffuse_") + side + "_" + tag, fr.decay.exponent, "==", diffuse));
        Json side_entry = {{"t", fr.time}, {"decay", to_json(fr.decay)}};
        if (fr.decay.exponent == diffuse) {
          const COmegaMap map = c_omega_map(moment.K[n], config.sphere_samples, config.comega_threshold, config.tolerance);
          fr.positive_fraction = map.positive_fraction;
          const std::string file = "comega_" + tag + "_" + side + ".csv";
          write_comega_csv(manifest.path(file), map);
          manifest.add_output("farfield", file);
          side_entry["positive_fraction"] = map.positive_fraction;
          side_entry["comega_file"] = file;
          manifest.add_check(make_check("farfield", std::string("comega_positive_") + side + "_" + tag,
                                        map.positive_fraction, ">=", config.min_positive_fraction));
        }
        entry[side] = side_entry;
        result.flips.push_back(fr);
      }
      flips.push_back(entry);
    }
    write_json_file(manifest.path("classification.json"), {{"per_time", per_time}, {"flips", flips}});
    manifest.add_output("farfield", "classification.json");
  });

  result.checks = manifest.checks();
  result.passed = manifest.passed();
  Json failed = Json::array();
  for (const auto& c : manifest.failed_checks()) failed.push_back(to_json(c));
  Json brackets = Json::array();
  for (const auto& b : result.brackets)
    brackets.push_back({{"target", b.target}, {"found", b.bracket.found}, {"t_lo", b.bracket.t_lo},
                        {"t_hi", b.bracket.t_hi}, {"t_star", b.bracket.t_star}});
  write_json_file(manifest.path("report.json"),
                  {{"passed", result.passed}, {"eta", result.eta}, {"brackets", brackets}, {"failed_checks", failed}});
  manifest.add_output("report", "report.json");
  manifest.write();
  return result;
}

}  // namespace concdiff
