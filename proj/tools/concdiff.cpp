#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "concdiff/config.hpp"
#include "concdiff/correlation.hpp"
#include "concdiff/design.hpp"
#include "concdiff/farfield.hpp"
#include "concdiff/fft.hpp"
#include "concdiff/nsflow.hpp"
#include "concdiff/oscillatory.hpp"
#include "concdiff/pipeline.hpp"
#include "concdiff/profile.hpp"
#include "concdiff/spectral_field.hpp"

using namespace concdiff;

namespace {

// Exit codes: 0 all checks passed, 1 a check failed, 2 invalid input, 3 a stage failed.
constexpr int kChecksFailed = 1;
constexpr int kInvalidInput = 2;
constexpr int kStageFailed = 3;

struct Common {
  std::string out_dir = "concdiff-out";
  int threads = 1;
  std::optional<double> tolerance;
  std::string config;
};

/// Input errors found before any artifact is written.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int finish(RunManifest& manifest) {
  manifest.write();
  for (const auto& c : manifest.failed_checks()) {
    std::cerr << "FAILED " << c.stage << "/" << c.name << ": " << c.value << " " << c.relation << " " << c.threshold
              << "\n";
  }
  std::cout << (manifest.passed() ? "all checks passed" : "some checks failed") << " (" << manifest.out_dir().string()
            << "/manifest.json)\n";
  return manifest.passed() ? 0 : kChecksFailed;
}

template <class F>
auto validated(const char* stage, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

/// Runs a stage body, recording a failure in the manifest before rethrowing.
template <class F>
void run_stage(RunManifest& manifest, const char* stage, F&& f) {
  StageTimer timer(manifest, stage);
  try {
    f();
  } catch (const Error& e) {
    manifest.set_error(stage, e.what());
    manifest.write();
    throw StageError(stage, e);
  }
}

// ------------------------------------------------------------------ design

struct DesignArgs {
  std::vector<double> times;
  std::optional<double> epsilon;
  double gamma = 4.0;
  std::optional<double> c;
  int dimension = 2;
};

int cmd_design(const Common& common, const DesignArgs& args) {
  DesignProblem problem;
  if (!common.config.empty()) {
    problem = design_problem_from_json(read_json_file(common.config));
  } else {
    problem.times = args.times;
    problem.epsilon = args.epsilon;
    problem.gamma = args.gamma;
    problem.c = args.c;
    problem.dimension = args.dimension;
  }
  if (problem.times.empty()) throw UsageError("times: at least one time is required");
  const DesignSolution solution = validated("design", [&] {
    problem.validate();
    return solve_design(problem);
  });

  RunManifest manifest("design", common.out_dir);
  manifest.set_parameters(to_json(problem));
  run_stage(manifest, "design", [&] {
    const DesignReport report = verify_design(solution);
    write_json_file(manifest.path("design.json"), to_json(solution));
    write_json_file(manifest.path("design_report.json"), to_json(report));
    manifest.add_output("design", "design.json");
    manifest.add_output("design", "design_report.json");
    for (const auto& c : report.checks)
      manifest.add_check(make_check("design", c.name, c.passed ? 1.0 : 0.0, "true", 1.0));
  });
  return finish(manifest);
}

// ------------------------------------------------------------- build-datum

struct DatumArgs {
  std::string design;
  std::optional<double> delta;
  std::string profile = "bump";
  double eta = 1.0;
  std::optional<double> box_length;
  std::optional<int> points;
};

/// A datum from --config (datum JSON) or from --design plus datum flags.
/// Returns the design too when one was given.
DatumConfig load_datum(const Common& common, const DatumArgs& args, std::optional<DesignSolution>* design = nullptr) {
  if (common.config.empty() == args.design.empty()) {
    throw UsageError("give exactly one of --config (datum JSON) and --design (design JSON)");
  }
  DatumConfig datum;
  if (!common.config.empty()) {
    datum = datum_config_from_json(read_json_file(common.config));
  } else {
    const DesignSolution sol = design_solution_from_json(read_json_file(args.design));
    const int d = sol.dimension;
    const double delta = args.delta.value_or(default_delta(d));
    datum.spec = datum_from_design(sol, delta, args.eta, named_profile(args.profile, d));
    datum.box_length = default_box_length(d);
    datum.points = default_points(d);
    if (design) *design = sol;
  }
  if (args.box_length) datum.box_length = *args.box_length;
  if (args.points) datum.points = *args.points;
  return datum;
}

int cmd_build_datum(const Common& common, const DatumArgs& args) {
  const DatumConfig datum = load_datum(common, args);
  const SpectralField field = validated("fields", [&] {
    validate(datum.spec);
    return assemble_spectral(datum.spec, datum.box_length, datum.points);
  });
  RunManifest manifest("build-datum", common.out_dir);
  manifest.set_parameters(to_json(datum));
  run_stage(manifest, "fields", [&] {
    write_json_file(manifest.path("datum.json"), to_json(datum));
    manifest.add_output("fields", "datum.json");
    write_field(manifest.path("datum.cdsf"), field);
    manifest.add_output("fields", "datum.cdsf");
    manifest.add_check(make_check("fields", "divergence_free", check_divergence_free(field), "<=", 1e-10));
    manifest.add_check(make_check("fields", "tilde_symmetry", symmetry_residual_relative(field), "<=", 1e-10));
    bool in_band = true;
    try {
      require_in_band(field);
    } catch (const Error&) {
      in_band = false;
    }
    manifest.add_check(make_check("fields", "inside_dealias_band", in_band ? 1.0 : 0.0, "true", 1.0));
  });
  return finish(manifest);
}

// --------------------------------------------------------------- correlate

struct CorrelateArgs {
  DatumArgs datum;
  std::optional<double> t_end;
  int samples = 256;
  bool oracle = false;
  double oracle_box = 512.0;
  int oracle_points = 1024;
  int oracle_steps = 256;
};

int cmd_correlate(const Common& common, const CorrelateArgs& args) {
  std::optional<DesignSolution> design;
  const DatumConfig datum = load_datum(common, args.datum, &design);
  if (args.samples < 8) throw UsageError("samples: must be at least 8");
  double t_end = 1.0;
  if (design) t_end = std::max(2.0 * design->times.back(), design->times.back() + 0.1);
  if (args.t_end) t_end = *args.t_end;
  if (!(t_end > 0.0)) throw UsageError("t-end: must be positive");
  validated("fields", [&] {
    validate(datum.spec);
    return 0;
  });

  RunManifest manifest("correlate", common.out_dir);
  Json params = to_json(datum);
  params["t_end"] = t_end;
  params["samples"] = args.samples;
  params["oracle"] = args.oracle;
  manifest.set_parameters(params);
  run_stage(manifest, "correlation", [&] {
    const ClosedFormCorrelation E(datum.spec);
    std::vector<double> times, closed, oracle, limit;
    for (int n = 0; n <= args.samples; ++n) {
      times.push_back(t_end * n / args.samples);
      closed.push_back(E(times.back()));
      limit.push_back(eval_E_limit(datum.spec, times.back()));
    }
    if (args.oracle) {
      oracle = eval_E_oracle(datum.spec, times, {args.oracle_steps, args.oracle_box, args.oracle_points});
      double worst = 0.0;
      for (std::size_t n = 0; n < times.size(); ++n)
        worst = std::max(worst, std::abs(closed[n] - oracle[n]) / std::max(1.0, std::abs(closed[n])));
      manifest.add_check(make_check("correlation", "oracle_agreement", worst, "<=", 1e-6));
    }
    write_correlation_csv(manifest.path("correlation.csv"), times, closed, oracle, limit);
    manifest.add_output("correlation", "correlation.csv");
    const auto f = [&](double t) { return E(t); };
    Json crossings = Json::array();
    for (const auto& s : find_sign_changes(f, t_end / args.samples, t_end, 1e-10, args.samples))
      crossings.push_back(to_json(s));
    Json summary = {{"crossings", crossings}};
    if (design) {
      Json windows = Json::array();
      for (std::size_t i = 0; i < design->times.size(); ++i) {
        const double ti = design->times[i];
        const auto changes = find_sign_changes(f, std::max(0.0, ti - design->epsilon), ti + design->epsilon, 1e-10);
        windows.push_back({{"t", ti}, {"epsilon", design->epsilon}, {"sign_changes", changes.size()}});
        manifest.add_check(make_check("correlation", "E_sign_changes_near_t" + std::to_string(i + 1),
                                      static_cast<double>(changes.size()), "==", 1.0));
      }
      summary["windows"] = windows;
    }
    write_json_file(manifest.path("crossings.json"), summary);
    manifest.add_output("correlation", "crossings.json");
  });
  return finish(manifest);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  DatumArgs datum;
  std::optional<double> eta;
  std::optional<double> t_end;
  std::optional<double> dt;
  int snapshot_stride = 8;
};

int cmd_simulate(const Common& common, const SimulateArgs& args) {
  DatumConfig datum = load_datum(common, args.datum);
  if (args.eta) datum.spec.eta = *args.eta;
  if (!args.t_end || !(*args.t_end > 0.0)) throw UsageError("t-end: a positive final time is required");
  if (args.dt && !(*args.dt > 0.0)) throw UsageError("dt: must be positive");
  if (args.snapshot_stride < 0) throw UsageError("snapshot-stride: must be nonnegative");
  const SpectralField u0 = validated("fields", [&] {
    validate(datum.spec);
    SpectralField f = assemble_spectral(datum.spec, datum.box_length, datum.points);
    require_in_band(f);
    return f;
  });

  SimulationOptions sim;
  sim.t_end = *args.t_end;
  sim.dt = args.dt;
  sim.snapshot_stride = args.snapshot_stride;
  sim.box_length = datum.box_length;
  sim.points = datum.points;

  RunManifest manifest("simulate", common.out_dir);
  Json params = to_json(datum);
  params["t_end"] = sim.t_end;
  params["dt"] = args.dt ? Json(*args.dt) : Json(nullptr);
  params["resolved_dt"] = args.dt.value_or(default_dt(u0.grid(), 0.5 * sim.t_end));
  params["snapshot_stride"] = sim.snapshot_stride;
  manifest.set_parameters(params);
  run_stage(manifest, "nsflow", [&] {
    const FlowTrajectory traj = simulate_field(u0, sim);
    const MomentTrajectory moment = accumulate_K(traj);
    write_moments_csv(manifest.path("moments.csv"), moment);
    manifest.add_output("nsflow", "moments.csv");
    std::filesystem::create_directories(manifest.path("checkpoints"));
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
      char name[64];
      std::snprintf(name, sizeof name, "checkpoints/step_%06zu.cdsf", traj.snapshot_steps[s]);
      write_field(manifest.path(name), traj.snapshots[s]);
      manifest.add_output("nsflow", name);
    }
    manifest.add_check(make_check("nsflow", "divergence_free", traj.max_divergence(), "<=", 1e-10));
    manifest.add_check(make_check("nsflow", "tilde_symmetry", traj.max_symmetry(), "<=", 1e-10));
    manifest.add_check(make_check("nsflow", "diagonal_moments_equal", traj.max_diagonal_spread(), "<=", 1e-8));
    manifest.add_check(make_check("nsflow", "energy_nonincreasing", traj.max_energy_increase(), "<=", 1e-8));
  });
  return finish(manifest);
}

// ---------------------------------------------------------------- farfield

struct FarfieldArgs {
  std::string moments;
  std::vector<double> at;
  int samples = 4096;
  double threshold = 1e-3;
};

int cmd_farfield(const Common& common, const FarfieldArgs& args) {
  if (args.moments.empty()) throw UsageError("moments: a moment CSV is required");
  if (args.samples < 8) throw UsageError("samples: must be at least 8");
  if (!(args.threshold > 0.0 && args.threshold < 1.0)) throw UsageError("threshold: must lie in (0, 1)");
  const double tol = common.tolerance.value_or(kDefaultIdentityTolerance);
  const MomentTrajectory moment = validated("farfield", [&] { return read_moments_csv(args.moments); });
  if (moment.times.empty()) throw UsageError("moments: the CSV holds no rows");

  RunManifest manifest("farfield", common.out_dir);
  manifest.set_parameters({{"moments", args.moments},
                           {"at", args.at},
                           {"samples", args.samples},
                           {"threshold", args.threshold},
                           {"tolerance", tol}});
  run_stage(manifest, "farfield", [&] {
    Json per_time = Json::array();
    for (const auto& p : classify_trajectory(moment, tol))
      per_time.push_back({{"t", p.time}, {"decay", to_json(p.decay)}});
    std::vector<double> at = args.at;
    if (at.empty()) at.push_back(moment.times.back());
    Json maps = Json::array();
    for (std::size_t i = 0; i < at.size(); ++i) {
      std::size_t n = 0;
      for (std::size_t k = 1; k < moment.times.size(); ++k)
        if (std::abs(moment.times[k] - at[i]) < std::abs(moment.times[n] - at[i])) n = k;
      const DecayClass decay = classify_decay(moment.K[n], tol);
      Json entry = {{"requested", at[i]}, {"t", moment.times[n]}, {"decay", to_json(decay)}};
      if (decay.exponent == -(moment.dimension + 1)) {
        const COmegaMap map = c_omega_map(moment.K[n], args.samples, args.threshold, tol);
        const std::string file = "comega_" + std::to_string(i + 1) + ".csv";
        write_comega_csv(manifest.path(file), map);
        manifest.add_output("farfield", file);
        entry["comega_file"] = file;
        entry["positive_fraction"] = map.positive_fraction;
      }
      maps.push_back(entry);
    }
    write_json_file(manifest.path("classification.json"), {{"per_time", per_time}, {"maps", maps}});
    manifest.add_output("farfield", "classification.json");
  });
  return finish(manifest);
}

// -------------------------------------------------------------------- kato

struct KatoArgs {
  std::string kind = "plain";
  double t = 1.0;
  double eta = 1.0;
  std::vector<double> direction{0.36, 0.48, 0.8};
  std::vector<double> radii;
  double r_min = 100.0;
  double r_max = 1000.0;
  int count = 16;
  bool difference = false;
  std::optional<double> lq;
};

int cmd_kato(const Common& common, const KatoArgs& args) {
  const KatoKind kind = validated("kato", [&] { return parse_kato_kind(args.kind); });
  if (!(args.t > 0.0)) throw UsageError("t: must be positive");
  if (args.direction.size() != 3) throw UsageError("direction: three components are required");
  Vec3 omega{args.direction[0], args.direction[1], args.direction[2]};
  const double len = norm(omega);
  if (!(len > 0.0)) throw UsageError("direction: must be nonzero");
  omega = (1.0 / len) * omega;
  std::vector<double> radii = args.radii;
  if (radii.empty()) {
    if (!(args.r_min > 0.0 && args.r_max > args.r_min) || args.count < 2)
      throw UsageError("radii: need 0 < r-min < r-max and count >= 2");
    for (int i = 0; i < args.count; ++i)
      radii.push_back(args.r_min * std::pow(args.r_max / args.r_min, static_cast<double>(i) / (args.count - 1)));
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && radii[i] <= radii[i - 1])) throw UsageError("radii: must be positive and increasing");
  }
  if (args.lq && !(*args.lq >= 1.0 && *args.lq < 3.0)) throw UsageError("lq: q must lie in [1, 3)");

  RunManifest manifest("kato", common.out_dir);
  manifest.set_parameters({{"kind", std::string(to_string(kind))},
                           {"t", args.t},
                           {"eta", args.eta},
                           {"direction", {omega[0], omega[1], omega[2]}},
                           {"radii", radii},
                           {"difference", args.difference},
                           {"lq", args.lq ? Json(*args.lq) : Json(nullptr)}});
  run_stage(manifest, "kato", [&] {
    const KatoDecay decay = args.difference ? measure_difference_decay(kind, args.eta, args.t, omega, radii)
                                            : measure_heat_decay(kind, args.eta, args.t, omega, radii);
    {
      std::ofstream out(manifest.path("kato.csv"));
      if (!out) throw Error(ErrorKind::Io, "cannot write kato.csv");
      out << "r,magnitude,noise_floor,above_floor,slope\n";
      const std::string slope = decay.fitted ? format_double(decay.fit.slope) : "nan";
      for (const auto& s : decay.samples) {
        out << format_double(s.r) << ',' << format_double(s.magnitude) << ',' << format_double(s.noise_floor) << ','
            << (s.above_floor ? 1 : 0) << ',' << slope << '\n';
      }
    }
    manifest.add_output("kato", "kato.csv");
    std::size_t above = 0;
    for (const auto& s : decay.samples) above += s.above_floor ? 1 : 0;
    std::string verdict;
    if (!decay.fitted) verdict = "below-noise-floor";
    else if (decay.fit.slope > -2.0) verdict = "slow-decay";
    else verdict = "fast-decay";
    Json j = {{"kind", std::string(to_string(kind))},
              {"t", args.t},
              {"difference", args.difference},
              {"fitted", decay.fitted},
              {"slope", decay.fitted ? Json(decay.fit.slope) : Json(nullptr)},
              {"intercept", decay.fitted ? Json(decay.fit.intercept) : Json(nullptr)},
              {"samples", decay.samples.size()},
              {"samples_above_floor", above},
              {"verdict", verdict}};
    if (args.lq) {
      const LqTrend trend = lq_trend(kind, args.eta, args.t, *args.lq, radii);
      std::ofstream out(manifest.path("lq.csv"));
      if (!out) throw Error(ErrorKind::Io, "cannot write lq.csv");
      out << "radius,partial,increment\n";
      for (const auto& r : trend.rows)
        out << format_double(r.radius) << ',' << format_double(r.partial) << ',' << format_double(r.increment) << '\n';
      manifest.add_output("kato", "lq.csv");
      j["lq"] = {{"q", *args.lq}, {"last_increment_ratio", trend.last_increment_ratio}};
    }
    write_json_file(manifest.path("verdict.json"), j);
    manifest.add_output("kato", "verdict.json");
  });
  return finish(manifest);
}

// ---------------------------------------------------------------- pipeline

int report_pipeline(const PipelineResult& result, const std::filesystem::path& out_dir) {
  for (const auto& b : result.brackets) {
    if (b.bracket.found) {
      std::printf("K12 zero near t=%.6f: [%.6f, %.6f], t*=%.6f\n", b.target, b.bracket.t_lo, b.bracket.t_hi,
                  b.bracket.t_star);
    } else {
      std::printf("K12 zero near t=%.6f: not found in [%.6f, %.6f]\n", b.target, b.window_lo, b.window_hi);
    }
  }
  std::printf("eta = %.6g\n", result.eta);
  for (const auto& c : result.checks) {
    if (!c.passed) std::fprintf(stderr, "FAILED %s/%s: %g %s %g\n", c.stage.c_str(), c.name.c_str(), c.value,
                                c.relation.c_str(), c.threshold);
  }
  std::printf("%s (%s/manifest.json)\n", result.passed ? "all checks passed" : "some checks failed",
              out_dir.string().c_str());
  return result.passed ? 0 : kChecksFailed;
}

int cmd_pipeline(const Common& common) {
  if (common.config.empty()) throw UsageError("config: a pipeline config file is required");
  PipelineConfig config = validated("config", [&] { return pipeline_config_from_json(read_json_file(common.config)); });
  if (common.tolerance) config.tolerance = *common.tolerance;
  return report_pipeline(run_pipeline(config, common.out_dir, "pipeline"), common.out_dir);
}

int cmd_reproduce(const Common& common, const std::string& which) {
  PipelineConfig config = canonical_example(which == "3d" ? 3 : 2);
  if (common.tolerance) config.tolerance = *common.tolerance;
  return report_pipeline(run_pipeline(config, common.out_dir, "reproduce-example " + which), common.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"concentration-diffusion experiments for incompressible flows"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--out-dir", common.out_dir, "output directory (must not hold a manifest)");
  app.add_option("--threads", common.threads, "worker threads for transforms")->check(CLI::PositiveNumber);
  app.add_option("--tolerance", common.tolerance, "relative tolerance of the K ∝ I test");
  app.add_option("--config", common.config, "JSON input for the subcommand");

  DesignArgs design;
  auto* c_design = app.add_subcommand("design", "solve the sign-change design system");
  c_design->add_option("--times", design.times, "target times t_1 < ... < t_N");
  c_design->add_option("--epsilon", design.epsilon, "window half-width");
  c_design->add_option("--gamma", design.gamma, "frequency scale");
  c_design->add_option("--c", design.c, "right-hand side of the derivative row");
  c_design->add_option("--dimension", design.dimension)->check(CLI::IsMember({2, 3}));

  auto add_datum_flags = [](CLI::App* cmd, DatumArgs& a) {
    cmd->add_option("--design", a.design, "design JSON written by 'design'");
    cmd->add_option("--delta", a.delta, "bump radius");
    cmd->add_option("--profile", a.profile, "bump profile")->check(CLI::IsMember(profile_names()));
    cmd->add_option("--eta", a.eta, "amplitude");
    cmd->add_option("-L,--box-length", a.box_length, "periodic box length");
    cmd->add_option("-N,--points", a.points, "grid points per dimension");
  };

  DatumArgs datum;
  auto* c_datum = app.add_subcommand("build-datum", "assemble the datum on the grid");
  add_datum_flags(c_datum, datum);

  CorrelateArgs corr;
  auto* c_corr = app.add_subcommand("correlate", "sample the heat correlation E(t)");
  add_datum_flags(c_corr, corr.datum);
  c_corr->add_option("--t-end", corr.t_end);
  c_corr->add_option("--samples", corr.samples);
  c_corr->add_flag("--oracle", corr.oracle, "also evaluate the lattice oracle");
  c_corr->add_option("--oracle-box-length", corr.oracle_box);
  c_corr->add_option("--oracle-points", corr.oracle_points);
  c_corr->add_option("--oracle-steps", corr.oracle_steps);

  SimulateArgs simulate;
  auto* c_sim = app.add_subcommand("simulate", "run the Navier-Stokes solver");
  add_datum_flags(c_sim, simulate.datum);
  c_sim->add_option("--t-end", simulate.t_end);
  c_sim->add_option("--dt", simulate.dt);
  c_sim->add_option("--snapshot-stride", simulate.snapshot_stride);
  c_sim->add_option("--amplitude", simulate.eta, "overrides the datum's eta");

  FarfieldArgs far;
  auto* c_far = app.add_subcommand("farfield", "classify far-field decay from a moment CSV");
  c_far->add_option("--moments", far.moments)->required();
  c_far->add_option("--at", far.at, "times for c_omega maps (default: last time)");
  c_far->add_option("--samples", far.samples);
  c_far->add_option("--threshold", far.threshold);

  KatoArgs kato;
  auto* c_kato = app.add_subcommand("kato", "pointwise decay of heat-evolved non-decaying data");
  c_kato->add_option("--kind", kato.kind)->check(CLI::IsMember({"plain", "modulated"}));
  c_kato->add_option("--t", kato.t);
  c_kato->add_option("--eta", kato.eta);
  c_kato->add_option("--direction", kato.direction)->expected(3);
  c_kato->add_option("--radii", kato.radii);
  c_kato->add_option("--r-min", kato.r_min);
  c_kato->add_option("--r-max", kato.r_max);
  c_kato->add_option("--count", kato.count);
  c_kato->add_flag("--difference", kato.difference, "measure |e^{tΔ}a - a|");
  c_kato->add_option("--lq", kato.lq, "also tabulate partial L^q norms over the radii");

  std::string which;
  auto* c_repro = app.add_subcommand("reproduce-example", "run the explicit N=1 example");
  c_repro->add_option("which", which)->required()->check(CLI::IsMember({"2d", "3d"}));

  auto* c_pipe = app.add_subcommand("pipeline", "design -> fields -> correlation -> nsflow -> farfield");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalidInput;
  }

  try {
    set_transform_threads(common.threads);
    if (c_design->parsed()) return cmd_design(common, design);
    if (c_datum->parsed()) return cmd_build_datum(common, datum);
    if (c_corr->parsed()) return cmd_correlate(common, corr);
    if (c_sim->parsed()) return cmd_simulate(common, simulate);
    if (c_far->parsed()) return cmd_farfield(common, far);
    if (c_kato->parsed()) return cmd_kato(common, kato);
    if (c_repro->parsed()) return cmd_reproduce(common, which);
    if (c_pipe->parsed()) return cmd_pipeline(common);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStageFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kInvalidInput;
}
