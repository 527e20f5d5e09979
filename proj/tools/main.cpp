#include "hyrelax/hyrelax.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hyrelax;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;
constexpr int kExitSimulation = 4;

struct RunConfig {
  std::string command;
  std::string system;
  std::string scheme = "euler";
  std::string transition = "sine";
  double h = 1e-4;
  double eps = 1e-6;
  double T = 1.0;
  std::vector<double> x0;
  int mode = -1;
  std::string input;
  std::string out = "out";
  std::uint64_t seed = 0;
  double c = -1.0;
  std::size_t stride = 1;

  // sweeps
  std::vector<double> h_list;
  std::vector<double> eps_list;
  double eps_ratio = 0.0;
  std::string error = "rest";
  double rest_from = -1.0;
  std::vector<double> deltas;
  std::vector<double> direction;
  double tol = 1e-10;
};

json config_json(const RunConfig& c, const std::vector<std::string>& argv) {
  json j = {{"command", c.command}, {"system", c.system},   {"scheme", c.scheme}, {"transition", c.transition},
            {"h", c.h},             {"eps", c.eps},         {"T", c.T},           {"x0", c.x0},
            {"mode", c.mode},       {"input", c.input},     {"out", c.out},       {"seed", c.seed},
            {"stride", c.stride},   {"argv", argv}};
  if (c.c >= 0.0) j["c"] = c.c;
  if (c.command == "sweep") {
    j["h_list"] = c.h_list;
    j["eps_list"] = c.eps_list;
    j["eps_ratio"] = c.eps_ratio;
    j["error"] = c.error;
    j["rest_from"] = c.rest_from;
    j["tol"] = c.tol;
  }
  if (c.command == "sensitivity") {
    j["deltas"] = c.deltas;
    j["direction"] = c.direction;
  }
  return j;
}

bool is_registry_name(const std::string& s) {
  for (const auto& n : registry_names())
    if (n == s) return true;
  return false;
}

HybridSystem resolve_system(const RunConfig& c) {
  if (is_registry_name(c.system)) {
    std::map<std::string, double> params;
    if (c.c >= 0.0) params["c"] = c.c;
    return registry_system(c.system, params);
  }
  if (c.c >= 0.0) throw ConfigError("--c only applies to built-in examples");
  return load_system(c.system);
}

/// Pendulum angles (coordinates 0 and 2) are given in degrees.
Vec resolve_x0(const RunConfig& c, const HybridSystem& sys) {
  std::vector<double> raw = c.x0;
  if (raw.empty()) {
    if (c.system == "bouncing-ball") raw = {1.0, 0.0};
    else if (c.system == "double-pendulum") raw = {25.0, 0.0, 35.0, 0.0};
    else throw ConfigError("--x0 is required for system files");
  }
  if (raw.size() != sys.state_dim)
    throw ConfigError("--x0 has " + std::to_string(raw.size()) + " entries, system has dimension " +
                      std::to_string(sys.state_dim));
  Vec x = Eigen::Map<const Vec>(raw.data(), static_cast<Eigen::Index>(raw.size()));
  if (c.system == "double-pendulum") {
    x[0] *= std::numbers::pi / 180.0;
    x[2] *= std::numbers::pi / 180.0;
  }
  return x;
}

ModeIndex resolve_mode(const RunConfig& c, const HybridSystem& sys) {
  if (c.mode < 0) return 0;
  const auto j = sys.mode_by_id(c.mode);
  if (!j) throw ConfigError("unknown mode id " + std::to_string(c.mode));
  return *j;
}

InputSignal resolve_input(const RunConfig& c, const HybridSystem& sys) {
  if (c.input.empty()) {
    if (sys.input_dim == 0) return InputSignal::none();
    return InputSignal::constant(0.5 * (sys.input_box.lo + sys.input_box.hi));
  }
  if (!fs::exists(c.input)) throw IoError("file not found: " + c.input);
  std::ifstream in(c.input);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_input_table(ss.str());
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  out << body;
}

void write_trajectory(const fs::path& dir, const Trajectory& traj, const HybridSystem& sys) {
  std::ofstream out(dir / "trajectory.csv");
  if (!out) throw IoError("cannot write " + (dir / "trajectory.csv").string());
  traj.write_csv(out, sys);
}

json trajectory_summary(const Trajectory& traj) {
  std::size_t strip = 0;
  for (const auto& s : traj.samples)
    if (s.region.kind == RegionKind::Strip) ++strip;
  return {{"samples", traj.samples.size()},
          {"events", traj.events.size()},
          {"strip_samples", strip},
          {"termination", termination_name(traj.termination)},
          {"termination_time", traj.termination_time}};
}

json run_validate(const RunConfig& c) {
  const HybridSystem sys = resolve_system(c);
  const ValidationReport report = validate_system(sys);
  json v = json::array();
  for (const auto& viol : report.violations) {
    std::cerr << "violation [" << viol.code << "]: " << viol.message << "\n";
    v.push_back({{"code", viol.code}, {"message", viol.message}});
  }
  if (!report.ok()) throw ConfigError(std::to_string(report.violations.size()) + " invariant violation(s)");
  std::cout << "ok: " << sys.modes.size() << " mode(s), " << sys.edges.size() << " edge(s)\n";
  return {{"violations", v}};
}

json run_simulation(const RunConfig& c, const fs::path& dir) {
  const HybridSystem sys = resolve_system(c);
  const ValidationReport report = validate_system(sys);
  if (!report.ok()) throw ConfigError("system fails validation: [" + report.violations.front().code + "] " +
                                      report.violations.front().message);
  const Vec x0 = resolve_x0(c, sys);
  const ModeIndex j0 = resolve_mode(c, sys);
  const InputSignal u = resolve_input(c, sys);
  Trajectory traj;
  if (c.command == "filippov") {
    FilippovOptions opt;
    opt.tol = c.tol;
    traj = simulate_filippov(FilippovSystem(sys), x0, j0, u, c.T, opt);
  } else {
    const RelaxedSystem rs(sys, {c.eps, TransitionFunction::parse(c.transition)});
    const IntegratorScheme scheme{IntegratorScheme::parse(c.scheme), c.h};
    DiscreteOptions opt;
    opt.sample_stride = c.stride;
    const bool augmented = c.command == "augmented" || rs.geometry().has_rank_deficient_edge();
    traj = augmented ? simulate_augmented(rs, scheme, x0, j0, u, c.T, opt)
                     : simulate_discrete(rs, scheme, x0, j0, u, c.T, opt);
  }
  write_trajectory(dir, traj, sys);
  json summary = trajectory_summary(traj);
  json intervals = json::array();
  for (const auto& iv : traj.strip_intervals()) intervals.push_back({iv.begin, iv.end});
  summary["strip_intervals"] = intervals;
  std::cout << "wrote " << (dir / "trajectory.csv").string() << " (" << traj.samples.size() << " samples, "
            << traj.events.size() << " events, " << termination_name(traj.termination) << ")\n";
  return summary;
}

void write_sweep(const fs::path& dir, const SweepResult& r) {
  std::ofstream out(dir / "sweep.csv");
  if (!out) throw IoError("cannot write sweep.csv");
  r.write_csv(out);
  write_file(dir / "fit.json", r.fit_json() + "\n");
}

json sweep_summary(const SweepResult& r) {
  return {{"slope", r.fit.slope}, {"intercept", r.fit.intercept}, {"r2", r.fit.r2},
          {"strictly_decreasing", r.strictly_decreasing()}, {"errors", r.errors()}};
}

json run_sweep_command(const RunConfig& c, const fs::path& dir) {
  ConvergenceSpec spec;
  spec.system = resolve_system(c);
  spec.x0 = resolve_x0(c, spec.system);
  spec.mode0 = resolve_mode(c, spec.system);
  spec.input = resolve_input(c, spec.system);
  spec.T = c.T;
  spec.scheme = IntegratorScheme::parse(c.scheme);
  spec.transition = TransitionFunction::parse(c.transition);
  spec.reference.tol = c.tol;

  if (!c.h_list.empty()) {
    spec.axis = SweepAxis::H;
    for (std::size_t i = 0; i < c.h_list.size(); ++i) {
      double eps = c.eps;
      if (c.eps_ratio > 0.0) eps = c.eps_ratio * c.h_list[i];
      else if (c.eps_list.size() == c.h_list.size()) eps = c.eps_list[i];
      spec.grid.push_back({c.h_list[i], eps, 0.0});
    }
  } else if (!c.eps_list.empty()) {
    spec.axis = SweepAxis::Eps;
    for (double e : c.eps_list) spec.grid.push_back({c.h, e, 0.0});
  } else {
    throw ConfigError("sweep needs --h-list or --eps-list");
  }

  if (c.error == "rest") {
    spec.kind = ErrorKind::RestNorm;
    spec.rest_from = c.rest_from;
    if (spec.rest_from < 0.0) {
      if (c.system != "bouncing-ball") throw ConfigError("--rest-from is required outside the bouncing-ball example");
      BouncingBallParams bp;
      if (c.c >= 0.0) bp.c = c.c;
      spec.rest_from = bouncing_ball_zeno_time(bp, spec.x0);
    }
  } else if (c.error == "filippov") {
    spec.kind = ErrorKind::Filippov;
  } else if (c.error == "self") {
    spec.kind = ErrorKind::SelfReference;
  } else {
    throw ConfigError("unknown --error '" + c.error + "' (rest, filippov, self)");
  }
  const SweepResult r = convergence_sweep(spec);
  write_sweep(dir, r);
  std::cout << "slope " << r.fit.slope << " (r2 " << r.fit.r2 << ")\n";
  json s = sweep_summary(r);
  s["rest_from"] = spec.rest_from;
  return s;
}

json run_sensitivity(const RunConfig& c, const fs::path& dir) {
  SensitivitySpec spec;
  spec.system = resolve_system(c);
  spec.x0 = resolve_x0(c, spec.system);
  spec.mode0 = resolve_mode(c, spec.system);
  spec.input = resolve_input(c, spec.system);
  spec.T = c.T;
  spec.h = c.h;
  spec.eps = c.eps;
  spec.scheme = IntegratorScheme::parse(c.scheme);
  spec.transition = TransitionFunction::parse(c.transition);
  spec.deltas = c.deltas.empty() ? std::vector<double>{1e-1, 1e-2, 1e-3} : c.deltas;
  RunConfig dir_cfg = c;
  if (c.direction.empty()) {
    if (c.system == "double-pendulum") dir_cfg.x0 = {0.0, 0.0, 1.0, 0.0};
    else throw ConfigError("--direction is required");
  } else {
    dir_cfg.x0 = c.direction;
  }
  spec.direction = resolve_x0(dir_cfg, spec.system);
  const SweepResult r = sensitivity_sweep(spec);
  write_sweep(dir, r);
  std::cout << "rho/delta:";
  for (const auto& row : r.rows) std::cout << " " << row.error / row.delta;
  std::cout << "\n";
  return sweep_summary(r);
}

int exit_code(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Io:
      return kExitIo;
    case ErrorCategory::Config:
      return kExitConfig;
    default:
      return kExitSimulation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxed execution of hybrid dynamical systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));
  RunConfig cfg;

  app.set_help_flag("--help", "Print this help message and exit");
  auto add_common = [&](CLI::App* sub, bool example) {
    sub->set_help_flag("--help", "Print this help message and exit");
    if (example)
      sub->add_option("name", cfg.system, "Example name")->required()->check(CLI::IsMember(registry_names()));
    else
      sub->add_option("system", cfg.system, "System JSON file or example name")->required();
    sub->add_option("--h", cfg.h, "Step size")->check(CLI::PositiveNumber);
    sub->add_option("--eps", cfg.eps, "Relaxation width")->check(CLI::PositiveNumber);
    sub->add_option("--T", cfg.T, "Horizon")->check(CLI::PositiveNumber);
    sub->add_option("--x0", cfg.x0, "Initial state (pendulum angles in degrees)")->expected(1, -1);
    sub->add_option("--mode", cfg.mode, "Initial mode id");
    sub->add_option("--c", cfg.c, "Restitution coefficient of built-in examples");
    sub->add_option("--scheme", cfg.scheme, "euler or rk4")->check(CLI::IsMember({"euler", "rk4"}));
    sub->add_option("--transition", cfg.transition, "sine or smoothstep")
        ->check(CLI::IsMember({"sine", "smoothstep"}));
    sub->add_option("--input", cfg.input, "Input table JSON");
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_option("--seed", cfg.seed, "Seed recorded in the manifest");
    sub->add_option("--stride", cfg.stride, "Keep every k-th step")->check(CLI::PositiveNumber);
    sub->add_option("--tol", cfg.tol, "Adaptive integrator tolerance")->check(CLI::PositiveNumber);
  };

  auto* validate = app.add_subcommand("validate", "Check a system against the model invariants");
  validate->add_option("system", cfg.system, "System JSON file or example name")->required();
  add_common(app.add_subcommand("simulate", "Fixed-step relaxed execution"), false);
  add_common(app.add_subcommand("augmented", "Fixed-step execution over the augmented state"), false);
  add_common(app.add_subcommand("filippov", "Event-driven Filippov reference"), false);
  auto* sweep = app.add_subcommand("sweep", "Convergence sweep over h or eps");
  add_common(sweep, false);
  sweep->add_option("--h-list", cfg.h_list, "Step sizes")->expected(1, -1);
  sweep->add_option("--eps-list", cfg.eps_list, "Relaxation widths")->expected(1, -1);
  sweep->add_option("--eps-ratio", cfg.eps_ratio, "eps = ratio * h");
  sweep->add_option("--error", cfg.error, "rest, filippov or self");
  sweep->add_option("--rest-from", cfg.rest_from, "Start of the rest window");
  auto* sens = app.add_subcommand("sensitivity", "Linearized sensitivity sweep");
  add_common(sens, false);
  sens->add_option("--deltas", cfg.deltas, "Perturbation sizes")->expected(1, -1);
  sens->add_option("--direction", cfg.direction, "Perturbation direction")->expected(1, -1);
  add_common(app.add_subcommand("example", "Run a built-in example"), true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  std::vector<std::string> args(argv, argv + argc);

  const auto start = std::chrono::steady_clock::now();
  json manifest = {{"library", "hyrelax"}, {"version", version()}, {"config", config_json(cfg, args)}};
  try {
    if (cfg.command == "validate") {
      manifest["result"] = run_validate(cfg);
      return 0;
    }
    const fs::path dir(cfg.out);
    fs::create_directories(dir);
    json result;
    if (cfg.command == "sweep") result = run_sweep_command(cfg, dir);
    else if (cfg.command == "sensitivity") result = run_sensitivity(cfg, dir);
    else result = run_simulation(cfg, dir);
    manifest["result"] = result;
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSimulation;
  }
}
