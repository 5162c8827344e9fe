// cubix: run, analyze and validate CubiX scenarios.
//
// Exit codes: 0 success, 2 invalid input or scenario, 3 runtime fault.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cubix/errors.hpp"
#include "cubix/runner.hpp"
#include "cubix/scenario.hpp"
#include "cubix/units.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitFault = 3;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> dt;
};

cubix::Vec3 parse_vec3(const std::string& text, std::string_view unit, const char* what) {
  const auto q = cubix::units::parse_quantity(text);
  const auto want = cubix::units::parse_unit(unit).dimension;
  if (q.values.size() != 3 || (q.has_unit ? q.dimension != want : want != cubix::units::Dimension{})) {
    throw cubix::ValidationError(what, "expected three values in " + std::string(unit));
  }
  return {q.values[0], q.values[1], q.values[2]};
}

fs::path out_dir(const Globals& g, const cubix::Scenario& s) {
  return g.out ? fs::path(*g.out) : fs::path("out") / s.name;
}

cubix::Scenario load(const std::string& path, const Globals& g) {
  cubix::RunOptions o;
  o.seed = g.seed;
  o.dt = g.dt;
  return cubix::with_overrides(cubix::load_scenario(path), o);
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path);
  out << text;
  if (!out) throw cubix::Error("failed writing " + path.string());
}

int cmd_run(const std::string& file, const Globals& g) {
  const cubix::Scenario s = load(file, g);
  const fs::path dir = out_dir(g, s);
  const cubix::RunSummary r = cubix::run(s, dir);
  std::cout << s.name << ": " << r.ticks << " ticks, " << r.sim_time << " s simulated in "
            << r.wall_time << " s\n"
            << "  rms position error  " << r.rms_position_error << " m\n"
            << "  terminal error      " << r.terminal_position_error.norm() << " m\n"
            << "  saturation events   " << r.saturation_events << " (max "
            << r.max_saturated_wires << " wires)\n"
            << "  max residual        " << r.max_residual << "\n";
  for (const auto& w : r.wraps) {
    const std::string label = "pillar " + w.pillar;
    std::cout << "  " << label << std::string(label.size() < 20 ? 20 - label.size() : 1, ' ')
              << "wrapped " << w.wrapped << "/" << w.trials << "\n";
  }
  std::cout << "  output              " << dir.string() << "\n";
  return kExitOk;
}

int cmd_analyze(const std::string& file, const Globals& g, const std::string& position,
                const std::string& rotation, std::optional<double> fmax,
                std::size_t directions) {
  const cubix::Scenario s = load(file, g);
  cubix::AnalyzeOptions o;
  o.f_max = fmax;
  o.directions = directions;
  if (!position.empty() || !rotation.empty()) {
    const cubix::Vec3 p = position.empty() ? s.start.position
                                           : parse_vec3(position, "m", "--position");
    const cubix::Vec3 r = rotation.empty() ? s.start.rotation
                                           : parse_vec3(rotation, "rad", "--rotation");
    o.pose = cubix::Pose::from(p, cubix::exp_rotation(r));
  }
  const cubix::FeasibilityReport report = cubix::analyze(s, o);
  const std::string text = cubix::report_json(report);
  std::cout << text;
  const fs::path dir = out_dir(g, s);
  write_file(dir / "feasibility.json", text);
  std::string csv = "format_version,rank,positive_spanning,fully_constrained,margin,nominal_achievable,"
                    "directions_sampled,unreachable_directions\n";
  csv += std::to_string(cubix::kTelemetryFormatVersion) + "," + std::to_string(report.rank) +
         "," + (report.positive_spanning ? "1" : "0") + "," + (report.fully_constrained ? "1" : "0") + "," +
         cubix::units::format_number(report.margin) + "," +
         (report.nominal_achievable ? "1" : "0") + "," +
         std::to_string(report.directions_sampled) + "," +
         std::to_string(report.unreachable_directions) + "\n";
  write_file(dir / "feasibility.csv", csv);
  return kExitOk;
}

int cmd_plan_anchor(const std::string& file, const Globals& g) {
  const cubix::Scenario s = load(file, g);
  if (!s.deployment || s.deployment->pillars.empty()) {
    throw cubix::ValidationError("deployment.pillars", "scenario declares no pillars");
  }
  std::vector<cubix::AnchorTrace> traces;
  const auto wraps = cubix::deploy_anchors(s, s.simulation.seed, &traces);
  const fs::path dir = out_dir(g, s);
  fs::create_directories(dir);
  cubix::write_anchor_csv(dir / "anchors.csv", traces);
  bool all = true;
  for (const auto& w : wraps) {
    std::cout << "pillar " << w.pillar << ": " << w.waypoints << " waypoints, "
              << w.path_length << " m, wrapped " << w.wrapped << "/" << w.trials
              << " trials, mean flight " << w.mean_duration << " s\n";
    all = all && w.wrapped == w.trials;
  }
  std::cout << "trajectories written to " << (dir / "anchors.csv").string() << "\n";
  return all ? kExitOk : kExitFault;
}

int cmd_validate(const std::string& file, const Globals& g) {
  const cubix::Scenario s = load(file, g);
  const std::string text = cubix::dump_scenario(s);
  if (g.out) {
    write_file(fs::path(*g.out) / "resolved.scenario", text);
  } else {
    std::cout << text;
  }
  std::cerr << s.name << ": valid, " << s.wires.size() << " wires\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and control of the CubiX wire-driven robot"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  std::string out;
  double dt = 0.0;
  auto* seed_opt = app.add_option("--seed", seed, "Override the scenario seed");
  auto* out_opt = app.add_option("--out", out, "Output directory (default out/<name>)");
  auto* dt_opt = app.add_option("--dt", dt, "Override the simulation step in seconds");

  std::string file;
  auto* run = app.add_subcommand("run", "Deploy anchors if any, then simulate the closed loop");
  run->add_option("scenario", file, "Scenario file")->required();

  std::string position, rotation;
  std::optional<double> fmax;
  std::size_t directions = 1000;
  auto* analyze = app.add_subcommand("analyze", "Wrench feasibility at a pose");
  analyze->add_option("scenario", file, "Scenario file")->required();
  analyze->add_option("--position", position, "Pose position, e.g. \"0 0 0.1 m\"");
  analyze->add_option("--rotation", rotation, "Rotation vector, e.g. \"0 0 10 deg\"");
  analyze->add_option("--fmax", fmax, "Override the maximum tension in N");
  analyze->add_option("--directions", directions, "Number of sampled wrench directions");

  auto* plan = app.add_subcommand("plan-anchor", "Plan and fly the pillar wraps only");
  plan->add_option("scenario", file, "Scenario file")->required();

  auto* validate = app.add_subcommand("validate", "Check a scenario and print it resolved");
  validate->add_option("scenario", file, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }
  if (seed_opt->count()) g.seed = seed;
  if (out_opt->count()) g.out = out;
  if (dt_opt->count()) g.dt = dt;

  try {
    if (run->parsed()) return cmd_run(file, g);
    if (analyze->parsed()) {
      return cmd_analyze(file, g, position, rotation, fmax, directions);
    }
    if (plan->parsed()) return cmd_plan_anchor(file, g);
    if (validate->parsed()) return cmd_validate(file, g);
  } catch (const cubix::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const cubix::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "fault: " << e.what() << "\n";
    return kExitFault;
  }
  return kExitInvalid;
}
