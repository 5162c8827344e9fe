#include "cubix/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "cubix/errors.hpp"

namespace cubix {

namespace {

using nlohmann::json;

std::uint64_t trial_seed(std::uint64_t seed, std::size_t pillar, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(pillar), static_cast<std::uint32_t>(trial)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

json vec_json(const VecX& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
json vec_json(const Vec3& v) { return std::vector<double>{v.x(), v.y(), v.z()}; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

struct Accumulator {
  double sq_position = 0.0;
  double sq_rotation = 0.0;
  double max_position = 0.0;
  std::size_t ticks = 0;

  void add(double e_p, double e_r) {
    sq_position += e_p * e_p;
    sq_rotation += e_r * e_r;
    max_position = std::max(max_position, e_p);
    ++ticks;
  }
  double rms_position() const { return ticks ? std::sqrt(sq_position / ticks) : 0.0; }
  double rms_rotation() const { return ticks ? std::sqrt(sq_rotation / ticks) : 0.0; }
};

}  // namespace

Scenario with_overrides(Scenario scenario, const RunOptions& options) {
  if (options.seed) scenario.simulation.seed = *options.seed;
  if (options.dt) scenario.simulation.dt = *options.dt;
  validate_scenario(scenario);
  return scenario;
}

std::vector<WrapResult> deploy_anchors(const Scenario& s, std::uint64_t seed,
                                       std::vector<AnchorTrace>* traces) {
  std::vector<WrapResult> results;
  if (!s.deployment) return results;
  const auto& d = *s.deployment;
  const Pose start = s.start.pose();

  for (std::size_t p = 0; p < d.pillars.size(); ++p) {
    const PillarSpec& ps = d.pillars[p];
    WrapResult result;
    result.pillar = ps.id;

    Vec3 origin = start.position;
    for (const auto& w : s.wires) {
      if (w.pillar == ps.id) {
        origin = start.transform(w.exit);
        result.anchor = w.anchor;
        break;
      }
    }
    const Pose approach =
        Pose::from_translation(Vec3(ps.approach.x(), ps.approach.y(), d.wrap.altitude));
    const AnchorPath path = plan_wrap_path(ps.pillar, approach, origin, d.wrap);
    result.waypoints = path.waypoints.size();
    for (std::size_t k = 1; k < path.waypoints.size(); ++k) {
      result.path_length += (path.waypoints[k] - path.waypoints[k - 1]).norm();
    }

    RelativePoseSensor sensor;
    sensor.noise_std = d.tag_noise;
    sensor.range = d.tag_range;
    sensor.fov_half_angle = d.tag_fov_half_angle;
    sensor.tag_position = ps.pillar.center;
    sensor.tag_normal = ps.tag_normal.norm() > 0.0 ? Vec2(ps.tag_normal.normalized())
                                                   : Vec2((ps.approach - ps.pillar.center)
                                                              .normalized());

    double total_time = 0.0;
    for (int trial = 0; trial < d.trials; ++trial) {
      TrackOptions opts;
      opts.dt = d.dt;
      opts.timeout = d.timeout;
      opts.bounds = d.wrap.bounds;
      opts.seed = trial_seed(seed, p, trial);
      auto samples = track_path(path, sensor, d.drone, opts);
      total_time += samples.back().time;
      int winding = 0;
      try {
        winding = winding_number(close_loop(horizontal(samples)), ps.pillar.center);
      } catch (const Ambiguous&) {
        winding = 0;
      }
      result.winding.push_back(winding);
      result.wrapped += winding == 1;
      ++result.trials;
      if (traces) traces->push_back({ps.id, trial, std::move(samples)});
    }
    result.mean_duration = result.trials ? total_time / result.trials : 0.0;
    results.push_back(result);
  }
  return results;
}

RunSummary run(const Scenario& input, const std::filesystem::path& out_dir,
               const RunOptions& options) {
  const auto wall_start = std::chrono::steady_clock::now();
  const Scenario s = with_overrides(input, options);
  const bool persist = !out_dir.empty();
  if (persist) {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "resolved.scenario", dump_scenario(s));
  }

  RunSummary summary;
  summary.scenario = s.name;
  summary.seed = s.simulation.seed;
  summary.dt = s.simulation.dt;

  const RobotModel robot = s.robot();
  const Trajectory trajectory = s.trajectory();
  const auto m = static_cast<std::size_t>(robot.wire_count());
  summary.max_tensions = VecX::Zero(robot.wire_count());
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    SegmentStats seg;
    seg.label = k < s.waypoints.size() ? s.waypoints[k].label : "hold";
    seg.start = trajectory.segment_start(k);
    seg.end = seg.start + trajectory.segments()[k].duration();
    summary.segments.push_back(seg);
  }

  std::unique_ptr<TelemetryWriter> writer;
  if (persist) {
    writer = std::make_unique<TelemetryWriter>(out_dir / "telemetry.csv", m,
                                               options.queue_capacity);
  }

  const auto finish = [&]() {
    summary.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    if (writer) writer->close();
    if (persist) write_text(out_dir / "summary.json", summary_json(summary));
  };

  try {
    if (s.deployment) {
      std::vector<AnchorTrace> traces;
      summary.wraps = deploy_anchors(s, s.simulation.seed, persist ? &traces : nullptr);
      if (persist) write_anchor_csv(out_dir / "anchors.csv", traces);
      for (const auto& w : summary.wraps) {
        if (w.winding.empty() || w.winding.front() != 1) {
          throw Error("wire was not wrapped around pillar " + w.pillar);
        }
      }
    }

    const double dt = s.simulation.dt;
    const int steps_per_tick = s.steps_per_tick();
    const double control_dt = steps_per_tick * dt;
    const auto total_steps = static_cast<std::int64_t>(std::llround(s.sim_duration() / dt));

    SimState state = SimState::make(s.start.pose(), Twist{}, robot.body, robot.wire_count());
    Sensor sensor(s.simulation.sensor, s.simulation.seed);
    PoseController controller(robot, s.control.pid, s.control.mode);
    Accumulator overall;
    std::vector<Accumulator> per_segment(summary.segments.size());
    const Vec3 initial = state.pose.position;
    Vec3 lo = initial;
    Vec3 hi = initial;

    for (std::int64_t k = 0; k < total_steps; ++k) {
      if (k % steps_per_tick == 0) {
        const double t = static_cast<double>(k) * dt;
        const Odometry odom = sensor.sense(state);
        const TrajectorySample ref = trajectory.sample(t);
        const ControlTick tick =
            controller.update(summary.ticks, t, odom.pose, odom.twist, ref, control_dt);
        if (writer) writer->push(tick, state);
        ++summary.ticks;

        const double e_p = (ref.pose.position - state.pose.position).norm();
        const double e_r = orientation_error(ref.pose.orientation, state.pose.orientation).norm();
        const std::size_t sat = tick.saturation_count();
        summary.saturation_events += sat > 0;
        summary.max_saturated_wires = std::max(summary.max_saturated_wires, sat);
        summary.max_residual = std::max(summary.max_residual, tick.residual_norm);
        if (tick.f_final.size() == summary.max_tensions.size()) {
          summary.max_tensions = summary.max_tensions.cwiseMax(tick.f_final);
        }
        if (t <= trajectory.duration()) {
          overall.add(e_p, e_r);
          const std::size_t idx = trajectory.segment_at(t);
          per_segment[idx].add(e_p, e_r);
          auto& seg = summary.segments[idx];
          seg.saturated_ticks += sat > 0;
          seg.max_saturated_wires = std::max(seg.max_saturated_wires, sat);
          seg.max_residual = std::max(seg.max_residual, tick.residual_norm);
        }
      }
      state = step(state, controller.currents(), dt, robot, s.simulation.limits);
      lo = lo.cwiseMin(state.pose.position);
      hi = hi.cwiseMax(state.pose.position);
    }

    summary.sim_time = static_cast<double>(total_steps) * dt;
    const TrajectorySample final_ref = trajectory.sample(summary.sim_time);
    summary.terminal_position_error = final_ref.pose.position - state.pose.position;
    summary.terminal_rotation_error =
        orientation_error(final_ref.pose.orientation, state.pose.orientation).norm();
    summary.rms_position_error = overall.rms_position();
    summary.rms_rotation_error = overall.rms_rotation();
    summary.max_position_error = overall.max_position;
    for (std::size_t k = 0; k < per_segment.size(); ++k) {
      summary.segments[k].rms_position = per_segment[k].rms_position();
      summary.segments[k].rms_rotation = per_segment[k].rms_rotation();
      summary.segments[k].max_position = per_segment[k].max_position;
      summary.segments[k].ticks = per_segment[k].ticks;
    }
    summary.displacement = state.pose.position - initial;
    summary.excursion = hi - lo;
    summary.controller_faults = controller.fault_count();
    summary.completed = true;
  } catch (const std::exception& e) {
    summary.fault = e.what();
    try {
      finish();
    } catch (...) {
    }
    throw;
  }
  finish();
  return summary;
}

std::string summary_json(const RunSummary& s) {
  json j;
  j["format_version"] = kTelemetryFormatVersion;
  j["scenario"] = s.scenario;
  j["seed"] = s.seed;
  j["dt"] = s.dt;
  j["ticks"] = s.ticks;
  j["sim_time"] = s.sim_time;
  j["completed"] = s.completed;
  j["fault"] = s.fault;
  j["controller_faults"] = s.controller_faults;
  j["rms_position_error"] = s.rms_position_error;
  j["rms_rotation_error"] = s.rms_rotation_error;
  j["max_position_error"] = s.max_position_error;
  j["terminal_position_error"] = vec_json(s.terminal_position_error);
  j["terminal_position_error_norm"] = s.terminal_position_error.norm();
  j["terminal_rotation_error"] = s.terminal_rotation_error;
  j["max_tensions"] = vec_json(s.max_tensions);
  j["saturation_events"] = s.saturation_events;
  j["max_saturated_wires"] = s.max_saturated_wires;
  j["max_residual"] = s.max_residual;
  j["displacement"] = vec_json(s.displacement);
  j["excursion"] = vec_json(s.excursion);
  j["segments"] = json::array();
  for (const auto& seg : s.segments) {
    j["segments"].push_back({{"label", seg.label},
                             {"start", seg.start},
                             {"end", seg.end},
                             {"rms_position", seg.rms_position},
                             {"rms_rotation", seg.rms_rotation},
                             {"max_position", seg.max_position},
                             {"ticks", seg.ticks},
                             {"saturated_ticks", seg.saturated_ticks},
                             {"max_saturated_wires", seg.max_saturated_wires},
                             {"max_residual", seg.max_residual}});
  }
  j["wraps"] = json::array();
  for (const auto& w : s.wraps) {
    j["wraps"].push_back({{"pillar", w.pillar},
                          {"trials", w.trials},
                          {"wrapped", w.wrapped},
                          {"winding", w.winding},
                          {"anchor", vec_json(w.anchor)},
                          {"waypoints", w.waypoints},
                          {"path_length", w.path_length},
                          {"mean_duration", w.mean_duration}});
  }
  j["wall_time"] = s.wall_time;
  return j.dump(2) + "\n";
}

FeasibilityReport analyze(const Scenario& s, const AnalyzeOptions& options) {
  RobotModel robot = s.robot();
  if (options.f_max) {
    const double f_max = std::max(*options.f_max, 0.0);
    robot.bounds = TensionBounds::uniform(robot.wire_count(), std::min(s.f_min, f_max), f_max);
  }
  const Pose pose = options.pose.value_or(s.start.pose());
  FeasibilityOptions fo;
  fo.directions = options.directions;
  fo.torque_scale = s.radius;
  fo.nominal = gravity_compensation(robot.body, robot.gravity);
  return controllability(wire_jacobian(pose, robot.wires), robot.bounds, fo);
}

std::string report_json(const FeasibilityReport& r) {
  json j;
  j["rank"] = r.rank;
  j["positive_spanning"] = r.positive_spanning;
  j["fully_constrained"] = r.fully_constrained;
  j["margin"] = r.margin;
  j["nominal_achievable"] = r.nominal_achievable;
  j["directions_sampled"] = r.directions_sampled;
  j["unreachable_directions"] = r.unreachable_directions;
  j["saturating_wires"] = r.saturating_wires;
  return j.dump(2) + "\n";
}

}  // namespace cubix
