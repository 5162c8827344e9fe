#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cubix/anchor.hpp"
#include "cubix/controller.hpp"
#include "cubix/dynamics.hpp"
#include "cubix/robot.hpp"
#include "cubix/trajectory.hpp"

namespace cubix {

inline constexpr int kScenarioFormatVersion = 1;

struct WinchSpec {
  std::string id;
  WinchParams params;
};

struct WireSpec {
  std::string id;
  Vec3 exit = Vec3::Zero();  ///< body frame
  /// World anchor. Filled in at load time for wires tied to a pillar.
  Vec3 anchor = Vec3::Zero();
  /// Pillar the wire is wrapped around by the deployment phase, if any.
  std::string pillar;
  std::string winch;
};

struct PoseSpec {
  Vec3 position = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();  ///< rotation vector, rad

  Pose pose() const;
};

struct WaypointSpec {
  PoseSpec target;
  Vec3 velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
  double duration = 1.0;
  std::string label;
};

struct ControlSpec {
  ControlMode mode = ControlMode::kClosedLoop;
  double rate = 200.0;  ///< Hz
  PidGains pid;
  /// Diagonal of the residual weight; empty means the radius-scaled default.
  std::optional<Vec6> weights;
};

struct SimulationSpec {
  double dt = 1e-3;
  /// Total simulated time; <= 0 means trajectory duration plus `settle`.
  double duration = 0.0;
  double settle = 2.0;
  std::uint64_t seed = 0;
  SimParams limits;
  SensorModel sensor;
  Vec3 camera_rotation = Vec3::Zero();  ///< rotation vector of the camera in the body
};

struct PillarSpec {
  std::string id;
  Pillar pillar;
  Vec2 approach = Vec2::Zero();
  /// Tag facing direction; zero means towards the approach point.
  Vec2 tag_normal = Vec2::Zero();
};

struct DeploymentSpec {
  WrapOptions wrap;
  DroneGains drone;
  double tag_noise = 0.01;
  double tag_range = 4.0;
  double tag_fov_half_angle = 1.2;
  double dt = 0.02;
  double timeout = 0.0;
  int trials = 20;
  double anchor_mass = 0.005;  ///< kg, informational
  double rated_load = 35.0;    ///< kg, informational
  std::vector<PillarSpec> pillars;
};

/// A complete, validated experiment description. All defaults are filled in.
struct Scenario {
  int format_version = kScenarioFormatVersion;
  std::string name;
  std::string description;

  double mass = 10.0;
  double payload = 0.0;  ///< point mass at the body center
  Mat3 inertia = BodyModel{}.inertia;
  double radius = 0.35;
  Vec3 gravity{0.0, 0.0, -kStandardGravity};

  double f_min = kDefaultMinTension;
  double f_max = kDefaultMaxTension;
  std::vector<WinchSpec> winches;
  std::vector<WireSpec> wires;

  ControlSpec control;
  PoseSpec start;
  std::vector<WaypointSpec> waypoints;
  SimulationSpec simulation;
  std::optional<DeploymentSpec> deployment;

  BodyModel body() const;
  RobotModel robot() const;
  Trajectory trajectory() const;
  /// Simulated time including settling.
  double sim_duration() const;
  /// Simulation steps per control tick.
  int steps_per_tick() const;
  const PillarSpec* find_pillar(std::string_view id) const;
};

/// Throws ParseError for malformed text and ValidationError (naming the
/// dotted field path) for schema or constraint violations.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical text of the resolved scenario, SI units throughout. Parsing it
/// gives back an identical scenario.
std::string dump_scenario(const Scenario& scenario);

/// Re-run every semantic check on an in-memory scenario (after overrides).
void validate_scenario(Scenario& scenario);

}  // namespace cubix
