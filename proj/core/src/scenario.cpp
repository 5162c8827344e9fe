#include "cubix/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "cubix/errors.hpp"
#include "cubix/units.hpp"

namespace cubix {

Pose PoseSpec::pose() const { return Pose::from(position, exp_rotation(rotation)); }

BodyModel Scenario::body() const {
  BodyModel b;
  b.mass = mass + payload;
  b.inertia = inertia;
  b.radius = radius;
  return b;
}

RobotModel Scenario::robot() const {
  RobotModel r;
  r.body = body();
  r.gravity = gravity;
  r.bounds = TensionBounds::uniform(static_cast<Eigen::Index>(wires.size()), f_min, f_max);
  r.weights = control.weights ? AllocationWeights::diagonal(*control.weights)
                              : AllocationWeights::defaults(radius);
  for (std::size_t i = 0; i < wires.size(); ++i) {
    r.wires.push_back({i, wires[i].exit, wires[i].anchor});
    const auto it = std::find_if(winches.begin(), winches.end(),
                                 [&](const WinchSpec& w) { return w.id == wires[i].winch; });
    r.winches.push_back(it == winches.end() ? WinchParams{} : it->params);
  }
  return r;
}

Trajectory Scenario::trajectory() const {
  std::vector<SplineSegment> segments;
  Pose from = start.pose();
  Twist from_twist;
  if (waypoints.empty()) {
    segments.push_back(plan_spline(from, from_twist, from, from_twist, 1.0));
  }
  for (const auto& w : waypoints) {
    const Pose to = w.target.pose();
    const Twist to_twist{w.velocity, w.angular_velocity};
    segments.push_back(plan_spline(from, from_twist, to, to_twist, w.duration));
    from = to;
    from_twist = to_twist;
  }
  return Trajectory(std::move(segments));
}

double Scenario::sim_duration() const {
  if (simulation.duration > 0.0) return simulation.duration;
  double total = waypoints.empty() ? 1.0 : 0.0;
  for (const auto& w : waypoints) total += w.duration;
  return total + simulation.settle;
}

int Scenario::steps_per_tick() const {
  return std::max(1, static_cast<int>(std::lround(1.0 / (control.rate * simulation.dt))));
}

const PillarSpec* Scenario::find_pillar(std::string_view id) const {
  if (!deployment) return nullptr;
  for (const auto& p : deployment->pillars) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

namespace {

using units::Dimension;

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

/// YAML node plus its dotted path, with unit-checked accessors.
class Field {
 public:
  Field(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const YAML::Node& node() const { return node_; }
  bool has(const char* key) const { return node_.IsMap() && node_[key]; }

  Field child(const char* key) const {
    return {node_.IsMap() ? node_[key] : YAML::Node(), sub(key)};
  }

  Field map(const char* key, std::initializer_list<const char*> allowed) const {
    const Field c = child(key);
    // A missing key yields an invalid node that must not be assigned to.
    Field f(c.node_ ? c.node_ : YAML::Node(YAML::NodeType::Map), c.path_);
    f.expect_map(allowed);
    return f;
  }

  void expect_map(std::initializer_list<const char*> allowed) const {
    if (!node_.IsMap()) throw ValidationError(path_, "expected a mapping");
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (std::none_of(allowed.begin(), allowed.end(),
                       [&](const char* a) { return key == a; })) {
        throw ValidationError(sub(key.c_str()), "unknown field");
      }
    }
  }

  std::vector<Field> list(const char* key) const {
    std::vector<Field> out;
    const Field f = child(key);
    if (!f.node_) return out;
    if (!f.node_.IsSequence()) throw ValidationError(f.path_, "expected a list");
    for (std::size_t i = 0; i < f.node_.size(); ++i) {
      out.emplace_back(f.node_[i], indexed(f.path_, i));
    }
    return out;
  }

  std::vector<double> quantity(const char* key, std::string_view unit, std::size_t count,
                               const std::vector<double>* fallback) const {
    const Field f = child(key);
    if (!f.node_ || f.node_.IsNull()) {
      if (fallback) return *fallback;
      throw ValidationError(f.path_, "required field is missing");
    }
    if (!f.node_.IsScalar()) throw ValidationError(f.path_, "expected a scalar");
    units::Quantity q;
    try {
      q = units::parse_quantity(f.node_.Scalar());
    } catch (const ParseError& e) {
      throw ParseError(f.path_ + ": " + e.what());
    }
    const Dimension want = units::parse_unit(unit).dimension;
    if (!q.has_unit && want != Dimension{}) {
      throw ValidationError(f.path_, "unit annotation required (expected " + std::string(unit) +
                                         ")");
    }
    if (q.dimension != want) {
      throw ValidationError(f.path_, "has dimension " + q.dimension.to_string() +
                                         ", expected " + std::string(unit));
    }
    if (q.values.size() != count) {
      throw ValidationError(f.path_, "expected " + std::to_string(count) + " value(s), got " +
                                         std::to_string(q.values.size()));
    }
    return q.values;
  }

  double scalar(const char* key, std::string_view unit) const {
    return quantity(key, unit, 1, nullptr)[0];
  }
  double scalar(const char* key, std::string_view unit, double fallback) const {
    const std::vector<double> fb{fallback};
    return quantity(key, unit, 1, &fb)[0];
  }

  template <int N>
  Eigen::Matrix<double, N, 1> vec(const char* key, std::string_view unit,
                                  const Eigen::Matrix<double, N, 1>& fallback) const {
    const std::vector<double> fb(fallback.data(), fallback.data() + N);
    const auto v = quantity(key, unit, N, &fb);
    return Eigen::Map<const Eigen::Matrix<double, N, 1>>(v.data());
  }
  template <int N>
  Eigen::Matrix<double, N, 1> vec(const char* key, std::string_view unit) const {
    const auto v = quantity(key, unit, N, nullptr);
    return Eigen::Map<const Eigen::Matrix<double, N, 1>>(v.data());
  }

  std::string text(const char* key, const std::string& fallback) const {
    const Field f = child(key);
    if (!f.node_) return fallback;
    if (!f.node_.IsScalar()) throw ValidationError(f.path_, "expected text");
    return f.node_.Scalar();
  }
  std::string text(const char* key) const {
    const Field f = child(key);
    if (!f.node_) throw ValidationError(f.path_, "required field is missing");
    return text(key, "");
  }

  template <typename T>
  T integer(const char* key, T fallback) const {
    const Field f = child(key);
    if (!f.node_) return fallback;
    try {
      return f.node_.as<T>();
    } catch (const YAML::Exception&) {
      throw ValidationError(f.path_, "expected an integer");
    }
  }

 private:
  std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  YAML::Node node_;
  std::string path_;
};

void parse_body(const Field& root, Scenario& s) {
  const Field body = root.map("body", {"mass", "payload", "side", "inertia", "radius"});
  s.mass = body.scalar("mass", "kg");
  s.payload = body.scalar("payload", "kg", 0.0);
  if (body.has("side") && body.has("inertia")) {
    throw ValidationError(body.path() + ".inertia", "give either side or inertia, not both");
  }
  if (body.has("inertia")) {
    const Field f = body.child("inertia");
    const auto q = units::parse_quantity(f.node().IsScalar() ? f.node().Scalar() : "");
    const std::size_t n = q.values.size();
    const std::vector<double> v = body.quantity("inertia", "kg*m^2", n == 3 ? 3 : 9, nullptr);
    if (n == 3) {
      s.inertia = Eigen::Map<const Vec3>(v.data()).asDiagonal();
    } else {
      s.inertia = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v.data());
    }
    s.radius = body.scalar("radius", "m", 0.35);
  } else {
    const double side = body.scalar("side", "m", 0.4);
    if (!(side > 0.0)) throw ValidationError(body.path() + ".side", "must be positive");
    const BodyModel cube = BodyModel::solid_cube(s.mass, side);
    s.inertia = cube.inertia;
    s.radius = body.scalar("radius", "m", cube.radius);
  }
}

WinchParams parse_winch(const Field& f) {
  WinchParams w;
  w.pulley_radius = f.scalar("pulley_radius", "m", w.pulley_radius);
  w.gear_ratio = f.scalar("gear_ratio", "1", w.gear_ratio);
  w.torque_constant = f.scalar("torque_constant", "Nm/A", w.torque_constant);
  w.efficiency_pulley = f.scalar("efficiency_pulley", "1", w.efficiency_pulley);
  w.efficiency_gear = f.scalar("efficiency_gear", "1", w.efficiency_gear);
  w.rotor_inertia = f.scalar("rotor_inertia", "kg*m^2", w.rotor_inertia);
  w.coulomb_friction = f.scalar("coulomb_friction", "Nm", w.coulomb_friction);
  w.viscous_friction = f.scalar("viscous_friction", "Nm*s/rad", w.viscous_friction);
  return w;
}

void parse_control(const Field& root, Scenario& s) {
  const Field c = root.map("control", {"mode", "rate", "weights", "pid"});
  const std::string mode = c.text("mode", "closed_loop");
  if (mode == "closed_loop") {
    s.control.mode = ControlMode::kClosedLoop;
  } else if (mode == "tension_schedule") {
    s.control.mode = ControlMode::kTensionSchedule;
  } else {
    throw ValidationError(c.path() + ".mode", "expected closed_loop or tension_schedule");
  }
  s.control.rate = c.scalar("rate", "Hz", 200.0);
  if (c.has("weights")) s.control.weights = c.vec<6>("weights", "1");

  const Field p = c.map("pid", {"kp_linear", "kp_angular", "ki_linear", "ki_angular",
                                "kd_linear", "kd_angular", "integral_limit_linear",
                                "integral_limit_angular"});
  auto& g = s.control.pid;
  g.kp.head<3>() = p.vec<3>("kp_linear", "N/m", Vec3::Constant(2000.0));
  g.kp.tail<3>() = p.vec<3>("kp_angular", "Nm/rad", Vec3::Constant(200.0));
  g.ki.head<3>() = p.vec<3>("ki_linear", "N/(m*s)", Vec3::Zero());
  g.ki.tail<3>() = p.vec<3>("ki_angular", "Nm/(rad*s)", Vec3::Zero());
  g.kd.head<3>() = p.vec<3>("kd_linear", "N*s/m", Vec3::Constant(300.0));
  g.kd.tail<3>() = p.vec<3>("kd_angular", "Nm*s/rad", Vec3::Constant(30.0));
  g.integral_limit.head<3>() = p.vec<3>("integral_limit_linear", "m*s", Vec3::Constant(0.1));
  g.integral_limit.tail<3>() = p.vec<3>("integral_limit_angular", "rad*s", Vec3::Constant(0.1));
}

PoseSpec parse_pose(const Field& f) {
  PoseSpec p;
  p.position = f.vec<3>("position", "m");
  p.rotation = f.vec<3>("rotation", "rad", Vec3::Zero());
  return p;
}

void parse_trajectory(const Field& root, Scenario& s) {
  const Field t = root.map("trajectory", {"start", "waypoints"});
  const Field start = t.map("start", {"position", "rotation"});
  s.start.position = start.vec<3>("position", "m", Vec3::Zero());
  s.start.rotation = start.vec<3>("rotation", "rad", Vec3::Zero());
  for (const Field& w : t.list("waypoints")) {
    w.expect_map({"label", "position", "rotation", "velocity", "angular_velocity", "duration"});
    WaypointSpec wp;
    wp.label = w.text("label", "");
    wp.target = parse_pose(w);
    wp.velocity = w.vec<3>("velocity", "m/s", Vec3::Zero());
    wp.angular_velocity = w.vec<3>("angular_velocity", "rad/s", Vec3::Zero());
    wp.duration = w.scalar("duration", "s");
    s.waypoints.push_back(wp);
  }
}

void parse_simulation(const Field& root, Scenario& s) {
  const Field f = root.map("simulation", {"dt", "duration", "settle", "seed", "max_winding_speed",
                                          "max_linear_speed", "max_angular_speed", "sensor"});
  auto& sim = s.simulation;
  sim.dt = f.scalar("dt", "s", sim.dt);
  sim.duration = f.scalar("duration", "s", 0.0);
  sim.settle = f.scalar("settle", "s", sim.settle);
  sim.seed = f.integer<std::uint64_t>("seed", 0);
  sim.limits.max_winding_speed = f.scalar("max_winding_speed", "m/s", kDefaultMaxWindingSpeed);
  sim.limits.max_linear_speed = f.scalar("max_linear_speed", "m/s", sim.limits.max_linear_speed);
  sim.limits.max_angular_speed =
      f.scalar("max_angular_speed", "rad/s", sim.limits.max_angular_speed);

  const Field n = f.map("sensor", {"position_noise", "rotation_noise", "linear_velocity_noise",
                                   "angular_velocity_noise", "latency", "camera_position",
                                   "camera_rotation"});
  auto& sensor = sim.sensor;
  sensor.position_noise = n.scalar("position_noise", "m", 0.0);
  sensor.rotation_noise = n.scalar("rotation_noise", "rad", 0.0);
  sensor.linear_velocity_noise = n.scalar("linear_velocity_noise", "m/s", 0.0);
  sensor.angular_velocity_noise = n.scalar("angular_velocity_noise", "rad/s", 0.0);
  sensor.latency = n.integer<int>("latency", 0);
  const Vec3 cam_p = n.vec<3>("camera_position", "m", Vec3::Zero());
  sim.camera_rotation = n.vec<3>("camera_rotation", "rad", Vec3::Zero());
  sensor.extrinsic = Extrinsic(Pose::from(cam_p, exp_rotation(sim.camera_rotation)));
}

void parse_deployment(const Field& root, Scenario& s) {
  if (!root.has("deployment")) return;
  const Field f = root.map("deployment", {"bounds_min", "bounds_max", "clearance", "step",
                                          "altitude", "dt", "timeout", "trials", "anchor_mass",
                                          "rated_load", "drone", "tag", "pillars"});
  DeploymentSpec d;
  d.wrap.bounds.min = f.vec<2>("bounds_min", "m", d.wrap.bounds.min);
  d.wrap.bounds.max = f.vec<2>("bounds_max", "m", d.wrap.bounds.max);
  d.wrap.clearance = f.scalar("clearance", "m", d.wrap.clearance);
  d.wrap.step = f.scalar("step", "m", d.wrap.step);
  d.wrap.altitude = f.scalar("altitude", "m", d.wrap.altitude);
  d.dt = f.scalar("dt", "s", d.dt);
  d.timeout = f.scalar("timeout", "s", d.timeout);
  d.trials = f.integer<int>("trials", d.trials);
  d.anchor_mass = f.scalar("anchor_mass", "kg", d.anchor_mass);
  d.rated_load = f.scalar("rated_load", "kg", d.rated_load);

  const Field g = f.map("drone", {"kp", "ki", "kd", "speed_cap", "capture_radius",
                                  "measurement_gain"});
  d.drone.kp = g.scalar("kp", "1/s", d.drone.kp);
  d.drone.ki = g.scalar("ki", "1/s^2", d.drone.ki);
  d.drone.kd = g.scalar("kd", "1", d.drone.kd);
  d.drone.speed_cap = g.scalar("speed_cap", "m/s", d.drone.speed_cap);
  d.drone.capture_radius = g.scalar("capture_radius", "m", d.drone.capture_radius);
  d.drone.measurement_gain = g.scalar("measurement_gain", "1", d.drone.measurement_gain);

  const Field tag = f.map("tag", {"noise", "range", "fov_half_angle"});
  d.tag_noise = tag.scalar("noise", "m", d.tag_noise);
  d.tag_range = tag.scalar("range", "m", d.tag_range);
  d.tag_fov_half_angle = tag.scalar("fov_half_angle", "rad", d.tag_fov_half_angle);

  for (const Field& p : f.list("pillars")) {
    p.expect_map({"id", "center", "half_extents", "height", "approach", "tag_normal"});
    PillarSpec ps;
    ps.id = p.text("id");
    ps.pillar.center = p.vec<2>("center", "m");
    ps.pillar.half_extents = p.vec<2>("half_extents", "m", ps.pillar.half_extents);
    const Vec2 z = p.vec<2>("height", "m", Vec2(ps.pillar.z_min, ps.pillar.z_max));
    ps.pillar.z_min = z[0];
    ps.pillar.z_max = z[1];
    ps.approach = p.vec<2>("approach", "m");
    ps.tag_normal = p.vec<2>("tag_normal", "1", Vec2::Zero());
    d.pillars.push_back(ps);
  }
  s.deployment = d;
}

template <typename Fn>
void check(bool ok, const std::string& field, Fn&& what) {
  if (!ok) throw ValidationError(field, what());
}

void require(bool ok, const std::string& field, const char* what) {
  if (!ok) throw ValidationError(field, what);
}

/// Point of the pillar footprint nearest to `p`, at the wrap altitude.
Vec3 pillar_anchor(const Pillar& pillar, const Vec3& p, double altitude) {
  const Vec2 lo = pillar.center - pillar.half_extents;
  const Vec2 hi = pillar.center + pillar.half_extents;
  Vec2 q = p.head<2>().cwiseMax(lo).cwiseMin(hi);
  if (q == p.head<2>()) q = pillar.center;
  return {q.x(), q.y(), altitude};
}

}  // namespace

void validate_scenario(Scenario& s) {
  require(s.format_version == kScenarioFormatVersion, "format_version",
          "unsupported format version");
  require(s.mass > 0.0, "body.mass", "must be positive");
  require(s.payload >= 0.0, "body.payload", "must not be negative");
  require(s.radius > 0.0, "body.radius", "must be positive");
  try {
    s.body().validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError("body.inertia", e.what());
  }
  require(std::isfinite(s.gravity.norm()), "gravity", "must be finite");
  require(s.f_min >= 0.0, "tension.min", "must not be negative");
  require(s.f_max > s.f_min, "tension.max", "must exceed tension.min");

  std::set<std::string> winch_ids;
  for (std::size_t i = 0; i < s.winches.size(); ++i) {
    const std::string path = indexed("winches", i);
    require(!s.winches[i].id.empty(), path + ".id", "must not be empty");
    require(winch_ids.insert(s.winches[i].id).second, path + ".id", "duplicate winch id");
    try {
      s.winches[i].params.validate();
    } catch (const std::invalid_argument& e) {
      throw ValidationError(path, e.what());
    }
  }

  if (s.deployment) {
    auto& d = *s.deployment;
    require(d.wrap.clearance > 0.0, "deployment.clearance", "must be positive");
    require(d.wrap.step > 0.0, "deployment.step", "must be positive");
    require((d.wrap.bounds.max.array() > d.wrap.bounds.min.array()).all(),
            "deployment.bounds_max", "must exceed bounds_min");
    require(d.dt > 0.0, "deployment.dt", "must be positive");
    require(d.trials >= 1, "deployment.trials", "must be at least 1");
    require(d.drone.speed_cap > 0.0, "deployment.drone.speed_cap", "must be positive");
    require(d.drone.capture_radius > 0.0, "deployment.drone.capture_radius", "must be positive");
    require(d.drone.measurement_gain >= 0.0 && d.drone.measurement_gain <= 1.0,
            "deployment.drone.measurement_gain", "must lie in [0, 1]");
    require(d.tag_noise >= 0.0, "deployment.tag.noise", "must not be negative");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < d.pillars.size(); ++i) {
      const std::string path = indexed("deployment.pillars", i);
      const auto& p = d.pillars[i];
      require(!p.id.empty(), path + ".id", "must not be empty");
      require(ids.insert(p.id).second, path + ".id", "duplicate pillar id");
      require((p.pillar.half_extents.array() > 0.0).all(), path + ".half_extents",
              "must be positive");
      require(p.pillar.z_max > p.pillar.z_min, path + ".height", "must be increasing");
      require(d.wrap.altitude >= p.pillar.z_min && d.wrap.altitude <= p.pillar.z_max,
              path + ".height", "does not span the wrap altitude");
      require(!p.pillar.inside(p.approach, d.wrap.clearance), path + ".approach",
              "lies within the clearance of the pillar");
    }
  }

  require(!s.wires.empty(), "wires", "at least one wire is required");
  std::set<std::string> wire_ids;
  const Pose start = s.start.pose();
  for (std::size_t i = 0; i < s.wires.size(); ++i) {
    const std::string path = indexed("wires", i);
    auto& w = s.wires[i];
    require(!w.id.empty(), path + ".id", "must not be empty");
    require(wire_ids.insert(w.id).second, path + ".id", "duplicate wire id");
    check(winch_ids.count(w.winch) == 1, path + ".winch",
          [&] { return "unknown winch '" + w.winch + "'"; });
    check(w.exit.norm() <= s.radius + 1e-9, path + ".exit",
          [&] { return "lies outside the body radius"; });
    if (!w.pillar.empty()) {
      const PillarSpec* p = s.find_pillar(w.pillar);
      check(p != nullptr, path + ".pillar", [&] { return "unknown pillar '" + w.pillar + "'"; });
      w.anchor = pillar_anchor(p->pillar, start.transform(w.exit), s.deployment->wrap.altitude);
    }
    check((w.anchor - start.transform(w.exit)).norm() > kDegenerateSeparation, path + ".anchor",
          [&] { return "coincides with the exit point at the start pose"; });
    check((w.anchor - start.transform(w.exit)).norm() <= kDefaultWindingCapacity,
          path + ".anchor", [&] { return "wire at the start pose exceeds the winding capacity"; });
  }

  auto& c = s.control;
  require(c.rate > 0.0, "control.rate", "must be positive");
  require((c.pid.kp.array() >= 0.0).all(), "control.pid.kp", "must not be negative");
  require((c.pid.ki.array() >= 0.0).all(), "control.pid.ki", "must not be negative");
  require((c.pid.kd.array() >= 0.0).all(), "control.pid.kd", "must not be negative");
  require((c.pid.integral_limit.array() >= 0.0).all(), "control.pid.integral_limit",
          "must not be negative");
  if (c.weights) {
    require((c.weights->array() > 0.0).all(), "control.weights", "must be positive");
  }

  auto& sim = s.simulation;
  require(sim.dt > 0.0 && sim.dt <= 0.01, "simulation.dt", "must lie in (0, 10 ms]");
  require(sim.duration >= 0.0, "simulation.duration", "must not be negative");
  require(sim.settle >= 0.0, "simulation.settle", "must not be negative");
  const double ratio = 1.0 / (c.rate * sim.dt);
  require(ratio >= 1.0 - 1e-9 && std::abs(ratio - std::round(ratio)) <= 1e-6 * ratio,
          "control.rate", "control period must be a whole number of simulation steps");
  require(sim.limits.max_winding_speed > 0.0, "simulation.max_winding_speed",
          "must be positive");
  require(sim.limits.max_linear_speed > 0.0, "simulation.max_linear_speed", "must be positive");
  require(sim.limits.max_angular_speed > 0.0, "simulation.max_angular_speed",
          "must be positive");
  try {
    sim.sensor.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError("simulation.sensor", e.what());
  }

  for (std::size_t i = 0; i < s.waypoints.size(); ++i) {
    require(s.waypoints[i].duration > 0.0,
            indexed("trajectory.waypoints", i) + ".duration", "must be positive");
  }
  try {
    (void)s.trajectory();
  } catch (const RotationTooLarge& e) {
    throw ValidationError("trajectory.waypoints", e.what());
  }
}

Scenario parse_scenario(std::string_view text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  }
  const Field root(doc, "");
  root.expect_map({"format_version", "name", "description", "body", "gravity", "tension",
                   "winches", "wires", "control", "trajectory", "simulation", "deployment"});
  Scenario s;
  s.format_version = root.integer<int>("format_version", kScenarioFormatVersion);
  s.name = root.text("name", "unnamed");
  s.description = root.text("description", "");
  parse_body(root, s);
  s.gravity = root.vec<3>("gravity", "m/s^2", s.gravity);

  const Field tension = root.map("tension", {"min", "max"});
  s.f_min = tension.scalar("min", "N", kDefaultMinTension);
  s.f_max = tension.scalar("max", "N", kDefaultMaxTension);

  for (const Field& w : root.list("winches")) {
    w.expect_map({"id", "pulley_radius", "gear_ratio", "torque_constant", "efficiency_pulley",
                  "efficiency_gear", "rotor_inertia", "coulomb_friction", "viscous_friction"});
    s.winches.push_back({w.text("id"), parse_winch(w)});
  }
  if (s.winches.empty()) s.winches.push_back({"standard", WinchParams{}});

  for (const Field& w : root.list("wires")) {
    w.expect_map({"id", "exit", "anchor", "pillar", "winch"});
    WireSpec spec;
    spec.id = w.text("id");
    spec.exit = w.vec<3>("exit", "m");
    spec.winch = w.text("winch", s.winches.front().id);
    if (w.has("pillar") == w.has("anchor")) {
      throw ValidationError(w.path(), "give exactly one of anchor or pillar");
    }
    if (w.has("pillar")) {
      spec.pillar = w.text("pillar");
    } else {
      spec.anchor = w.vec<3>("anchor", "m");
    }
    s.wires.push_back(spec);
  }

  parse_control(root, s);
  parse_trajectory(root, s);
  parse_simulation(root, s);
  parse_deployment(root, s);
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

namespace {

std::string num(double v) { return units::format_number(v); }

template <typename Derived>
std::string q(const Eigen::MatrixBase<Derived>& v, std::string_view unit) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += num(v.derived().coeff(i));
  }
  if (!unit.empty()) (out += ' ') += unit;
  return out;
}

std::string q(double v, std::string_view unit) {
  std::string out = num(v);
  if (!unit.empty()) (out += ' ') += unit;
  return out;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

}  // namespace

std::string dump_scenario(const Scenario& s) {
  std::ostringstream o;
  o << "format_version: " << s.format_version << "\n";
  o << "name: " << quoted(s.name) << "\n";
  if (!s.description.empty()) o << "description: " << quoted(s.description) << "\n";

  const Eigen::Matrix<double, 3, 3, Eigen::RowMajor> inertia = s.inertia;
  o << "body:\n"
    << "  mass: " << q(s.mass, "kg") << "\n"
    << "  payload: " << q(s.payload, "kg") << "\n"
    << "  inertia: " << q(inertia.reshaped<Eigen::RowMajor>(), "kg*m^2") << "\n"
    << "  radius: " << q(s.radius, "m") << "\n";
  o << "gravity: " << q(s.gravity, "m/s^2") << "\n";
  o << "tension:\n  min: " << q(s.f_min, "N") << "\n  max: " << q(s.f_max, "N") << "\n";

  o << "winches:\n";
  for (const auto& w : s.winches) {
    const auto& p = w.params;
    o << "  - id: " << quoted(w.id) << "\n"
      << "    pulley_radius: " << q(p.pulley_radius, "m") << "\n"
      << "    gear_ratio: " << q(p.gear_ratio, "") << "\n"
      << "    torque_constant: " << q(p.torque_constant, "Nm/A") << "\n"
      << "    efficiency_pulley: " << q(p.efficiency_pulley, "") << "\n"
      << "    efficiency_gear: " << q(p.efficiency_gear, "") << "\n"
      << "    rotor_inertia: " << q(p.rotor_inertia, "kg*m^2") << "\n"
      << "    coulomb_friction: " << q(p.coulomb_friction, "Nm") << "\n"
      << "    viscous_friction: " << q(p.viscous_friction, "Nm*s/rad") << "\n";
  }

  o << "wires:\n";
  for (const auto& w : s.wires) {
    o << "  - id: " << quoted(w.id) << "\n    exit: " << q(w.exit, "m") << "\n";
    if (w.pillar.empty()) {
      o << "    anchor: " << q(w.anchor, "m") << "\n";
    } else {
      o << "    pillar: " << quoted(w.pillar) << "\n";
    }
    o << "    winch: " << quoted(w.winch) << "\n";
  }

  const auto& c = s.control;
  const auto& g = c.pid;
  o << "control:\n"
    << "  mode: "
    << (c.mode == ControlMode::kClosedLoop ? "closed_loop" : "tension_schedule") << "\n"
    << "  rate: " << q(c.rate, "Hz") << "\n";
  if (c.weights) o << "  weights: " << q(*c.weights, "") << "\n";
  o << "  pid:\n"
    << "    kp_linear: " << q(g.kp.head<3>(), "N/m") << "\n"
    << "    kp_angular: " << q(g.kp.tail<3>(), "Nm/rad") << "\n"
    << "    ki_linear: " << q(g.ki.head<3>(), "N/(m*s)") << "\n"
    << "    ki_angular: " << q(g.ki.tail<3>(), "Nm/(rad*s)") << "\n"
    << "    kd_linear: " << q(g.kd.head<3>(), "N*s/m") << "\n"
    << "    kd_angular: " << q(g.kd.tail<3>(), "Nm*s/rad") << "\n"
    << "    integral_limit_linear: " << q(g.integral_limit.head<3>(), "m*s") << "\n"
    << "    integral_limit_angular: " << q(g.integral_limit.tail<3>(), "rad*s") << "\n";

  o << "trajectory:\n  start:\n"
    << "    position: " << q(s.start.position, "m") << "\n"
    << "    rotation: " << q(s.start.rotation, "rad") << "\n";
  o << "  waypoints:" << (s.waypoints.empty() ? " []\n" : "\n");
  for (const auto& w : s.waypoints) {
    o << "    - label: " << quoted(w.label) << "\n"
      << "      position: " << q(w.target.position, "m") << "\n"
      << "      rotation: " << q(w.target.rotation, "rad") << "\n"
      << "      velocity: " << q(w.velocity, "m/s") << "\n"
      << "      angular_velocity: " << q(w.angular_velocity, "rad/s") << "\n"
      << "      duration: " << q(w.duration, "s") << "\n";
  }

  const auto& sim = s.simulation;
  const auto& sn = sim.sensor;
  o << "simulation:\n"
    << "  dt: " << q(sim.dt, "s") << "\n"
    << "  duration: " << q(sim.duration, "s") << "\n"
    << "  settle: " << q(sim.settle, "s") << "\n"
    << "  seed: " << sim.seed << "\n"
    << "  max_winding_speed: " << q(sim.limits.max_winding_speed, "m/s") << "\n"
    << "  max_linear_speed: " << q(sim.limits.max_linear_speed, "m/s") << "\n"
    << "  max_angular_speed: " << q(sim.limits.max_angular_speed, "rad/s") << "\n"
    << "  sensor:\n"
    << "    position_noise: " << q(sn.position_noise, "m") << "\n"
    << "    rotation_noise: " << q(sn.rotation_noise, "rad") << "\n"
    << "    linear_velocity_noise: " << q(sn.linear_velocity_noise, "m/s") << "\n"
    << "    angular_velocity_noise: " << q(sn.angular_velocity_noise, "rad/s") << "\n"
    << "    latency: " << sn.latency << "\n"
    << "    camera_position: " << q(sn.extrinsic.camera_in_body().position, "m") << "\n"
    << "    camera_rotation: " << q(sim.camera_rotation, "rad") << "\n";

  if (s.deployment) {
    const auto& d = *s.deployment;
    o << "deployment:\n"
      << "  bounds_min: " << q(d.wrap.bounds.min, "m") << "\n"
      << "  bounds_max: " << q(d.wrap.bounds.max, "m") << "\n"
      << "  clearance: " << q(d.wrap.clearance, "m") << "\n"
      << "  step: " << q(d.wrap.step, "m") << "\n"
      << "  altitude: " << q(d.wrap.altitude, "m") << "\n"
      << "  dt: " << q(d.dt, "s") << "\n"
      << "  timeout: " << q(d.timeout, "s") << "\n"
      << "  trials: " << d.trials << "\n"
      << "  anchor_mass: " << q(d.anchor_mass, "kg") << "\n"
      << "  rated_load: " << q(d.rated_load, "kg") << "\n"
      << "  drone:\n"
      << "    kp: " << q(d.drone.kp, "1/s") << "\n"
      << "    ki: " << q(d.drone.ki, "1/s^2") << "\n"
      << "    kd: " << q(d.drone.kd, "") << "\n"
      << "    speed_cap: " << q(d.drone.speed_cap, "m/s") << "\n"
      << "    capture_radius: " << q(d.drone.capture_radius, "m") << "\n"
      << "    measurement_gain: " << q(d.drone.measurement_gain, "") << "\n"
      << "  tag:\n"
      << "    noise: " << q(d.tag_noise, "m") << "\n"
      << "    range: " << q(d.tag_range, "m") << "\n"
      << "    fov_half_angle: " << q(d.tag_fov_half_angle, "rad") << "\n"
      << "  pillars:" << (d.pillars.empty() ? " []\n" : "\n");
    for (const auto& p : d.pillars) {
      o << "    - id: " << quoted(p.id) << "\n"
        << "      center: " << q(p.pillar.center, "m") << "\n"
        << "      half_extents: " << q(p.pillar.half_extents, "m") << "\n"
        << "      height: " << q(Vec2(p.pillar.z_min, p.pillar.z_max), "m") << "\n"
        << "      approach: " << q(p.approach, "m") << "\n"
        << "      tag_normal: " << q(p.tag_normal, "") << "\n";
    }
  }
  return o.str();
}

}  // namespace cubix
