#include "cubix/anchor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "cubix/errors.hpp"

namespace cubix {

bool Pillar::inside(const Vec2& p, double margin) const {
  const Vec2 d = (p - center).cwiseAbs();
  return d.x() < half_extents.x() + margin && d.y() < half_extents.y() + margin;
}

bool WorldBounds::contains(const Vec2& p) const {
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

bool RelativePoseSensor::detects(const Vec3& drone) const {
  const Vec2 rel = drone.head<2>() - tag_position;
  const double dist = rel.norm();
  if (dist > range || dist <= 0.0) return false;
  return rel.dot(tag_normal.normalized()) >= dist * std::cos(fov_half_angle);
}

namespace {

void append_leg(std::vector<Vec3>& out, const Vec3& to, double step) {
  const Vec3 from = out.back();
  const double len = (to - from).norm();
  const int pieces = std::max(1, static_cast<int>(std::ceil(len / step - 1e-12)));
  for (int k = 1; k <= pieces; ++k) {
    out.push_back(from + (to - from) * (static_cast<double>(k) / pieces));
  }
}

}  // namespace

AnchorPath plan_wrap_path(const Pillar& pillar, const Pose& approach, const Vec3& wire_origin,
                          const WrapOptions& options) {
  if (!(options.clearance > 0.0) || !(options.step > 0.0)) {
    throw std::invalid_argument("wrap clearance and step must be positive");
  }
  const Vec2 start = approach.position.head<2>();
  if (pillar.inside(start, options.clearance)) {
    throw NoClearance("approach point lies inside the pillar footprint plus clearance");
  }
  const Vec2 grown = pillar.half_extents + Vec2::Constant(options.clearance);
  const std::array<Vec2, 4> ccw{Vec2(grown.x(), grown.y()), Vec2(-grown.x(), grown.y()),
                                Vec2(-grown.x(), -grown.y()), Vec2(grown.x(), -grown.y())};
  std::size_t first = 0;
  for (std::size_t k = 1; k < 4; ++k) {
    if ((pillar.center + ccw[k] - start).norm() < (pillar.center + ccw[first] - start).norm()) {
      first = k;
    }
  }

  AnchorPath path;
  path.wire_origin = wire_origin;
  for (std::size_t k = 0; k < 4; ++k) {
    path.corners.push_back(pillar.center + ccw[(first + k) % 4]);
    if (!options.bounds.contains(path.corners.back())) {
      throw NoClearance("wrap circuit leaves the world bounds");
    }
  }
  if (!options.bounds.contains(start)) throw NoClearance("approach point outside world bounds");

  const auto lift = [&](const Vec2& p) { return Vec3(p.x(), p.y(), options.altitude); };
  path.waypoints.push_back(lift(start));
  for (const Vec2& c : path.corners) append_leg(path.waypoints, lift(c), options.step);
  append_leg(path.waypoints, lift(path.corners[0]), options.step);
  append_leg(path.waypoints, lift(0.5 * (path.corners[0] + path.corners[1])), options.step);

  for (const Vec3& w : path.waypoints) {
    if (pillar.inside(w.head<2>(), options.clearance - 1e-9)) {
      throw NoClearance("planned waypoint intersects the pillar footprint");
    }
  }
  return path;
}

std::vector<DroneSample> track_path(const AnchorPath& path, const RelativePoseSensor& sensor,
                                    const DroneGains& gains, const TrackOptions& options) {
  if (path.waypoints.empty()) throw std::invalid_argument("empty anchor path");
  if (!(options.dt > 0.0)) throw std::invalid_argument("tracking dt must be positive");

  double length = (path.waypoints.front() - path.wire_origin).norm();
  for (std::size_t k = 1; k < path.waypoints.size(); ++k) {
    length += (path.waypoints[k] - path.waypoints[k - 1]).norm();
  }
  // Outside the capture radius the commanded speed never drops below v_min.
  const double v_min = std::min(gains.speed_cap, gains.kp * gains.capture_radius);
  const double timeout = options.timeout > 0.0 ? options.timeout : 2.0 * length / v_min + 10.0;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Vec3 position = path.wire_origin;
  Vec3 estimate = position;
  Vec3 integral = Vec3::Zero();
  Vec3 previous_error = Vec3::Zero();
  bool have_previous = false;
  std::size_t active = 0;
  double t = 0.0;

  std::vector<DroneSample> out;
  out.push_back({0.0, position, estimate, sensor.detects(position), 0});
  while (true) {
    const Vec3 error = path.waypoints[active] - estimate;
    integral += error * options.dt;
    const Vec3 derivative = have_previous ? Vec3((error - previous_error) / options.dt)
                                          : Vec3::Zero();
    previous_error = error;
    have_previous = true;

    Vec3 velocity = gains.kp * error + gains.ki * integral + gains.kd * derivative;
    const double speed = velocity.norm();
    if (speed > gains.speed_cap) velocity *= gains.speed_cap / speed;

    // Dead reckoning follows the actual displacement, which the geofence may
    // cut short.
    const Vec3 before = position;
    position += velocity * options.dt;
    position.head<2>() = position.head<2>()
                             .cwiseMax(options.bounds.min)
                             .cwiseMin(options.bounds.max);
    estimate += position - before;
    const bool visible = sensor.detects(position);
    if (visible) {
      Vec3 measured = position;
      for (int k = 0; k < 3; ++k) measured[k] += sensor.noise_std * normal(rng);
      estimate += gains.measurement_gain * (measured - estimate);
    }
    t += options.dt;
    out.push_back({t, position, estimate, visible, active});

    if ((path.waypoints[active] - estimate).norm() <= gains.capture_radius) {
      if (++active == path.waypoints.size()) return out;
      integral.setZero();
      have_previous = false;
    }
    if (t > timeout) {
      throw TrackingTimeout("waypoint " + std::to_string(active) + " of " +
                            std::to_string(path.waypoints.size()) + " not reached within " +
                            std::to_string(timeout) + " s");
    }
  }
}

int winding_number(const std::vector<Vec2>& points, const Vec2& center) {
  if (points.size() < 3) throw Ambiguous("winding number needs at least 3 points");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const Vec2 a = points[k] - center;
    const Vec2 b = points[k + 1] - center;
    if (a.norm() < 1e-12 || b.norm() < 1e-12) throw Ambiguous("curve passes through the center");
    total += std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
  }
  const double turns = total / (2.0 * std::numbers::pi);
  const double nearest = std::round(turns);
  if (std::abs(turns - nearest) >= 0.1) {
    throw Ambiguous("curve is open: total angle is " + std::to_string(turns) + " turns");
  }
  return static_cast<int>(nearest);
}

std::vector<Vec2> close_loop(std::vector<Vec2> points) {
  if (!points.empty()) points.push_back(points.front());
  return points;
}

std::vector<Vec2> horizontal(const std::vector<DroneSample>& trajectory) {
  std::vector<Vec2> out;
  out.reserve(trajectory.size());
  for (const auto& s : trajectory) out.push_back(s.position.head<2>());
  return out;
}

std::vector<Vec2> horizontal(const std::vector<Vec3>& points) {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.head<2>());
  return out;
}

bool wrap_succeeded(const std::vector<Vec2>& trajectory, const Pillar& pillar) {
  return std::abs(winding_number(close_loop(trajectory), pillar.center)) >= 1;
}

}  // namespace cubix
