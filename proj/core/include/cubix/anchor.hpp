#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cubix/spatial.hpp"

namespace cubix {

using Vec2 = Eigen::Vector2d;

/// Vertical pillar with a rectangular footprint.
struct Pillar {
  Vec2 center = Vec2::Zero();
  Vec2 half_extents{0.175, 0.35};
  double z_min = 0.0;
  double z_max = 2.0;

  /// True when `p` lies strictly inside the footprint grown by `margin`.
  bool inside(const Vec2& p, double margin) const;
};

struct WorldBounds {
  Vec2 min{-10.0, -10.0};
  Vec2 max{10.0, 10.0};
  bool contains(const Vec2& p) const;
};

struct WrapOptions {
  double clearance = 0.3;  ///< m between footprint and circuit
  double step = 0.1;       ///< maximum waypoint spacing, m
  double altitude = 1.0;   ///< flight height, m
  WorldBounds bounds;
};

/// Drone waypoints around a pillar. The wire runs from `wire_origin` along the
/// flown path.
struct AnchorPath {
  std::vector<Vec3> waypoints;
  Vec3 wire_origin = Vec3::Zero();
  /// Corners of the circuit, counter-clockwise, starting nearest the approach.
  std::vector<Vec2> corners;
};

/// Rectangular counter-clockwise circuit at `clearance` around the pillar,
/// entered from `approach` and closed past the first corner so the wire
/// crosses its own path. Throws NoClearance when the approach lies inside the
/// grown footprint or the circuit leaves the world bounds.
AnchorPath plan_wrap_path(const Pillar& pillar, const Pose& approach, const Vec3& wire_origin,
                          const WrapOptions& options = {});

/// Synthetic tag-relative position measurement replacing image-based tag
/// detection. The tag sits at `tag_position` facing `tag_normal`.
struct RelativePoseSensor {
  double noise_std = 0.0;   ///< m, per axis
  double range = 4.0;       ///< m
  double fov_half_angle = 1.2;  ///< rad, cone around the tag normal
  Vec2 tag_position = Vec2::Zero();
  Vec2 tag_normal{0.0, 1.0};

  bool detects(const Vec3& drone) const;
};

/// Velocity PID of the kinematic drone.
struct DroneGains {
  double kp = 1.5;
  double ki = 0.0;
  double kd = 0.0;
  double speed_cap = 0.5;        ///< m/s
  double capture_radius = 0.05;  ///< m
  /// Weight of a tag measurement against the dead-reckoned estimate.
  double measurement_gain = 0.2;
};

struct DroneSample {
  double time = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 estimate = Vec3::Zero();
  bool tag_visible = false;
  std::size_t active_waypoint = 0;
};

struct TrackOptions {
  double dt = 0.02;
  /// Give up after this long; <= 0 picks 2 * path length / v_min + 10 s, where
  /// v_min = min(speed_cap, kp * capture_radius).
  double timeout = 0.0;
  WorldBounds bounds;
  std::uint64_t seed = 0;
};

/// Fly the path from the wire origin with a kinematic point drone. A waypoint
/// is captured once the estimated position is within the capture radius.
/// Throws TrackingTimeout when the final waypoint is not captured in time.
std::vector<DroneSample> track_path(const AnchorPath& path, const RelativePoseSensor& sensor,
                                    const DroneGains& gains, const TrackOptions& options);

/// Signed winding number of the polyline about `center` from its summed
/// subtended angles. Throws Ambiguous for fewer than 3 points, a point on the
/// center, or a total angle more than 0.1 turn away from a whole turn.
int winding_number(const std::vector<Vec2>& points, const Vec2& center);

/// The polyline with its first point appended.
std::vector<Vec2> close_loop(std::vector<Vec2> points);

std::vector<Vec2> horizontal(const std::vector<DroneSample>& trajectory);
std::vector<Vec2> horizontal(const std::vector<Vec3>& points);

/// The wire, closed back to where it started, encircles the pillar.
bool wrap_succeeded(const std::vector<Vec2>& trajectory, const Pillar& pillar);

}  // namespace cubix
