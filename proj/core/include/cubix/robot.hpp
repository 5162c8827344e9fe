#pragma once

#include <vector>

#include "cubix/spatial.hpp"
#include "cubix/tension_allocation.hpp"
#include "cubix/wire_geometry.hpp"

namespace cubix {

inline constexpr double kStandardGravity = 9.80665;

/// Mass properties of the floating body. The body center is both the center
/// of mass and the torque reference point.
struct BodyModel {
  double mass = 10.0;
  Mat3 inertia = Mat3::Identity() * (10.0 * 0.4 * 0.4 / 6.0);
  /// Upper bound on the distance of any wire exit point from the center.
  double radius = 0.35;

  static BodyModel solid_cube(double mass, double side);
  /// Throws std::invalid_argument unless mass > 0 and inertia is SPD.
  void validate() const;
};

/// Everything the controller and simulator need to know about one robot.
struct RobotModel {
  BodyModel body;
  std::vector<WireAttachment> wires;
  TensionBounds bounds;
  AllocationWeights weights;
  std::vector<WinchParams> winches;
  Vec3 gravity{0.0, 0.0, -kStandardGravity};

  Eigen::Index wire_count() const { return static_cast<Eigen::Index>(wires.size()); }
};

/// Wrench cancelling the weight of the body, about its center.
Wrench gravity_compensation(const BodyModel& body, const Vec3& gravity);

}  // namespace cubix
