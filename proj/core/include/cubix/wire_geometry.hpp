#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cubix/spatial.hpp"

namespace cubix {

/// Anchor/exit separation at or below which a wire is treated as degenerate.
inline constexpr double kDegenerateSeparation = 1e-6;
/// Winding capacity of one wire module, meters.
inline constexpr double kDefaultWindingCapacity = 5.3;

using VecX = Eigen::VectorXd;
/// 6 x m map from wire tensions to the wrench about the body center. Column i
/// is [s_i; r_i x s_i] with r_i the world-rotated exit offset.
using WireJacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// One wire: where it leaves the body (body frame) and where it is tied
/// (world frame). Columns of every per-wire quantity follow the order of the
/// attachment list.
struct WireAttachment {
  std::size_t id = 0;
  Vec3 exit_point_body = Vec3::Zero();
  Vec3 anchor_world = Vec3::Zero();
};

struct WireDirection {
  Vec3 direction;   ///< unit vector from exit point toward the anchor
  Vec3 lever;       ///< exit offset rotated into world orientation
  Vec3 exit_world;  ///< exit point position in the world
  double length;
};

struct WireState {
  VecX lengths;
  VecX length_rates;  ///< positive while paying out
};

/// Throws DegenerateWire when a wire's separation is <= kDegenerateSeparation.
std::vector<WireDirection> wire_directions(const Pose& q,
                                           std::span<const WireAttachment> wires);

WireJacobian wire_jacobian(const Pose& q, std::span<const WireAttachment> wires);
WireJacobian wire_jacobian(std::span<const WireDirection> directions);

/// Wrench exerted by tensions f, i.e. W * f.
Wrench wrench_from_tensions(const WireJacobian& jacobian, const VecX& tensions);

WireState wire_lengths_and_rates(const Pose& q, const Twist& qdot,
                                 std::span<const WireAttachment> wires);

}  // namespace cubix
