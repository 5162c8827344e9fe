#include "cubix/wire_geometry.hpp"

#include "cubix/errors.hpp"

namespace cubix {

std::vector<WireDirection> wire_directions(const Pose& q,
                                           std::span<const WireAttachment> wires) {
  std::vector<WireDirection> out;
  out.reserve(wires.size());
  for (std::size_t i = 0; i < wires.size(); ++i) {
    const Vec3 lever = q.orientation * wires[i].exit_point_body;
    const Vec3 exit = q.position + lever;
    const Vec3 span = wires[i].anchor_world - exit;
    const double length = span.norm();
    if (!(length > kDegenerateSeparation)) throw DegenerateWire(i, length);
    out.push_back({span / length, lever, exit, length});
  }
  return out;
}

WireJacobian wire_jacobian(std::span<const WireDirection> directions) {
  WireJacobian w(6, static_cast<Eigen::Index>(directions.size()));
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    w.col(col).head<3>() = directions[i].direction;
    w.col(col).tail<3>() = directions[i].lever.cross(directions[i].direction);
  }
  return w;
}

WireJacobian wire_jacobian(const Pose& q, std::span<const WireAttachment> wires) {
  return wire_jacobian(wire_directions(q, wires));
}

Wrench wrench_from_tensions(const WireJacobian& jacobian, const VecX& tensions) {
  return Wrench::from_vector(jacobian * tensions);
}

WireState wire_lengths_and_rates(const Pose& q, const Twist& qdot,
                                 std::span<const WireAttachment> wires) {
  const auto dirs = wire_directions(q, wires);
  WireState state{VecX(dirs.size()), VecX(dirs.size())};
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const Vec3 exit_velocity = qdot.linear + qdot.angular.cross(dirs[i].lever);
    const auto k = static_cast<Eigen::Index>(i);
    state.lengths[k] = dirs[i].length;
    state.length_rates[k] = -dirs[i].direction.dot(exit_velocity);
  }
  return state;
}

}  // namespace cubix
