#include "cubix/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cubix/errors.hpp"

namespace cubix {

namespace {

Mat3 world_inertia(const Quat& orientation, const Mat3& body_inertia) {
  const Mat3 r = orientation.toRotationMatrix();
  return r * body_inertia * r.transpose();
}

}  // namespace

SimState SimState::make(const Pose& pose, const Twist& twist, const BodyModel& body,
                        Eigen::Index wires) {
  SimState s;
  s.pose = Pose::from(pose.position, pose.orientation);
  s.twist = twist;
  s.tensions = VecX::Zero(wires);
  s.angular_momentum = world_inertia(s.pose.orientation, body.inertia) * twist.angular;
  return s;
}

VecX exerted_tensions(const SimState& state, const VecX& currents, const RobotModel& robot,
                      const SimParams& params) {
  VecX f = tensions_from_currents(currents, robot.winches);
  const WireState ws = wire_lengths_and_rates(state.pose, state.twist, robot.wires);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    // Drum friction eats part of the motor force while winding in and adds to
    // it while paying out; rotor inertia is negligible at these speeds.
    if (static_cast<std::size_t>(i) < robot.winches.size()) {
      const WinchParams& w = robot.winches[static_cast<std::size_t>(i)];
      f[i] -= compensation_tension(w, -ws.length_rates[i] / w.pulley_radius, 0.0);
    }
    f[i] = std::clamp(f[i], 0.0, robot.bounds.f_max[i]);
    if (ws.length_rates[i] < -params.max_winding_speed) f[i] = 0.0;
  }
  return f;
}

SimState step(const SimState& state, const VecX& currents, double dt, const RobotModel& robot,
              const SimParams& params) {
  if (!(dt > 0.0 && dt <= 0.01)) throw std::invalid_argument("dt must lie in (0, 0.01]");

  SimState next;
  next.tensions = exerted_tensions(state, currents, robot, params);
  Wrench w = wrench_from_tensions(wire_jacobian(state.pose, robot.wires), next.tensions);
  w.force += robot.body.mass * robot.gravity;

  const Vec3 accel = w.force / robot.body.mass;
  next.twist.linear = state.twist.linear + accel * dt;
  next.pose.position = state.pose.position + state.twist.linear * dt + 0.5 * accel * dt * dt;

  next.angular_momentum = state.angular_momentum + w.torque * dt;
  const Mat3 inertia = world_inertia(state.pose.orientation, robot.body.inertia);
  next.twist.angular = inertia.ldlt().solve(next.angular_momentum);
  next.pose.orientation =
      canonical(exp_rotation(next.twist.angular * dt) * state.pose.orientation);
  next.time = state.time + dt;

  const double v = next.twist.linear.norm();
  const double omega = next.twist.angular.norm();
  if (!std::isfinite(v) || !std::isfinite(omega) || !next.pose.position.allFinite() ||
      v > params.max_linear_speed || omega > params.max_angular_speed) {
    throw NumericalBlowup("body speed out of bounds at t = " + std::to_string(next.time) +
                          " s (|v| = " + std::to_string(v) + ", |w| = " +
                          std::to_string(omega) + ")");
  }
  return next;
}

double mechanical_energy(const SimState& state, const BodyModel& body, const Vec3& gravity) {
  const double kinetic = 0.5 * body.mass * state.twist.linear.squaredNorm() +
                         0.5 * state.twist.angular.dot(state.angular_momentum);
  return kinetic - body.mass * gravity.dot(state.pose.position);
}

void SensorModel::validate() const {
  if (!(position_noise >= 0.0 && rotation_noise >= 0.0 && linear_velocity_noise >= 0.0 &&
        angular_velocity_noise >= 0.0)) {
    throw std::invalid_argument("sensor noise must be non-negative");
  }
  if (latency < 0) throw std::invalid_argument("sensor latency must be non-negative");
}

Sensor::Sensor(SensorModel model, std::uint64_t seed) : model_(std::move(model)), rng_(seed) {
  model_.validate();
}

Vec3 Sensor::noise(double sigma) {
  Vec3 n;
  for (int k = 0; k < 3; ++k) n[k] = normal_(rng_);
  return sigma * n;
}

Odometry Sensor::sense(const SimState& state) {
  const Pose& cam_in_body = model_.extrinsic.camera_in_body();
  Pose cam = compose(state.pose, cam_in_body);
  Twist cam_twist;
  cam_twist.angular = state.twist.angular;
  cam_twist.linear =
      state.twist.linear + state.twist.angular.cross(cam.position - state.pose.position);

  // Draw every component each call so the noise stream does not depend on
  // which standard deviations are zero.
  const Vec3 dp = noise(model_.position_noise);
  const Vec3 dr = noise(model_.rotation_noise);
  const Vec3 dv = noise(model_.linear_velocity_noise);
  const Vec3 dw = noise(model_.angular_velocity_noise);
  if (model_.position_noise > 0.0) cam.position += dp;
  if (model_.rotation_noise > 0.0) cam.orientation = canonical(exp_rotation(dr) * cam.orientation);
  if (model_.linear_velocity_noise > 0.0) cam_twist.linear += dv;
  if (model_.angular_velocity_noise > 0.0) cam_twist.angular += dw;

  history_.push_back(transform_odometry(cam, cam_twist, model_.extrinsic));
  while (history_.size() > static_cast<std::size_t>(model_.latency) + 1) history_.pop_front();
  return history_.front();
}

}  // namespace cubix
