#include "cubix/controller.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cubix/errors.hpp"

namespace cubix {

BodyModel BodyModel::solid_cube(double mass, double side) {
  BodyModel b;
  b.mass = mass;
  b.inertia = Mat3::Identity() * (mass * side * side / 6.0);
  b.radius = 0.5 * side * std::sqrt(3.0);
  return b;
}

void BodyModel::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("body mass must be positive");
  if (!((inertia - inertia.transpose()).cwiseAbs().maxCoeff() <= 1e-12)) {
    throw std::invalid_argument("body inertia must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw std::invalid_argument("body inertia must be positive definite");
  }
  if (!(radius > 0.0)) throw std::invalid_argument("body radius must be positive");
}

Wrench gravity_compensation(const BodyModel& body, const Vec3& gravity) {
  return {-body.mass * gravity, Vec3::Zero()};
}

std::size_t ControlTick::saturation_count() const {
  std::size_t n = 0;
  for (const auto s : saturated) n += s != 0;
  return n;
}

namespace {

void finish_tick(ControlTick& tick, const RobotModel& robot, const WireJacobian& jacobian,
                 std::span<const WireDirection> dirs, const WireState& wire_state) {
  const Allocation alloc = allocate(jacobian, tick.w_ref, robot.bounds, robot.weights);
  tick.f_ref = alloc.tensions;
  tick.residual_norm = alloc.residual.as_vector().norm();
  // Compensation may push a saturated wire past its rating; the module cannot
  // deliver that, so the command is capped.
  tick.f_final = compensate(tick.f_ref, tick.qddot_ref, dirs, wire_state, robot.winches)
                     .cwiseMin(robot.bounds.f_max);
  tick.currents = to_currents(tick.f_final, robot.winches);
  tick.saturated.assign(static_cast<std::size_t>(tick.f_ref.size()), 0);
  for (Eigen::Index i = 0; i < tick.f_ref.size(); ++i) {
    tick.saturated[static_cast<std::size_t>(i)] =
        std::abs(tick.f_ref[i] - robot.bounds.f_max[i]) <= kSaturationTolerance;
  }
}

void fill_reference(ControlTick& tick, const Pose& q, const Twist& qdot,
                    const TrajectorySample& ref) {
  tick.q = q;
  tick.qdot = qdot;
  tick.q_ref = ref.pose;
  tick.qdot_ref = ref.twist;
  tick.qddot_ref = ref.acceleration;
}

}  // namespace

ControlTick control_step(const Pose& q, const Twist& qdot, const TrajectorySample& ref,
                         const RobotModel& robot, const PidGains& gains, PidState& pid,
                         double dt) {
  ControlTick tick;
  fill_reference(tick, q, qdot, ref);
  // Geometry first, so a degenerate wire leaves the integrator untouched.
  const auto dirs = wire_directions(q, robot.wires);
  const WireJacobian jacobian = wire_jacobian(dirs);
  const WireState wire_state = wire_lengths_and_rates(q, qdot, robot.wires);

  PidState trial = pid;
  tick.w_fb = wrench_error_pid(q, qdot, ref.pose, ref.twist, gains, trial, dt);
  tick.w_g = gravity_compensation(robot.body, robot.gravity);
  tick.w_ref = tick.w_fb + tick.w_g;
  finish_tick(tick, robot, jacobian, dirs, wire_state);
  pid = trial;
  return tick;
}

ControlTick tension_schedule_step(const Pose& q, const Twist& qdot,
                                  const TrajectorySample& ref, const RobotModel& robot) {
  ControlTick tick;
  fill_reference(tick, q, qdot, ref);
  const auto dirs = wire_directions(ref.pose, robot.wires);
  const WireJacobian jacobian = wire_jacobian(dirs);
  const WireState wire_state = wire_lengths_and_rates(ref.pose, ref.twist, robot.wires);
  tick.w_g = gravity_compensation(robot.body, robot.gravity);
  tick.w_ref = tick.w_g;
  finish_tick(tick, robot, jacobian, dirs, wire_state);
  return tick;
}

PoseController::PoseController(RobotModel robot, PidGains gains, ControlMode mode)
    : robot_(std::move(robot)), gains_(gains), mode_(mode) {
  const Eigen::Index m = robot_.wire_count();
  if (robot_.bounds.size() != m || static_cast<Eigen::Index>(robot_.winches.size()) != m) {
    throw std::invalid_argument("robot model wire/bounds/winch counts differ");
  }
  last_.f_ref = VecX::Zero(m);
  last_.f_final = VecX::Zero(m);
  last_.currents = VecX::Zero(m);
  last_.saturated.assign(static_cast<std::size_t>(m), 0);
}

ControlTick PoseController::update(std::uint64_t tick, double time, const Pose& q,
                                   const Twist& qdot, const TrajectorySample& ref, double dt) {
  ControlTick out;
  try {
    out = mode_ == ControlMode::kClosedLoop
              ? control_step(q, qdot, ref, robot_, gains_, pid_, dt)
              : tension_schedule_step(q, qdot, ref, robot_);
  } catch (const Error& e) {
    ++faults_;
    last_fault_ = e.what();
    out = last_;
    fill_reference(out, q, qdot, ref);
    out.fault = true;
  }
  out.tick = tick;
  out.time = time;
  last_ = out;
  return out;
}

}  // namespace cubix
