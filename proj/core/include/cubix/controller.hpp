#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cubix/pid.hpp"
#include "cubix/robot.hpp"
#include "cubix/trajectory.hpp"

namespace cubix {

/// Saturation flag tolerance: f_ref within this of f_max counts as saturated.
inline constexpr double kSaturationTolerance = 1e-6;

/// Everything computed in one pass of the pose-control loop.
struct ControlTick {
  std::uint64_t tick = 0;
  double time = 0.0;
  Pose q;
  Twist qdot;
  Pose q_ref;
  Twist qdot_ref;
  Vec6 qddot_ref = Vec6::Zero();
  Wrench w_fb;
  Wrench w_g;
  Wrench w_ref;
  VecX f_ref;
  VecX f_final;
  VecX currents;
  double residual_norm = 0.0;
  std::vector<std::uint8_t> saturated;
  bool fault = false;

  std::size_t saturation_count() const;
};

/// Closed loop: PID feedback on the measured state plus gravity feedforward.
/// Tension schedule: quasi-static tensions holding the reference pose, with
/// no use of the measurement.
enum class ControlMode { kClosedLoop, kTensionSchedule };

/// One closed-loop pass: PID -> gravity feedforward -> allocation ->
/// compensation (capped at f_max) -> currents. Throws DegenerateWire or
/// SolverFailure.
ControlTick control_step(const Pose& q, const Twist& qdot, const TrajectorySample& ref,
                         const RobotModel& robot, const PidGains& gains, PidState& pid,
                         double dt);

/// Tensions for holding the reference pose against gravity, allocated at the
/// reference pose. Throws DegenerateWire or SolverFailure.
ControlTick tension_schedule_step(const Pose& q, const Twist& qdot,
                                  const TrajectorySample& ref, const RobotModel& robot);

/// Stateful wrapper running the loop at a fixed rate. A failed pass holds the
/// previous currents and flags the tick as a fault.
class PoseController {
 public:
  PoseController(RobotModel robot, PidGains gains, ControlMode mode = ControlMode::kClosedLoop);

  ControlTick update(std::uint64_t tick, double time, const Pose& q, const Twist& qdot,
                     const TrajectorySample& ref, double dt);

  const VecX& currents() const { return last_.currents; }
  std::uint64_t fault_count() const { return faults_; }
  const std::string& last_fault() const { return last_fault_; }
  const RobotModel& robot() const { return robot_; }

 private:
  RobotModel robot_;
  PidGains gains_;
  ControlMode mode_;
  PidState pid_;
  ControlTick last_;
  std::uint64_t faults_ = 0;
  std::string last_fault_;
};

}  // namespace cubix
