#pragma once

#include "cubix/spatial.hpp"

namespace cubix {

/// Per-axis gains, ordered (x, y, z, rx, ry, rz). Parallel form; the
/// derivative term acts on the measured twist rather than a differenced error.
struct PidGains {
  Vec6 kp = Vec6::Zero();
  Vec6 ki = Vec6::Zero();
  Vec6 kd = Vec6::Zero();
  /// Clamp on the integral accumulator (error * s), per axis.
  Vec6 integral_limit = Vec6::Constant(0.1);
};

/// Integral accumulator, owned by the control loop.
struct PidState {
  Vec6 integral = Vec6::Zero();
  void reset() { integral.setZero(); }
};

/// Stacked pose error (position; rotation vector of q_ref * q^-1).
Vec6 pose_error(const Pose& q, const Pose& q_ref);

/// Feedback wrench from pose and twist errors. Advances `state` by `dt`
/// (no integration when dt == 0).
Wrench wrench_error_pid(const Pose& q, const Twist& qdot, const Pose& q_ref,
                        const Twist& qdot_ref, const PidGains& gains, PidState& state,
                        double dt);

}  // namespace cubix
