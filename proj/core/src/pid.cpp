#include "cubix/pid.hpp"

namespace cubix {

Vec6 pose_error(const Pose& q, const Pose& q_ref) {
  Vec6 e;
  e << q_ref.position - q.position, orientation_error(q_ref.orientation, q.orientation);
  return e;
}

Wrench wrench_error_pid(const Pose& q, const Twist& qdot, const Pose& q_ref,
                        const Twist& qdot_ref, const PidGains& gains, PidState& state,
                        double dt) {
  const Vec6 e = pose_error(q, q_ref);
  const Vec6 edot = qdot_ref.as_vector() - qdot.as_vector();
  if (dt > 0.0) {
    state.integral = (state.integral + e * dt)
                         .cwiseMin(gains.integral_limit)
                         .cwiseMax(-gains.integral_limit);
  }
  const Vec6 out = gains.kp.cwiseProduct(e) + gains.ki.cwiseProduct(state.integral) +
                   gains.kd.cwiseProduct(edot);
  return Wrench::from_vector(out);
}

}  // namespace cubix
