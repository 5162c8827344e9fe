#include "cubix/trajectory.hpp"

#include <algorithm>
#include <stdexcept>

#include "cubix/errors.hpp"

namespace cubix {

Cubic Cubic::hermite(double p0, double v0, double p1, double v1, double duration) {
  const double t = duration;
  Cubic c;
  c.c0 = p0;
  c.c1 = v0;
  c.c2 = (3.0 * (p1 - p0) - (2.0 * v0 + v1) * t) / (t * t);
  c.c3 = (2.0 * (p0 - p1) + (v0 + v1) * t) / (t * t * t);
  return c;
}

SplineSegment plan_spline(const Pose& q_s, const Twist& qdot_s, const Pose& q_f,
                          const Twist& qdot_f, double duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("spline duration must be positive");

  const Vec3 theta_end = rotation_vector(q_f.orientation * q_s.orientation.conjugate());
  if (theta_end.norm() >= kMaxSegmentRotation) {
    throw RotationTooLarge("segment rotation of " + std::to_string(theta_end.norm()) +
                           " rad is too close to pi");
  }
  // Chart rates at the boundaries; the left Jacobian is the identity at theta = 0.
  const Vec3 rate_start = qdot_s.angular;
  const Vec3 rate_end = left_jacobian_inverse(theta_end) * qdot_f.angular;

  SplineSegment seg;
  seg.start_ = Pose::from(q_s.position, q_s.orientation);
  seg.end_ = Pose::from(q_f.position, q_f.orientation);
  seg.start_twist_ = qdot_s;
  seg.end_twist_ = qdot_f;
  seg.duration_ = duration;
  for (int k = 0; k < 3; ++k) {
    seg.translation_[k] = Cubic::hermite(q_s.position[k], qdot_s.linear[k], q_f.position[k],
                                         qdot_f.linear[k], duration);
    seg.rotation_[k] = Cubic::hermite(0.0, rate_start[k], theta_end[k], rate_end[k], duration);
  }
  return seg;
}

TrajectorySample SplineSegment::sample(double t) const {
  TrajectorySample out;
  if (t < 0.0) {
    out.pose = start_;
    return out;
  }
  if (t > duration_) {
    out.pose = end_;
    return out;
  }
  Vec3 theta, theta_dot, theta_ddot;
  for (int k = 0; k < 3; ++k) {
    out.pose.position[k] = translation_[k].value(t);
    out.twist.linear[k] = translation_[k].rate(t);
    out.acceleration[k] = translation_[k].accel(t);
    theta[k] = rotation_[k].value(t);
    theta_dot[k] = rotation_[k].rate(t);
    theta_ddot[k] = rotation_[k].accel(t);
  }
  out.pose.orientation = canonical(exp_rotation(theta) * start_.orientation);
  const Mat3 jl = left_jacobian(theta);
  out.twist.angular = jl * theta_dot;
  out.acceleration.tail<3>() = jl * theta_ddot + left_jacobian_rate(theta, theta_dot) * theta_dot;
  return out;
}

Trajectory::Trajectory(std::vector<SplineSegment> segments) : segments_(std::move(segments)) {
  starts_.reserve(segments_.size());
  for (const auto& s : segments_) {
    starts_.push_back(total_);
    total_ += s.duration();
  }
}

std::size_t Trajectory::segment_at(double t) const {
  if (segments_.empty()) return 0;
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  if (it == starts_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(starts_.begin(), it) - 1);
}

TrajectorySample Trajectory::sample(double t) const {
  if (segments_.empty()) return {};
  if (t < 0.0) return segments_.front().sample(-1.0);
  if (t >= total_) {
    TrajectorySample out;
    out.pose = segments_.back().end();
    return out;
  }
  const std::size_t i = segment_at(t);
  return segments_[i].sample(t - starts_[i]);
}

}  // namespace cubix
