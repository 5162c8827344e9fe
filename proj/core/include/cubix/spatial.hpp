#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace cubix {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Quat = Eigen::Quaterniond;

/// Rigid pose of the floating body. `orientation` maps body to world and is
/// kept unit-norm with a non-negative scalar part.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& p) { return {p, Quat::Identity()}; }
  static Pose from(const Vec3& p, const Quat& q);

  Pose inverse() const;
  Vec3 transform(const Vec3& point) const { return position + orientation * point; }
  Mat3 rotation() const { return orientation.toRotationMatrix(); }
};

/// Composition a * b: apply b, then a.
Pose compose(const Pose& a, const Pose& b);
inline Pose operator*(const Pose& a, const Pose& b) { return compose(a, b); }

/// Unit quaternion with w >= 0.
Quat canonical(const Quat& q);

/// World-frame velocity of the body center.
struct Twist {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();

  Vec6 as_vector() const;
  static Twist from_vector(const Vec6& v);
};

/// World-frame force and torque about the body center.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  Vec6 as_vector() const;
  static Wrench from_vector(const Vec6& v);

  Wrench& operator+=(const Wrench& o) {
    force += o.force;
    torque += o.torque;
    return *this;
  }
};

inline Wrench operator+(Wrench a, const Wrench& b) { return a += b; }
inline Wrench operator-(const Wrench& a, const Wrench& b) {
  return {a.force - b.force, a.torque - b.torque};
}
inline Wrench operator*(double s, const Wrench& w) { return {s * w.force, s * w.torque}; }

/// Fixed camera-to-body transform: maps camera-frame coordinates into the body
/// frame, i.e. `camera_in_body.position` is the camera origin seen from the body
/// center.
class Extrinsic {
 public:
  Extrinsic() = default;
  /// Throws std::invalid_argument unless `rotation` is orthonormal with det +1.
  Extrinsic(const Mat3& rotation, const Vec3& camera_position);
  explicit Extrinsic(const Pose& camera_in_body);

  const Pose& camera_in_body() const { return camera_in_body_; }

 private:
  Pose camera_in_body_;
};

/// Rotation vector (axis * angle, angle in [0, pi]) of a unit quaternion.
Vec3 rotation_vector(const Quat& q);
/// Unit quaternion for a rotation vector.
Quat exp_rotation(const Vec3& rotvec);

/// Rotation vector of q_ref * q^-1, i.e. the world-frame rotation taking the
/// measured attitude onto the reference.
Vec3 orientation_error(const Quat& q_ref, const Quat& q);

Mat3 skew(const Vec3& v);

/// Left Jacobian of SO(3): for R(t) = Exp(theta(t)) R0 the world angular
/// velocity is left_jacobian(theta) * theta_dot.
Mat3 left_jacobian(const Vec3& theta);
Mat3 left_jacobian_inverse(const Vec3& theta);
/// d/dt left_jacobian(theta(t)) for the given theta_dot.
Mat3 left_jacobian_rate(const Vec3& theta, const Vec3& theta_dot);

/// Convert camera odometry (world pose and world-frame twist of the camera)
/// into the pose and twist of the body center.
struct Odometry {
  Pose pose;
  Twist twist;
};
Odometry transform_odometry(const Pose& camera_pose, const Twist& camera_twist,
                            const Extrinsic& ext);

}  // namespace cubix
