#include "cubix/spatial.hpp"

#include <cmath>
#include <stdexcept>

namespace cubix {

namespace {

// Below this angle the SO(3) coefficient functions use their Taylor series.
constexpr double kSeriesAngle = 0.05;

struct JacobianCoefficients {
  double a;        // (1 - cos phi) / phi^2
  double b;        // (phi - sin phi) / phi^3
  double da_phi;   // a'(phi) / phi
  double db_phi;   // b'(phi) / phi
};

JacobianCoefficients coefficients(double phi) {
  const double p2 = phi * phi;
  if (phi < kSeriesAngle) {
    const double p4 = p2 * p2;
    return {0.5 - p2 / 24.0 + p4 / 720.0,
            1.0 / 6.0 - p2 / 120.0 + p4 / 5040.0,
            -1.0 / 12.0 + p2 / 180.0 - p4 / 6720.0,
            -1.0 / 60.0 + p2 / 1260.0 - p4 / 60480.0};
  }
  const double s = std::sin(phi);
  const double half = std::sin(0.5 * phi);
  const double one_minus_cos = 2.0 * half * half;
  const double p3 = p2 * phi;
  return {one_minus_cos / p2, (phi - s) / p3,
          (phi * s - 2.0 * one_minus_cos) / (p3 * phi),
          (one_minus_cos * phi - 3.0 * (phi - s)) / (p3 * p2)};
}

}  // namespace

Quat canonical(const Quat& q) {
  Quat out = q.normalized();
  if (out.w() < 0.0) out.coeffs() *= -1.0;
  return out;
}

Pose Pose::from(const Vec3& p, const Quat& q) { return {p, canonical(q)}; }

Pose Pose::inverse() const {
  const Quat inv = orientation.conjugate();
  return {-(inv * position), canonical(inv)};
}

Pose compose(const Pose& a, const Pose& b) {
  return {a.position + a.orientation * b.position, canonical(a.orientation * b.orientation)};
}

Vec6 Twist::as_vector() const {
  Vec6 v;
  v << linear, angular;
  return v;
}

Twist Twist::from_vector(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }

Vec6 Wrench::as_vector() const {
  Vec6 v;
  v << force, torque;
  return v;
}

Wrench Wrench::from_vector(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }

Extrinsic::Extrinsic(const Mat3& rotation, const Vec3& camera_position) {
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).norm();
  if (ortho > 1e-9 || std::abs(rotation.determinant() - 1.0) > 1e-9) {
    throw std::invalid_argument("extrinsic rotation is not a proper rotation");
  }
  camera_in_body_ = Pose::from(camera_position, Quat(rotation));
}

Extrinsic::Extrinsic(const Pose& camera_in_body)
    : Extrinsic(camera_in_body.rotation(), camera_in_body.position) {}

Vec3 rotation_vector(const Quat& q) {
  const Quat c = canonical(q);
  const Vec3 v = c.vec();
  const double s = v.norm();
  if (s < 1e-8) return (2.0 / c.w()) * v;
  return (2.0 * std::atan2(s, c.w()) / s) * v;
}

Quat exp_rotation(const Vec3& rotvec) {
  const double phi = rotvec.norm();
  const double k = phi < 1e-8 ? 0.5 - phi * phi / 48.0 : std::sin(0.5 * phi) / phi;
  Quat q;
  q.w() = std::cos(0.5 * phi);
  q.vec() = k * rotvec;
  return canonical(q);
}

Vec3 orientation_error(const Quat& q_ref, const Quat& q) {
  return rotation_vector(q_ref * q.conjugate());
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Mat3 left_jacobian(const Vec3& theta) {
  const auto c = coefficients(theta.norm());
  const Mat3 k = skew(theta);
  return Mat3::Identity() + c.a * k + c.b * k * k;
}

Mat3 left_jacobian_inverse(const Vec3& theta) {
  const double phi = theta.norm();
  const double p2 = phi * phi;
  double coeff;
  if (phi < kSeriesAngle) {
    coeff = 1.0 / 12.0 + p2 / 720.0 + p2 * p2 / 30240.0;
  } else {
    const double half = std::sin(0.5 * phi);
    coeff = (1.0 - phi * std::sin(phi) / (4.0 * half * half)) / p2;
  }
  const Mat3 k = skew(theta);
  return Mat3::Identity() - 0.5 * k + coeff * k * k;
}

Mat3 left_jacobian_rate(const Vec3& theta, const Vec3& theta_dot) {
  const auto c = coefficients(theta.norm());
  const double radial = theta.dot(theta_dot);
  const Mat3 k = skew(theta);
  const Mat3 kd = skew(theta_dot);
  return c.da_phi * radial * k + c.a * kd + c.db_phi * radial * k * k +
         c.b * (kd * k + k * kd);
}

Odometry transform_odometry(const Pose& camera_pose, const Twist& camera_twist,
                            const Extrinsic& ext) {
  Odometry out;
  out.pose = compose(camera_pose, ext.camera_in_body().inverse());
  const Vec3 lever = out.pose.position - camera_pose.position;
  out.twist.angular = camera_twist.angular;
  out.twist.linear = camera_twist.linear + camera_twist.angular.cross(lever);
  return out;
}

}  // namespace cubix
