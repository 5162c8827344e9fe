#pragma once

#include <cstdint>
#include <deque>
#include <random>

#include "cubix/robot.hpp"
#include "cubix/spatial.hpp"

namespace cubix {

/// Wire winding speed limit of one module, m/s.
inline constexpr double kDefaultMaxWindingSpeed = 0.242;

struct SimParams {
  double max_winding_speed = kDefaultMaxWindingSpeed;
  /// NumericalBlowup is raised beyond these speeds.
  double max_linear_speed = 10.0;
  double max_angular_speed = 50.0;
};

struct SimState {
  Pose pose;
  Twist twist;
  /// Tensions exerted by the wires over the last step.
  VecX tensions;
  double time = 0.0;
  /// World-frame angular momentum; the integrated rotational state.
  Vec3 angular_momentum = Vec3::Zero();

  /// State at rest or moving with `twist`, momentum consistent with `body`.
  static SimState make(const Pose& pose, const Twist& twist, const BodyModel& body,
                       Eigen::Index wires);
};

/// Tensions the winches actually exert for the commanded currents: inverse
/// current map less drum friction, clamped to [0, f_max], zero for a wire
/// that would have to wind in faster than the winch can.
VecX exerted_tensions(const SimState& state, const VecX& currents, const RobotModel& robot,
                      const SimParams& params);

/// Advance by dt in (0, 0.01]. Velocity and angular momentum are updated from
/// the wrench at the start of the step; position uses the exact constant-
/// acceleration update and attitude the updated angular velocity.
/// Throws NumericalBlowup when a speed bound is exceeded.
SimState step(const SimState& state, const VecX& currents, double dt, const RobotModel& robot,
              const SimParams& params);

/// Kinetic plus gravitational potential energy (zero at the world origin).
double mechanical_energy(const SimState& state, const BodyModel& body, const Vec3& gravity);

struct SensorModel {
  double position_noise = 0.0;          ///< m
  double rotation_noise = 0.0;          ///< rad
  double linear_velocity_noise = 0.0;   ///< m/s
  double angular_velocity_noise = 0.0;  ///< rad/s
  int latency = 0;                      ///< control ticks
  Extrinsic extrinsic;

  /// Throws std::invalid_argument for negative noise or latency.
  void validate() const;
};

/// Tracking camera stand-in: observes the camera frame with Gaussian noise,
/// delays by `latency` calls and returns body-center odometry.
class Sensor {
 public:
  Sensor(SensorModel model, std::uint64_t seed);

  Odometry sense(const SimState& state);

 private:
  SensorModel model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::deque<Odometry> history_;

  Vec3 noise(double sigma);
};

}  // namespace cubix
