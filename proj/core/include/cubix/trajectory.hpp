#pragma once

#include <array>
#include <vector>

#include "cubix/spatial.hpp"

namespace cubix {

/// Largest relative rotation a single segment may span, rad.
inline constexpr double kMaxSegmentRotation = 3.141592653589793 - 0.1;

/// q(t) = c0 + c1 t + c2 t^2 + c3 t^3
struct Cubic {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;

  /// Unique cubic with the given end values and slopes over [0, T].
  static Cubic hermite(double p0, double v0, double p1, double v1, double duration);
  double value(double t) const { return c0 + t * (c1 + t * (c2 + t * c3)); }
  double rate(double t) const { return c1 + t * (2.0 * c2 + 3.0 * t * c3); }
  double accel(double t) const { return 2.0 * c2 + 6.0 * c3 * t; }
};

struct TrajectorySample {
  Pose pose;
  Twist twist;
  /// Linear and angular acceleration, world frame.
  Vec6 acceleration = Vec6::Zero();
};

/// Third-order segment between two poses with boundary twists. Translation is
/// interpolated per axis; orientation by a cubic on the rotation vector of the
/// motion relative to the start attitude.
class SplineSegment {
 public:
  const Pose& start() const { return start_; }
  const Pose& end() const { return end_; }
  const Twist& start_twist() const { return start_twist_; }
  const Twist& end_twist() const { return end_twist_; }
  double duration() const { return duration_; }
  const std::array<Cubic, 3>& translation() const { return translation_; }
  const std::array<Cubic, 3>& rotation() const { return rotation_; }

  /// Reference at time t; outside [0, T] the endpoint with zero rates.
  TrajectorySample sample(double t) const;

 private:
  friend SplineSegment plan_spline(const Pose&, const Twist&, const Pose&, const Twist&, double);

  Pose start_, end_;
  Twist start_twist_, end_twist_;
  double duration_ = 0.0;
  std::array<Cubic, 3> translation_{};
  std::array<Cubic, 3> rotation_{};
};

/// Throws std::invalid_argument for T <= 0 and RotationTooLarge when the
/// relative rotation reaches kMaxSegmentRotation.
SplineSegment plan_spline(const Pose& q_s, const Twist& qdot_s, const Pose& q_f,
                          const Twist& qdot_f, double duration);

inline TrajectorySample sample(const SplineSegment& seg, double t) { return seg.sample(t); }

/// Segments played back to back.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<SplineSegment> segments);

  double duration() const { return total_; }
  std::size_t size() const { return segments_.size(); }
  const std::vector<SplineSegment>& segments() const { return segments_; }
  /// Segment active at time t (clamped to the first/last).
  std::size_t segment_at(double t) const;
  double segment_start(std::size_t index) const { return starts_.at(index); }
  /// Final pose hold after the last segment, initial pose before the first.
  TrajectorySample sample(double t) const;

 private:
  std::vector<SplineSegment> segments_;
  std::vector<double> starts_;
  double total_ = 0.0;
};

}  // namespace cubix
