#pragma once

#include <cstddef>
#include <vector>

#include "cubix/tension_allocation.hpp"
#include "cubix/wire_geometry.hpp"

namespace cubix {

/// Weight on the residual when testing whether a wrench is reachable.
inline constexpr double kAchievabilityWeight = 1e8;
/// Force (N) and torque (Nm) residual below which a wrench counts as reached.
inline constexpr double kAchievabilityTolerance = 1e-4;
/// Target-shift rounds applied when the penalty alone leaves a residual.
inline constexpr int kRefinementRounds = 6;

struct FeasibilityOptions {
  /// Number of sampled unit wrench directions (the 12 signed axes first, then
  /// a Halton sequence mapped onto the 6-sphere).
  std::size_t directions = 1000;
  /// Torque normalization length: a unit direction (d_f, d_t) is the wrench
  /// (d_f, torque_scale * d_t). Matches the 1/radius^2 torque weighting.
  double torque_scale = 0.2;
  /// Wrench the ball is centered on.
  Wrench nominal;
  /// Directions whose reachable scale is at or below this are unreachable.
  double min_scale = 1e-6;
  /// Relative bisection tolerance on the reachable scale.
  double scale_tolerance = 1e-6;
};

struct FeasibilityReport {
  int rank = 0;
  /// The columns of W positively span the wrench space: rank 6 and some
  /// strictly positive tensions within bounds produce zero wrench.
  bool positive_spanning = false;
  /// Positively spanning, and every sampled direction is reachable around the
  /// nominal wrench.
  bool fully_constrained = false;
  /// Smallest reachable scale over the sampled directions, weighted norm.
  double margin = 0.0;
  /// Wires at f_max when realizing the nominal wrench plus the worst direction.
  std::vector<std::size_t> saturating_wires;
  std::size_t directions_sampled = 0;
  std::size_t unreachable_directions = 0;
  bool nominal_achievable = false;
};

struct AchievabilityResult {
  bool achievable = false;
  VecX tensions;
  Wrench residual;
  std::vector<std::size_t> saturating_wires;
};

/// Numerical rank of W (singular values above 1e-9 * largest).
int wrench_rank(const WireJacobian& jacobian);

/// Rank 6 and a zero wrench reachable with every tension at least
/// min(1 N, 1% of its upper bound).
bool positively_spanning(const WireJacobian& jacobian, const TensionBounds& bounds);

/// Sampled unit directions in the 6-D wrench space (deterministic).
std::vector<Vec6> sample_directions(std::size_t count);

/// Allocation with a heavy residual weight, refined by shifting the target by
/// the leftover residual; reached iff the force and torque residual norms are
/// both below kAchievabilityTolerance.
AchievabilityResult wrench_achievable(const WireJacobian& jacobian, const Wrench& target,
                                      const TensionBounds& bounds);

/// Largest s >= 0 such that nominal + s * direction is achievable (0 when the
/// nominal wrench itself is not).
double reachable_scale(const WireJacobian& jacobian, const Wrench& nominal,
                       const Wrench& direction, const TensionBounds& bounds,
                       double relative_tolerance = 1e-6);

/// Rank, positive-spanning test and margin around the nominal wrench. Bounds
/// may be degenerate (f_min == f_max).
FeasibilityReport controllability(const WireJacobian& jacobian, const TensionBounds& bounds,
                                  const FeasibilityOptions& options = {});

}  // namespace cubix
