#pragma once

#include <span>
#include <vector>

#include "cubix/spatial.hpp"
#include "cubix/wire_geometry.hpp"

namespace cubix {

/// Continuous tension rating of one winch, newtons.
inline constexpr double kDefaultMaxTension = 180.0;
/// Default pretension keeping every wire taut, newtons.
inline constexpr double kDefaultMinTension = 2.0;

struct TensionBounds {
  VecX f_min;
  VecX f_max;

  static TensionBounds uniform(Eigen::Index wires, double f_min = kDefaultMinTension,
                               double f_max = kDefaultMaxTension);
  Eigen::Index size() const { return f_min.size(); }
  /// Throws std::invalid_argument unless 0 <= f_min < f_max componentwise.
  void validate() const;
};

/// Weight on the wrench residual of the allocation problem.
struct AllocationWeights {
  Mat6 lambda = Mat6::Identity();

  /// 1e9 on force rows and 1e9 / body_radius^2 on torque rows.
  static AllocationWeights defaults(double body_radius);
  static AllocationWeights diagonal(const Vec6& diag);
  /// Throws std::invalid_argument unless symmetric (1e-12) and positive definite.
  void validate() const;
};

/// Winch and drive-train constants of one wire module.
struct WinchParams {
  double pulley_radius = 0.008;      ///< m
  double gear_ratio = 53.0;
  double torque_constant = 0.014;    ///< Nm/A
  double efficiency_pulley = 1.0;
  double efficiency_gear = 1.0;
  double rotor_inertia = 1e-6;       ///< kg m^2 at the winch shaft
  double coulomb_friction = 0.002;   ///< Nm
  double viscous_friction = 1e-4;    ///< Nm s/rad

  /// Amperes per newton of wire tension.
  double amps_per_newton() const {
    return pulley_radius / (efficiency_pulley * efficiency_gear * gear_ratio * torque_constant);
  }
  /// Throws std::invalid_argument when a constant is out of range.
  void validate() const;
};

struct Allocation {
  VecX tensions;
  /// w_ref - W * tensions
  Wrench residual;
  double objective = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
};

/// Value of ||f||^2 + (w - W f)' Lambda (w - W f).
double allocation_objective(const WireJacobian& jacobian, const Wrench& w_ref,
                            const AllocationWeights& weights, const VecX& tensions);

/// Tensions within bounds minimizing allocation_objective. Iteration cap is
/// 10 * m working-set changes; throws SolverFailure beyond it.
Allocation allocate(const WireJacobian& jacobian, const Wrench& w_ref,
                    const TensionBounds& bounds, const AllocationWeights& weights);

/// Extra tension needed to spin up the winch rotor and overcome shaft friction
/// at winch speed `omega` and acceleration `alpha` (rad/s, rad/s^2, positive
/// while winding in).
double compensation_tension(const WinchParams& winch, double omega, double alpha);

/// f_ref plus inertia and friction compensation, clamped at zero. The winch
/// acceleration comes from the commanded body acceleration projected on each
/// wire; the winch speed from the measured length rates.
VecX compensate(const VecX& f_ref, const Vec6& qddot_ref,
                std::span<const WireDirection> directions, const WireState& wire_state,
                std::span<const WinchParams> winches);

/// Motor currents for the given tensions (linear map per winch).
VecX to_currents(const VecX& tensions, std::span<const WinchParams> winches);
/// Inverse of to_currents.
VecX tensions_from_currents(const VecX& currents, std::span<const WinchParams> winches);

}  // namespace cubix
