#include "cubix/tension_allocation.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cubix/box_qp.hpp"

namespace cubix {

TensionBounds TensionBounds::uniform(Eigen::Index wires, double f_min, double f_max) {
  return {VecX::Constant(wires, f_min), VecX::Constant(wires, f_max)};
}

void TensionBounds::validate() const {
  if (f_min.size() != f_max.size()) throw std::invalid_argument("tension bounds size mismatch");
  for (Eigen::Index i = 0; i < f_min.size(); ++i) {
    if (!(f_min[i] >= 0.0) || !(f_min[i] < f_max[i])) {
      throw std::invalid_argument("tension bounds of wire " + std::to_string(i) +
                                  " violate 0 <= f_min < f_max");
    }
  }
}

AllocationWeights AllocationWeights::defaults(double body_radius) {
  const double torque = 1e9 / (body_radius * body_radius);
  Vec6 d;
  d << 1e9, 1e9, 1e9, torque, torque, torque;
  return diagonal(d);
}

AllocationWeights AllocationWeights::diagonal(const Vec6& diag) {
  return {diag.asDiagonal().toDenseMatrix()};
}

void AllocationWeights::validate() const {
  if (!((lambda - lambda.transpose()).cwiseAbs().maxCoeff() <= 1e-12)) {
    throw std::invalid_argument("allocation weights are not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat6> eig(lambda, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw std::invalid_argument("allocation weights are not positive definite");
  }
}

void WinchParams::validate() const {
  if (!(pulley_radius > 0.0 && gear_ratio > 0.0 && torque_constant > 0.0 &&
        rotor_inertia > 0.0)) {
    throw std::invalid_argument("winch constants must be strictly positive");
  }
  if (!(efficiency_pulley > 0.0 && efficiency_pulley <= 1.0 && efficiency_gear > 0.0 &&
        efficiency_gear <= 1.0)) {
    throw std::invalid_argument("winch efficiencies must lie in (0, 1]");
  }
  if (!(coulomb_friction >= 0.0 && viscous_friction >= 0.0)) {
    throw std::invalid_argument("winch friction must be non-negative");
  }
}

double allocation_objective(const WireJacobian& jacobian, const Wrench& w_ref,
                            const AllocationWeights& weights, const VecX& tensions) {
  const Vec6 r = w_ref.as_vector() - jacobian * tensions;
  return tensions.squaredNorm() + r.dot(weights.lambda * r);
}

Allocation allocate(const WireJacobian& jacobian, const Wrench& w_ref,
                    const TensionBounds& bounds, const AllocationWeights& weights) {
  const Eigen::Index m = jacobian.cols();
  if (bounds.size() != m) throw std::invalid_argument("bounds do not match wire count");

  const Eigen::MatrixXd lw = weights.lambda * jacobian;
  Eigen::MatrixXd hessian = 2.0 * (jacobian.transpose() * lw);
  hessian.diagonal().array() += 2.0;
  hessian = 0.5 * (hessian + hessian.transpose()).eval();
  const VecX gradient = -2.0 * (lw.transpose() * w_ref.as_vector());

  const auto qp = solve_box_qp(hessian, gradient, bounds.f_min, bounds.f_max,
                               10 * static_cast<int>(std::max<Eigen::Index>(m, 1)));
  Allocation out;
  out.tensions = qp.x;
  out.residual = Wrench::from_vector(w_ref.as_vector() - jacobian * qp.x);
  out.objective = allocation_objective(jacobian, w_ref, weights, qp.x);
  out.iterations = qp.iterations;
  out.kkt_residual = qp.kkt_residual;
  return out;
}

double compensation_tension(const WinchParams& winch, double omega, double alpha) {
  const double sign = omega > 0.0 ? 1.0 : (omega < 0.0 ? -1.0 : 0.0);
  const double torque = winch.rotor_inertia * alpha + sign * winch.coulomb_friction +
                        winch.viscous_friction * omega;
  return torque / winch.pulley_radius;
}

VecX compensate(const VecX& f_ref, const Vec6& qddot_ref,
                std::span<const WireDirection> directions, const WireState& wire_state,
                std::span<const WinchParams> winches) {
  VecX out(f_ref.size());
  const Vec3 linear = qddot_ref.head<3>();
  const Vec3 angular = qddot_ref.tail<3>();
  for (Eigen::Index i = 0; i < f_ref.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const WinchParams& w = winches[k];
    const Vec3 exit_accel = linear + angular.cross(directions[k].lever);
    // Length acceleration is -s . a; winding in is positive winch rotation.
    const double alpha = directions[k].direction.dot(exit_accel) / w.pulley_radius;
    const double omega = -wire_state.length_rates[i] / w.pulley_radius;
    out[i] = std::max(0.0, f_ref[i] + compensation_tension(w, omega, alpha));
  }
  return out;
}

VecX to_currents(const VecX& tensions, std::span<const WinchParams> winches) {
  VecX out(tensions.size());
  for (Eigen::Index i = 0; i < tensions.size(); ++i) {
    out[i] = winches[static_cast<std::size_t>(i)].amps_per_newton() * tensions[i];
  }
  return out;
}

VecX tensions_from_currents(const VecX& currents, std::span<const WinchParams> winches) {
  VecX out(currents.size());
  for (Eigen::Index i = 0; i < currents.size(); ++i) {
    out[i] = currents[i] / winches[static_cast<std::size_t>(i)].amps_per_newton();
  }
  return out;
}

}  // namespace cubix
