#pragma once

#include <Eigen/Core>

namespace cubix {

struct BoxQpResult {
  Eigen::VectorXd x;
  int iterations = 0;
  /// Infinity norm of the projected gradient, relative to the problem scale.
  double kkt_residual = 0.0;
};

/// Solves  min 0.5 x'Hx + g'x  s.t.  lower <= x <= upper  for symmetric
/// positive-definite H with a dense primal active-set method. Starts from the
/// feasible point closest to the origin with every variable free.
///
/// Throws SolverFailure when `max_iterations` working-set changes do not reach
/// a KKT point, or when the free-variable block of H is not positive definite.
BoxQpResult solve_box_qp(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& gradient,
                         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                         int max_iterations);

}  // namespace cubix
