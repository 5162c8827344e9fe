#include "cubix/box_qp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "cubix/errors.hpp"

namespace cubix {

namespace {

enum class Bound : unsigned char { kFree, kLower, kUpper };

double problem_scale(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                     const Eigen::VectorXd& x) {
  const double h_norm = h.cwiseAbs().rowwise().sum().maxCoeff();
  return 1.0 + g.lpNorm<Eigen::Infinity>() + h_norm * x.lpNorm<Eigen::Infinity>();
}

double projected_gradient_norm(const Eigen::VectorXd& grad, const std::vector<Bound>& state) {
  double worst = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const double gi = grad[static_cast<Eigen::Index>(i)];
    double v = 0.0;
    switch (state[i]) {
      case Bound::kFree: v = std::abs(gi); break;
      case Bound::kLower: v = std::max(0.0, -gi); break;
      case Bound::kUpper: v = std::max(0.0, gi); break;
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

BoxQpResult solve_box_qp(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& gradient,
                         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                         int max_iterations) {
  const Eigen::Index n = gradient.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n).cwiseMax(lower).cwiseMin(upper);
  std::vector<Bound> state(static_cast<std::size_t>(n), Bound::kFree);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lower[i] >= upper[i]) state[static_cast<std::size_t>(i)] = Bound::kLower;
  }

  std::vector<Eigen::Index> free_idx;
  free_idx.reserve(static_cast<std::size_t>(n));
  Eigen::VectorXd target(n);

  for (int iter = 0; iter <= max_iterations; ++iter) {
    free_idx.clear();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[static_cast<std::size_t>(i)] == Bound::kFree) free_idx.push_back(i);
    }
    const auto nf = static_cast<Eigen::Index>(free_idx.size());

    // Minimizer over the free variables with the working set held fixed.
    target = x;
    if (nf > 0) {
      Eigen::MatrixXd hff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        const Eigen::Index ia = free_idx[static_cast<std::size_t>(a)];
        double r = -gradient[ia];
        for (Eigen::Index j = 0; j < n; ++j) {
          if (state[static_cast<std::size_t>(j)] != Bound::kFree) r -= hessian(ia, j) * x[j];
        }
        rhs[a] = r;
        for (Eigen::Index b = 0; b < nf; ++b) {
          hff(a, b) = hessian(ia, free_idx[static_cast<std::size_t>(b)]);
        }
      }
      Eigen::LLT<Eigen::MatrixXd> llt(hff);
      if (llt.info() != Eigen::Success) {
        throw SolverFailure("box QP: reduced Hessian is not positive definite");
      }
      Eigen::VectorXd sol = llt.solve(rhs);
      sol += llt.solve(rhs - hff * sol);  // one refinement step
      for (Eigen::Index a = 0; a < nf; ++a) target[free_idx[static_cast<std::size_t>(a)]] = sol[a];
    }

    // Longest feasible step toward the target.
    double step = 1.0;
    Eigen::Index blocking = -1;
    Bound blocking_side = Bound::kFree;
    for (const Eigen::Index i : free_idx) {
      const double d = target[i] - x[i];
      if (target[i] < lower[i] && d < 0.0) {
        const double t = (lower[i] - x[i]) / d;
        if (t < step) { step = t; blocking = i; blocking_side = Bound::kLower; }
      } else if (target[i] > upper[i] && d > 0.0) {
        const double t = (upper[i] - x[i]) / d;
        if (t < step) { step = t; blocking = i; blocking_side = Bound::kUpper; }
      }
    }

    if (blocking >= 0) {
      step = std::max(step, 0.0);
      for (const Eigen::Index i : free_idx) {
        x[i] = std::clamp(x[i] + step * (target[i] - x[i]), lower[i], upper[i]);
      }
      x[blocking] = blocking_side == Bound::kLower ? lower[blocking] : upper[blocking];
      state[static_cast<std::size_t>(blocking)] = blocking_side;
      continue;
    }

    for (const Eigen::Index i : free_idx) x[i] = target[i];

    // Release the bound with the most negative multiplier, if any.
    const Eigen::VectorXd grad = hessian * x + gradient;
    const double scale = problem_scale(hessian, gradient, x);
    const double tol = 1e-11 * scale;
    Eigen::Index release = -1;
    double worst = -tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto s = state[static_cast<std::size_t>(i)];
      if (s == Bound::kFree || lower[i] >= upper[i]) continue;
      const double multiplier = s == Bound::kLower ? grad[i] : -grad[i];
      if (multiplier < worst) { worst = multiplier; release = i; }
    }
    if (release < 0) {
      return {x, iter + 1, projected_gradient_norm(grad, state) / scale};
    }
    state[static_cast<std::size_t>(release)] = Bound::kFree;
  }
  throw SolverFailure("box QP: no KKT point within " + std::to_string(max_iterations) +
                      " iterations");
}

}  // namespace cubix
