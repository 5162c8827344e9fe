#include "cubix/feasibility.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

namespace cubix {

namespace {

double radical_inverse(std::size_t index, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double out = 0.0;
  while (index > 0) {
    out += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return out;
}

std::vector<std::size_t> at_upper(const VecX& f, const TensionBounds& bounds) {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (std::abs(f[i] - bounds.f_max[i]) <= 1e-6) out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace

int wrench_rank(const WireJacobian& jacobian) {
  if (jacobian.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) return 0;
  const double tol = 1e-9 * sv[0];
  return static_cast<int>((sv.array() > tol).count());
}

std::vector<Vec6> sample_directions(std::size_t count) {
  std::vector<Vec6> out;
  out.reserve(count);
  for (int axis = 0; axis < 6 && out.size() < count; ++axis) {
    for (const double sign : {1.0, -1.0}) {
      if (out.size() >= count) break;
      Vec6 d = Vec6::Zero();
      d[axis] = sign;
      out.push_back(d);
    }
  }
  constexpr std::array<unsigned, 6> primes{2, 3, 5, 7, 11, 13};
  for (std::size_t index = 1; out.size() < count; ++index) {
    Vec6 d;
    for (int pair = 0; pair < 3; ++pair) {
      const double u1 = radical_inverse(index, primes[2 * pair]);
      const double u2 = radical_inverse(index, primes[2 * pair + 1]);
      const double radius = std::sqrt(-2.0 * std::log(u1));
      d[2 * pair] = radius * std::cos(2.0 * std::numbers::pi * u2);
      d[2 * pair + 1] = radius * std::sin(2.0 * std::numbers::pi * u2);
    }
    out.push_back(d.normalized());
  }
  return out;
}

AchievabilityResult wrench_achievable(const WireJacobian& jacobian, const Wrench& target,
                                      const TensionBounds& bounds) {
  const AllocationWeights heavy{Mat6::Identity() * kAchievabilityWeight};
  const auto within = [](const Wrench& r) {
    return r.force.norm() < kAchievabilityTolerance && r.torque.norm() < kAchievabilityTolerance;
  };
  // The penalty leaves a residual of order |f| / (weight * sigma_min^2).
  // Shifting the target by it (method of multipliers) drives the residual of
  // a feasible wrench to zero; an infeasible one keeps its distance to the
  // reachable set, so this never manufactures achievability.
  Wrench shifted = target;
  Allocation a = allocate(jacobian, shifted, bounds, heavy);
  Wrench residual = target - wrench_from_tensions(jacobian, a.tensions);
  for (int round = 0; round < kRefinementRounds && !within(residual); ++round) {
    shifted = shifted + residual;
    a = allocate(jacobian, shifted, bounds, heavy);
    const Wrench next = target - wrench_from_tensions(jacobian, a.tensions);
    if (next.as_vector().norm() >= 0.5 * residual.as_vector().norm()) {
      residual = next;
      break;
    }
    residual = next;
  }
  AchievabilityResult out;
  out.tensions = a.tensions;
  out.residual = residual;
  out.achievable = within(residual);
  out.saturating_wires = at_upper(a.tensions, bounds);
  return out;
}

bool positively_spanning(const WireJacobian& jacobian, const TensionBounds& bounds) {
  if (wrench_rank(jacobian) < 6) return false;
  TensionBounds strict = bounds;
  for (Eigen::Index i = 0; i < strict.size(); ++i) {
    const double floor = std::min(1.0, 0.01 * bounds.f_max[i]);
    if (!(floor > 0.0)) return false;
    strict.f_min[i] = std::max(bounds.f_min[i], floor);
    if (!(strict.f_min[i] < strict.f_max[i])) return false;
  }
  return wrench_achievable(jacobian, Wrench{}, strict).achievable;
}

double reachable_scale(const WireJacobian& jacobian, const Wrench& nominal,
                       const Wrench& direction, const TensionBounds& bounds,
                       double relative_tolerance) {
  if (!wrench_achievable(jacobian, nominal, bounds).achievable) return 0.0;
  const double dnorm = direction.as_vector().norm();
  if (!(dnorm > 0.0)) return 0.0;

  // No combination of tensions can exceed this wrench magnitude.
  double reach = nominal.as_vector().norm();
  for (Eigen::Index i = 0; i < jacobian.cols(); ++i) {
    reach += std::max(bounds.f_max[i], 0.0) * jacobian.col(i).norm();
  }
  double lo = 0.0;
  double hi = reach / dnorm;
  if (!(hi > 0.0)) return 0.0;
  if (wrench_achievable(jacobian, nominal + hi * direction, bounds).achievable) return hi;
  const double tol = relative_tolerance * hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (wrench_achievable(jacobian, nominal + mid * direction, bounds).achievable) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

FeasibilityReport controllability(const WireJacobian& jacobian, const TensionBounds& bounds,
                                  const FeasibilityOptions& options) {
  FeasibilityReport report;
  report.rank = wrench_rank(jacobian);
  report.positive_spanning = positively_spanning(jacobian, bounds);

  const auto nominal = wrench_achievable(jacobian, options.nominal, bounds);
  report.nominal_achievable = nominal.achievable;
  const auto directions = sample_directions(options.directions);
  report.directions_sampled = directions.size();
  if (!nominal.achievable) {
    report.unreachable_directions = directions.size();
    report.saturating_wires = nominal.saturating_wires;
    return report;
  }

  double margin = std::numeric_limits<double>::infinity();
  Wrench worst;
  for (const Vec6& d : directions) {
    const Wrench dir{d.head<3>(), options.torque_scale * d.tail<3>()};
    const double s =
        reachable_scale(jacobian, options.nominal, dir, bounds, options.scale_tolerance);
    if (s <= options.min_scale) ++report.unreachable_directions;
    if (s < margin) {
      margin = s;
      worst = dir;
    }
  }
  report.margin = directions.empty() ? 0.0 : margin;
  report.fully_constrained =
      report.positive_spanning && !directions.empty() && report.unreachable_directions == 0;
  report.saturating_wires =
      wrench_achievable(jacobian, options.nominal + report.margin * worst, bounds)
          .saturating_wires;
  return report;
}

}  // namespace cubix
