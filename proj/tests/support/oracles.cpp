#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cubix::oracle {

double grid_qp_minimum(const Eigen::MatrixXd& W, const Eigen::VectorXd& w,
                       const Eigen::MatrixXd& L, double hi, double h) {
  const Eigen::Index m = W.cols();
  // Expand the objective into f' H f - 2 b' f + c with H = I + W' L W.
  const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(m, m) + W.transpose() * L * W;
  const Eigen::VectorXd b = W.transpose() * L * w;
  const double c = w.dot(L * w);

  const double reach = std::min(hi, std::sqrt(c));
  const long steps = static_cast<long>(std::floor(reach / h + 1e-9));
  const long last_cap = static_cast<long>(std::floor(hi / h + 1e-9));
  const Eigen::Index k = m - 1;  // coordinate solved in closed form

  std::vector<long> idx(static_cast<std::size_t>(k), 0);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
  double best = std::numeric_limits<double>::infinity();
  const double a = H(k, k);
  while (true) {
    // Objective as a function of f_k: a t^2 + 2 t (H_k,rest f_rest - b_k) + rest.
    double lin = -b(k);
    double rest = c;
    for (Eigen::Index i = 0; i < k; ++i) {
      lin += H(k, i) * f(i);
      rest -= 2.0 * b(i) * f(i);
      for (Eigen::Index j = 0; j < k; ++j) rest += f(i) * H(i, j) * f(j);
    }
    const double t_star = -lin / a;
    const long lo_i = std::clamp(static_cast<long>(std::floor(t_star / h)), 0L, last_cap);
    const long hi_i = std::clamp(lo_i + 1, 0L, last_cap);
    for (const long g : {lo_i, hi_i}) {
      const double t = static_cast<double>(g) * h;
      best = std::min(best, a * t * t + 2.0 * lin * t + rest);
    }

    Eigen::Index d = 0;
    for (; d < k; ++d) {
      if (++idx[static_cast<std::size_t>(d)] <= steps) {
        f(d) = static_cast<double>(idx[static_cast<std::size_t>(d)]) * h;
        break;
      }
      idx[static_cast<std::size_t>(d)] = 0;
      f(d) = 0.0;
    }
    if (d == k) break;
  }
  return best;
}

Eigen::VectorXd enumerate_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                                 const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const Eigen::Index n = g.size();
  long total = 1;
  for (Eigen::Index i = 0; i < n; ++i) total *= 3;

  Eigen::VectorXd best_x;
  double best = std::numeric_limits<double>::infinity();
  for (long code = 0; code < total; ++code) {
    Eigen::VectorXd x(n);
    std::vector<Eigen::Index> free;
    long c = code;
    for (Eigen::Index i = 0; i < n; ++i, c /= 3) {
      const int state = static_cast<int>(c % 3);
      if (state == 0) {
        x(i) = lo(i);
      } else if (state == 1) {
        x(i) = hi(i);
      } else {
        x(i) = 0.0;
        free.push_back(i);
      }
    }
    if (!free.empty()) {
      const auto nf = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd Hf(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        rhs(a) = -g(free[a]);
        for (Eigen::Index j = 0; j < n; ++j) {
          if (std::find(free.begin(), free.end(), j) == free.end()) rhs(a) -= H(free[a], j) * x(j);
        }
        for (Eigen::Index b = 0; b < nf; ++b) Hf(a, b) = H(free[a], free[b]);
      }
      const Eigen::VectorXd xf = Hf.fullPivLu().solve(rhs);
      for (Eigen::Index a = 0; a < nf; ++a) x(free[a]) = xf(a);
    }
    bool inside = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      inside = inside && x(i) >= lo(i) - 1e-12 && x(i) <= hi(i) + 1e-12;
    }
    if (!inside) continue;
    const double obj = 0.5 * x.dot(H * x) + g.dot(x);
    if (obj < best) {
      best = obj;
      best_x = x;
    }
  }
  return best_x;
}

Vec6 accumulate_wrench(const Pose& pose, const std::vector<WireAttachment>& wires,
                       const Eigen::VectorXd& tensions) {
  const Mat3 R = pose.orientation.normalized().toRotationMatrix();
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  for (std::size_t i = 0; i < wires.size(); ++i) {
    const Vec3 lever = R * wires[i].exit_point_body;
    const Vec3 towards = wires[i].anchor_world - (pose.position + lever);
    const Vec3 pull = tensions(static_cast<Eigen::Index>(i)) * towards / towards.norm();
    force += pull;
    torque += lever.cross(pull);
  }
  Vec6 out;
  out << force, torque;
  return out;
}

Eigen::VectorXd wire_lengths(const Pose& pose, const std::vector<WireAttachment>& wires) {
  const Mat3 R = pose.orientation.normalized().toRotationMatrix();
  Eigen::VectorXd l(static_cast<Eigen::Index>(wires.size()));
  for (std::size_t i = 0; i < wires.size(); ++i) {
    l(static_cast<Eigen::Index>(i)) =
        (wires[i].anchor_world - pose.position - R * wires[i].exit_point_body).norm();
  }
  return l;
}

int lu_rank(const Eigen::MatrixXd& m, double tol) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

int crossing_winding(const std::vector<Eigen::Vector2d>& polygon, const Eigen::Vector2d& center) {
  int wn = 0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d a = polygon[i] - center;
    const Eigen::Vector2d b = polygon[(i + 1) % n] - center;
    const double side = a.x() * b.y() - a.y() * b.x();
    if (a.y() <= 0.0) {
      if (b.y() > 0.0 && side > 0.0) ++wn;
    } else if (b.y() <= 0.0 && side < 0.0) {
      --wn;
    }
  }
  return wn;
}

Vec3 angular_rate(const Quat& before, const Quat& after, double span) {
  const Eigen::AngleAxisd aa(after * before.conjugate());
  double angle = aa.angle();
  Vec3 axis = aa.axis();
  if (angle > M_PI) angle -= 2.0 * M_PI;
  return axis * angle / span;
}

Quat random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quat q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q;
}

Vec3 random_vec(std::mt19937_64& rng, double half_width) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  return {u(rng), u(rng), u(rng)};
}

std::filesystem::path scenario_path(const char* name) {
  return std::filesystem::path(CUBIX_SCENARIO_DIR) / (std::string(name) + ".scenario");
}

}  // namespace cubix::oracle
