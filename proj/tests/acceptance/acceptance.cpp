// Acceptance checks for the CubiX library, one PASS/FAIL line per criterion.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cubix/dynamics.hpp"
#include "cubix/runner.hpp"
#include "cubix/scenario.hpp"
#include "cubix/tension_allocation.hpp"
#include "cubix/trajectory.hpp"
#include "cubix/wire_geometry.hpp"
#include "oracles.hpp"

namespace {

using namespace cubix;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kQpObjectiveTol = 1e-3;
constexpr double kQpTimeBudget = 10.0;  // s
constexpr double kCurrentTol = 1e-3;    // A
constexpr double kSplineBoundaryTol = 1e-9;
constexpr double kSplineVelocityTol = 1e-6;
constexpr double kSplineAccelTol = 1e-4;
constexpr double kJacobianTol = 1e-12;
constexpr double kRateTol = 1e-6;
constexpr double kCube8Terminal = 0.01;  // m
constexpr double kCube8Rms = 0.02;       // m
constexpr double kCube8Budget = 30.0;    // s
constexpr double kOutdoorTerminal = 0.05;  // m
constexpr double kDriveDisplacement = 0.2;  // m
constexpr double kFreeFallRel = 1e-3;
constexpr double kMomentumRel = 1e-9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(CUBIX_TEST_TMP) / name;
  fs::remove_all(p);
  return p;
}

const SegmentStats* segment(const RunSummary& r, const std::string& label) {
  for (const auto& s : r.segments) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

WireJacobian random_jacobian(std::mt19937_64& rng, int m) {
  WireJacobian W(6, m);
  for (int i = 0; i < m; ++i) {
    const Vec3 s = oracle::random_vec(rng, 1.0).normalized();
    const Vec3 r = oracle::random_vec(rng, 0.3);
    W.col(i) << s, r.cross(s);
  }
  return W;
}

Outcome qp_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> lam(0.05, 1.0);
  std::uniform_real_distribution<double> mag(0.0, 1.5);
  double worst = 0.0;
  bool feasible = true;
  for (int k = 0; k < 200; ++k) {
    const int m = 2 + k % 3;
    const WireJacobian W = random_jacobian(rng, m);
    Vec6 w;
    for (auto& v : w) v = std::normal_distribution<double>(0.0, 1.0)(rng);
    w *= mag(rng) / w.norm();
    const Mat6 L = Vec6::Constant(lam(rng)).asDiagonal();
    const TensionBounds b = TensionBounds::uniform(m, 0.0, 180.0);
    const Allocation a = allocate(W, Wrench::from_vector(w), b, AllocationWeights{L});
    feasible = feasible && (a.tensions.array() >= 0.0).all() && (a.tensions.array() <= 180.0).all();
    const double grid = oracle::grid_qp_minimum(W, w, L, 180.0, 0.01);
    worst = std::max(worst, std::abs(a.objective - grid));
  }
  const double elapsed = seconds_since(t0);
  return {worst <= kQpObjectiveTol && elapsed < kQpTimeBudget && feasible,
          "max |objective - grid| = " + fmt("%.2e", worst) + ", " + fmt("%.2f s", elapsed)};
}

Outcome current_map() {
  const std::vector<WinchParams> w(1);  // r 8 mm, G 53, Kt 14 mNm/A, efficiency 1
  const double i = to_currents(VecX::Constant(1, 92.75), w)(0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 180.0);
  bool linear = to_currents(VecX::Zero(1), w)(0) == 0.0;
  const double per_newton = 0.008 / (53.0 * 0.014);
  for (int k = 0; k < 1000; ++k) {
    const double f = u(rng);
    const double a = to_currents(VecX::Constant(1, f), w)(0);
    linear = linear && to_currents(VecX::Constant(1, 2.0 * f), w)(0) == 2.0 * a &&
             std::abs(a - per_newton * f) <= 1e-15 * (1.0 + a);
  }
  return {std::abs(i - 1.0) <= kCurrentTol && linear,
          "92.75 N -> " + fmt("%.6f A", i) + (linear ? ", linear" : ", NOT linear")};
}

Outcome spline_contract() {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> dur(0.2, 8.0), frac(0.05, 0.95);
  std::uniform_real_distribution<double> angle(0.0, kMaxSegmentRotation - 0.05);
  double boundary = 0.0, vel = 0.0, acc = 0.0;
  const double h = 1e-5;
  for (int k = 0; k < 1000; ++k) {
    const Pose qs = Pose::from(oracle::random_vec(rng, 1.0), oracle::random_quat(rng));
    const Vec3 rel = oracle::random_vec(rng, 1.0).normalized() * angle(rng);
    const Pose qf = Pose::from(oracle::random_vec(rng, 1.0), exp_rotation(rel) * qs.orientation);
    const Twist vs{oracle::random_vec(rng, 0.5), oracle::random_vec(rng, 0.5)};
    const Twist vf{oracle::random_vec(rng, 0.5), oracle::random_vec(rng, 0.5)};
    const double T = dur(rng);
    const SplineSegment seg = plan_spline(qs, vs, qf, vf, T);
    const TrajectorySample a = seg.sample(0.0), b = seg.sample(T);
    boundary = std::max({boundary, (a.pose.position - qs.position).norm(),
                         (b.pose.position - qf.position).norm(),
                         orientation_error(a.pose.orientation, qs.orientation).norm(),
                         orientation_error(b.pose.orientation, qf.orientation).norm(),
                         (a.twist.as_vector() - vs.as_vector()).norm(),
                         (b.twist.as_vector() - vf.as_vector()).norm()});
    const double t = frac(rng) * T;
    const TrajectorySample s = seg.sample(t), lo = seg.sample(t - h), hi = seg.sample(t + h);
    const Vec3 v_fd = (hi.pose.position - lo.pose.position) / (2 * h);
    const Vec3 w_fd = oracle::angular_rate(lo.pose.orientation, hi.pose.orientation, 2 * h);
    vel = std::max({vel, (s.twist.linear - v_fd).cwiseAbs().maxCoeff(),
                    (s.twist.angular - w_fd).cwiseAbs().maxCoeff()});
    const Vec6 a_fd = (hi.twist.as_vector() - lo.twist.as_vector()) / (2 * h);
    acc = std::max(acc, (s.acceleration - a_fd).cwiseAbs().maxCoeff());
  }
  return {boundary <= kSplineBoundaryTol && vel <= kSplineVelocityTol && acc <= kSplineAccelTol,
          "boundary " + fmt("%.1e", boundary) + ", velocity " + fmt("%.1e", vel) +
              ", acceleration " + fmt("%.1e", acc)};
}

Outcome jacobian_check() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> tension(0.0, 180.0);
  double worst = 0.0, rate = 0.0;
  const double h = 1e-5;
  for (int k = 0; k < 100; ++k) {
    std::vector<WireAttachment> wires;
    const int m = count(rng);
    for (int i = 0; i < m; ++i) {
      wires.push_back({static_cast<std::size_t>(i), oracle::random_vec(rng, 0.2),
                       oracle::random_vec(rng, 3.0) + Vec3(0, 0, 4.0)});
    }
    const Pose q = Pose::from(oracle::random_vec(rng, 0.5), oracle::random_quat(rng));
    VecX f(m);
    for (auto& v : f) v = tension(rng);
    const Vec6 lib = wrench_from_tensions(wire_jacobian(q, wires), f).as_vector();
    const Vec6 ref = oracle::accumulate_wrench(q, wires, f);
    // Relative to the summed tension, the natural scale of every entry.
    worst = std::max(worst, (lib - ref).cwiseAbs().maxCoeff() / (1.0 + f.sum()));

    const Twist v{oracle::random_vec(rng, 1.0), oracle::random_vec(rng, 1.0)};
    const auto at = [&](double t) {
      return oracle::wire_lengths(
          Pose::from(q.position + t * v.linear, exp_rotation(t * v.angular) * q.orientation),
          wires);
    };
    const VecX fd = (at(h) - at(-h)) / (2 * h);
    rate = std::max(rate, (wire_lengths_and_rates(q, v, wires).length_rates - fd).cwiseAbs().maxCoeff());
  }
  return {worst <= kJacobianTol && rate <= kRateTol,
          "W f vs accumulation " + fmt("%.1e", worst) + " (relative), rates " + fmt("%.1e", rate)};
}

Outcome cube8() {
  const Scenario s = load_scenario(oracle::scenario_path("cube8"));
  const RunSummary r = run(s, scratch("cube8"));
  const SegmentStats* lift = segment(r, "lift");
  const bool ok = r.completed && s.simulation.dt == 1e-3 &&
                  r.terminal_position_error.norm() < kCube8Terminal &&
                  r.rms_position_error < kCube8Rms && lift && lift->saturated_ticks == 0 &&
                  r.saturation_events == 0 && r.wall_time < kCube8Budget;
  return {ok, "terminal " + fmt("%.2e m", r.terminal_position_error.norm()) + ", rms " +
                  fmt("%.2e m", r.rms_position_error) + ", saturation events " +
                  std::to_string(r.saturation_events) + ", " + fmt("%.2f s", r.wall_time)};
}

Outcome overreach() {
  const RunSummary r =
      run(load_scenario(oracle::scenario_path("cube8_overreach")), scratch("overreach"));
  const SegmentStats* lift = segment(r, "lift");
  const SegmentStats* over = segment(r, "overreach");
  if (!lift || !over) return {false, "missing segments"};
  const bool ok = over->max_saturated_wires >= 2 && over->max_residual > 1e-3 &&
                  over->rms_position > lift->rms_position && lift->saturated_ticks == 0;
  return {ok, std::to_string(over->max_saturated_wires) + " wires saturated, residual " +
                  fmt("%.1f", over->max_residual) + ", rms " + fmt("%.2e", over->rms_position) +
                  " m vs feasible " + fmt("%.2e m", lift->rms_position)};
}

Outcome controllability_rule() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"cube8", "cube8_overreach", "outdoor4", "anchors2"}) {
    const Scenario s = load_scenario(oracle::scenario_path(name));
    const FeasibilityReport r = analyze(s);
    const bool want = s.wires.size() >= 7;
    // Symmetric 8-wire cube: also at the frame center.
    bool centered = true;
    if (want) {
      AnalyzeOptions o;
      o.pose = Pose::identity();
      centered = analyze(s, o).fully_constrained;
    }
    ok = ok && r.fully_constrained == want && centered;
    detail += std::string(detail.empty() ? "" : ", ") + name + " (m=" +
              std::to_string(s.wires.size()) + ") " + (r.fully_constrained ? "true" : "false");
  }
  return {ok, detail};
}

Outcome outdoor4() {
  const Scenario s = load_scenario(oracle::scenario_path("outdoor4"));
  const RunSummary r = run(s, scratch("outdoor4"));
  const double err = r.terminal_position_error.norm();
  const bool ok = r.completed && std::abs(s.start.position.y() + 0.5) < 1e-12 &&
                  std::abs(s.waypoints.back().target.position.y() - 0.5) < 1e-12 &&
                  err < kOutdoorTerminal && std::abs(r.displacement.y() - 1.0) < kOutdoorTerminal;
  return {ok, "y " + fmt("%.3f", s.start.position.y()) + " -> " +
                  fmt("%.3f m", s.start.position.y() + r.displacement.y()) + ", terminal " +
                  fmt("%.2e m", err)};
}

Outcome anchors() {
  const RunSummary r = run(load_scenario(oracle::scenario_path("anchors2")), scratch("anchors2"));
  bool ok = r.completed && r.wraps.size() == 2;
  std::string detail;
  for (const auto& w : r.wraps) {
    int ones = 0;
    for (const int n : w.winding) ones += n == 1;
    ok = ok && w.trials == 20 && ones == 20;
    detail += w.pillar + " " + std::to_string(ones) + "/" + std::to_string(w.trials) + ", ";
  }
  ok = ok && r.displacement.z() >= kDriveDisplacement &&
       std::abs(r.displacement.y()) >= kDriveDisplacement;
  return {ok, detail + "drive dz " + fmt("%.3f", r.displacement.z()) + " m, dy " +
                  fmt("%.3f m", r.displacement.y())};
}

Outcome physics() {
  RobotModel body;
  body.body.mass = 10.0;
  body.body.inertia = Vec3(0.2, 0.35, 0.5).asDiagonal();
  body.bounds = TensionBounds::uniform(0, 0.0, 180.0);  // no wires, no drag

  body.gravity = Vec3(0, 0, -kStandardGravity);
  SimState s = SimState::make(Pose::identity(), Twist{}, body.body, 0);
  for (int k = 0; k < 500; ++k) s = step(s, VecX::Zero(0), 1e-3, body, SimParams{});
  const double exact = 0.5 * kStandardGravity * 0.25;
  const double fall = std::abs(-s.pose.position.z() - exact) / exact;

  body.gravity.setZero();
  s = SimState::make(Pose::identity(), Twist{{0.3, -0.1, 0.2}, {1.0, 0.5, -2.0}}, body.body, 0);
  const Vec3 p0 = body.body.mass * s.twist.linear;
  const Vec3 l0 = s.angular_momentum;
  for (int k = 0; k < 10000; ++k) s = step(s, VecX::Zero(0), 1e-3, body, SimParams{});
  const double momentum = std::max((body.body.mass * s.twist.linear - p0).norm() / p0.norm(),
                                   (s.angular_momentum - l0).norm() / l0.norm());

  bool same = true;
  for (const char* name : {"cube8", "anchors2"}) {
    const Scenario sc = load_scenario(oracle::scenario_path(name));
    const fs::path a = scratch(std::string(name) + "_bits_a");
    const fs::path b = scratch(std::string(name) + "_bits_b");
    run(sc, a);
    run(sc, b);
    // summary.json carries wall time, so only the data files are compared.
    same = same && slurp(a / "telemetry.csv") == slurp(b / "telemetry.csv");
    if (sc.deployment) {
      same = same && fs::exists(a / "anchors.csv") &&
             slurp(a / "anchors.csv") == slurp(b / "anchors.csv");
    }
  }
  return {fall <= kFreeFallRel && momentum <= kMomentumRel && same,
          "free fall " + fmt("%.1e", fall) + " relative, momentum " + fmt("%.1e", momentum) +
              ", reruns " + (same ? "bit-identical" : "DIFFER")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"QP oracle equivalence", qp_oracle},
      {"current map constants", current_map},
      {"spline contract", spline_contract},
      {"wire Jacobian", jacobian_check},
      {"cube8 box lift", cube8},
      {"saturation failure", overreach},
      {"controllability rule", controllability_rule},
      {"outdoor4 traverse", outdoor4},
      {"anchor wrap and drive", anchors},
      {"simulator physics", physics},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu  %-24s %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
