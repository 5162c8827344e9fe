#include <gtest/gtest.h>

#include "cubix/controller.hpp"
#include "cubix/scenario.hpp"
#include "oracles.hpp"

namespace cubix {
namespace {

RobotModel cube8_robot() {
  RobotModel robot = load_scenario(oracle::scenario_path("cube8")).robot();
  robot.body.mass = 10.0;
  robot.gravity = Vec3(0, 0, -9.81);
  return robot;
}

TrajectorySample hold(const Pose& p) {
  TrajectorySample s;
  s.pose = p;
  return s;
}

TEST(ControlStep, HoverWrenchIsWeight) {
  const RobotModel robot = cube8_robot();
  const Pose q = Pose::from_translation({0, 0, 0.1});
  PidState pid;
  const ControlTick t = control_step(q, Twist{}, hold(q), robot, PidGains{}, pid, 0.005);
  EXPECT_EQ(t.w_fb.as_vector(), Vec6::Zero());
  EXPECT_LE((t.w_ref.as_vector() - (Vec6() << 0, 0, 98.1, 0, 0, 0).finished()).norm(), 1e-12);
  EXPECT_EQ(t.w_ref.as_vector(), t.w_g.as_vector());
}

TEST(ControlStep, Cube8CarriesTheWeight) {
  const RobotModel robot = cube8_robot();
  const Pose q = Pose::from_translation({0, 0, 0.1});
  PidState pid;
  const ControlTick t = control_step(q, Twist{}, hold(q), robot, PidGains{}, pid, 0.005);
  const Vec6 net = oracle::accumulate_wrench(q, robot.wires, t.f_ref);
  EXPECT_NEAR(net(2), 98.1, 1e-6);
  EXPECT_LE((net - (Vec6() << 0, 0, 98.1, 0, 0, 0).finished()).norm(), 1e-6);
  EXPECT_LT(t.residual_norm, 1e-6);
  // Lower anchors pull down, so the upper wires take more than the weight.
  double upper = 0.0;
  for (std::size_t i = 0; i < robot.wires.size(); ++i) {
    if (robot.wires[i].anchor_world.z() > 0) upper += t.f_ref(static_cast<Eigen::Index>(i));
  }
  EXPECT_GT(upper, 98.1);
  EXPECT_EQ(t.saturation_count(), 0u);
}

TEST(ControlStep, InfeasibleCommandSaturates) {
  RobotModel robot = cube8_robot();
  PidGains gains;
  gains.kp.setConstant(5000.0);
  const Pose q = Pose::from_translation({0, 0, 0.1});
  PidState pid;
  const ControlTick t = control_step(q, Twist{}, hold(Pose::from_translation({0.3, 0, 0.1})),
                                     robot, gains, pid, 0.005);
  EXPECT_GE(t.saturation_count(), 2u);
  EXPECT_GT(t.residual_norm, 1.0);
  for (std::size_t i = 0; i < t.saturated.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    EXPECT_EQ(t.saturated[i] != 0, std::abs(t.f_ref(k) - robot.bounds.f_max(k)) <= 1e-6);
  }
}

TEST(ControlStep, RespectsBoundsAndIsDeterministic) {
  const RobotModel robot = cube8_robot();
  PidGains gains;
  gains.kp << 2000, 2000, 2000, 100, 100, 100;
  gains.ki.setConstant(50);
  gains.kd << 300, 300, 300, 8, 8, 8;
  std::mt19937_64 rng(40);
  for (int k = 0; k < 50; ++k) {
    const Pose q = Pose::from(oracle::random_vec(rng, 0.1) + Vec3(0, 0, -0.2),
                              exp_rotation(oracle::random_vec(rng, 0.1)));
    const Twist v{oracle::random_vec(rng, 0.2), oracle::random_vec(rng, 0.5)};
    TrajectorySample ref = hold(Pose::from_translation(oracle::random_vec(rng, 0.1)));
    ref.acceleration = (Vec6() << oracle::random_vec(rng, 1), oracle::random_vec(rng, 1)).finished();
    PidState p1, p2;
    const ControlTick a = control_step(q, v, ref, robot, gains, p1, 0.005);
    const ControlTick b = control_step(q, v, ref, robot, gains, p2, 0.005);
    EXPECT_EQ(a.f_ref, b.f_ref);
    EXPECT_EQ(a.f_final, b.f_final);
    EXPECT_EQ(a.currents, b.currents);
    EXPECT_EQ(p1.integral, p2.integral);
    EXPECT_TRUE((a.f_ref.array() >= robot.bounds.f_min.array()).all());
    EXPECT_TRUE((a.f_ref.array() <= robot.bounds.f_max.array()).all());
    EXPECT_TRUE((a.f_final.array() >= 0.0).all());
    EXPECT_TRUE((a.f_final.array() <= robot.bounds.f_max.array()).all());
    EXPECT_EQ(a.currents, to_currents(a.f_final, robot.winches));
  }
}

TEST(ControlStep, TensionScheduleIgnoresMeasurement) {
  const RobotModel robot = cube8_robot();
  const TrajectorySample ref = hold(Pose::from_translation({0, 0, 0.1}));
  const ControlTick a = tension_schedule_step(Pose::from_translation({0.05, 0, 0}), Twist{}, ref, robot);
  const ControlTick b =
      tension_schedule_step(Pose::from_translation({0, -0.05, 0.2}), Twist{{1, 0, 0}, Vec3::Zero()}, ref, robot);
  EXPECT_EQ(a.f_ref, b.f_ref);
  EXPECT_EQ(a.w_fb.as_vector(), Vec6::Zero());
}

TEST(PoseController, FaultHoldsPreviousCurrents) {
  RobotModel robot = cube8_robot();
  PoseController ctl(robot, PidGains{});
  const Pose q = Pose::from_translation({0, 0, 0.1});
  const ControlTick good = ctl.update(0, 0.0, q, Twist{}, hold(q), 0.005);
  EXPECT_FALSE(good.fault);
  // Put the body exactly on an anchor: the wire has no direction.
  const Pose bad = Pose::from_translation(robot.wires[0].anchor_world - robot.wires[0].exit_point_body);
  const ControlTick t = ctl.update(1, 0.005, bad, Twist{}, hold(q), 0.005);
  EXPECT_TRUE(t.fault);
  EXPECT_EQ(t.currents, good.currents);
  EXPECT_EQ(t.tick, 1u);
  EXPECT_EQ(ctl.fault_count(), 1u);
  EXPECT_FALSE(ctl.last_fault().empty());
  EXPECT_FALSE(ctl.update(2, 0.01, q, Twist{}, hold(q), 0.005).fault);
}

TEST(PoseController, RejectsInconsistentModel) {
  RobotModel robot = cube8_robot();
  robot.winches.pop_back();
  EXPECT_THROW(PoseController(robot, PidGains{}), std::invalid_argument);
}

}  // namespace
}  // namespace cubix
