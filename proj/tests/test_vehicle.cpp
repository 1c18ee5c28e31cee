#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "inspecsim/vehicle.hpp"

using namespace inspecsim;

namespace {

VehicleParams quiet_params() {
  VehicleParams p;
  p.ground_effect_gain = 0.0;
  return p;
}

ControlCommand hold(double x, double y, double z, double yaw = 0.0) {
  return ControlCommand{Waypoint4D{x, y, z, yaw}, ControlMode::PositionHold};
}

/// Independent closed-loop integration of the same equations at step h,
/// controller re-evaluated every substep.
struct FineReference {
  VehicleParams p;
  Vec3 pos, vel = Vec3::Zero(), integ = Vec3::Zero();

  void advance(const Vec3& sp, double h) {
    const Vec3 kp(p.xy.kp, p.xy.kp, p.z.kp), ki(p.xy.ki, p.xy.ki, p.z.ki), kd(p.xy.kd, p.xy.kd, p.z.kd);
    const Vec3 err = sp - pos;
    for (int k = 0; k < 3; ++k) integ[k] = std::clamp(integ[k] + err[k] * h, -p.integrator_clamp, p.integrator_clamp);
    Vec3 a;
    for (int k = 0; k < 3; ++k) a[k] = kp[k] * err[k] + ki[k] * integ[k] - kd[k] * vel[k];
    a.z() += p.gravity;
    const double amax = p.gravity * p.max_thrust_mass_equiv / p.mass;
    a.z() = std::min(std::max(a.z(), 0.0), amax);
    const double hmax = std::sqrt(amax * amax - a.z() * a.z());
    const double hn = std::sqrt(a.x() * a.x() + a.y() * a.y());
    if (hn > hmax) {
      a.x() *= hmax / hn;
      a.y() *= hmax / hn;
    }
    const Vec3 acc = a - p.drag_coeff * vel - Vec3(0, 0, p.gravity);
    vel += acc * h;
    if (vel.norm() > p.max_speed) vel *= p.max_speed / vel.norm();
    pos += vel * h;
  }
};

}  // namespace

TEST(Pid, HoverFeedForward) {
  const VehicleParams p;
  VehicleState s;
  s.position = Vec3(0, 0, 1);
  const PidOutput out = pid_accel(s, hold(0, 0, 1), Vec3::Zero(), p.dt, p);
  EXPECT_EQ(out.accel_cmd, Vec3(0, 0, p.gravity));
}

TEST(Pid, UpwardSaturation) {
  const VehicleParams p;
  EXPECT_NEAR(p.max_accel(), 9.81 * 0.042 / 0.037, 1e-12);
  EXPECT_NEAR(p.max_accel(), 11.1357, 1e-4);
  EXPECT_NEAR(p.max_accel() - p.gravity, 9.81 * (42.0 / 37.0 - 1.0), 1e-12);
  VehicleState s;
  const PidOutput out = pid_accel(s, hold(0, 0, 100), Vec3::Zero(), p.dt, p);
  EXPECT_DOUBLE_EQ(out.accel_cmd.z(), p.max_accel());
  EXPECT_DOUBLE_EQ(out.accel_cmd.head<2>().norm(), 0.0);

  s.position = Vec3(0, 0, 100);  // large descent request: thrust floors at zero
  EXPECT_DOUBLE_EQ(pid_accel(s, hold(0, 0, 0), Vec3::Zero(), p.dt, p).accel_cmd.z(), 0.0);
}

TEST(Pid, HorizontalScaledIntoThrustBudget) {
  VehicleParams p;
  p.xy.ki = 0.0;
  VehicleState s;
  s.position = Vec3(0, 0, 1);
  const PidOutput out = pid_accel(s, hold(50, 20, 1.2), Vec3::Zero(), p.dt, p);
  EXPECT_NEAR(out.accel_cmd.norm(), p.max_accel(), 1e-9);
  EXPECT_NEAR(out.accel_cmd.y() / out.accel_cmd.x(), 20.0 / 50.0, 1e-12);
}

TEST(Pid, IntegratorRampsUntilClamp) {
  VehicleParams p;
  p.z.ki = 40.0;
  p.integrator_clamp = 0.05;
  const double err = 0.02;
  VehicleState s;
  s.position = Vec3(0, 0, 1.0 - err);
  Vec3 integ = Vec3::Zero();
  double prev_contrib = 0.0;
  for (int k = 1; k <= 400; ++k) {
    const PidOutput out = pid_accel(s, hold(0, 0, 1.0), integ, p.dt, p);
    integ = out.integrator;
    const double contrib = p.z.ki * integ.z();
    const double expected = std::min(k * err * p.dt, p.integrator_clamp);
    EXPECT_NEAR(integ.z(), expected, 1e-12);
    if (expected < p.integrator_clamp) {
      EXPECT_NEAR(contrib - prev_contrib, 40.0 * err * p.dt, 1e-10);
    }
    prev_contrib = contrib;
  }
  EXPECT_DOUBLE_EQ(integ.z(), 0.05);
}

TEST(Pid, VelocityTrackingFreezesIntegrator) {
  const VehicleParams p;
  VehicleState s;
  const Vec3 integ(0.01, -0.02, 0.03);
  const PidOutput out =
      pid_accel(s, ControlCommand{Waypoint4D{1, 1, 1, 0}, ControlMode::VelocityTracking}, integ, p.dt, p);
  EXPECT_EQ(out.integrator, integ);
}

TEST(Vehicle, HoverEquilibrium) {
  const VehicleParams p = quiet_params();
  VehicleState init;
  init.position = Vec3(0.2, -0.1, 1.0);
  Quadrotor q(p, init);
  for (int k = 0; k < 500; ++k) {
    const Vec3 before = q.state().position;
    q.step(hold(0.2, -0.1, 1.0), Vec3::Zero());
    EXPECT_LE((q.state().position - before).norm(), 1e-9);
  }
}

TEST(Vehicle, BallisticFreeFallExact) {
  VehicleParams p;
  p.drag_coeff = 0.0;
  VehicleState init;
  init.position = Vec3(0, 0, 100);
  Quadrotor q(p, init);
  for (int k = 0; k < 200; ++k) {
    const double vz = q.state().velocity.z();
    q.step_unpowered(Vec3::Zero());
    EXPECT_EQ(q.state().velocity.z(), vz + (-p.gravity) * p.dt);
  }
}

TEST(Vehicle, FloorStopsFall) {
  VehicleState init;
  init.position = Vec3(0, 0, 0.5);
  Quadrotor q(VehicleParams{}, init);
  for (int k = 0; k < 300; ++k) q.step_unpowered(Vec3::Zero());
  EXPECT_DOUBLE_EQ(q.state().position.z(), 0.0);
  EXPECT_TRUE(q.on_floor());
}

TEST(Vehicle, StepResponseMatchesFineReference) {
  const VehicleParams p = quiet_params();
  VehicleState init;
  init.position = Vec3(0, 0, 1.0);
  Quadrotor q(p, init);
  FineReference ref{p, init.position};
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    q.step(hold(1, 0, 1), Vec3::Zero());
    for (int s = 0; s < 10; ++s) ref.advance(Vec3(1, 0, 1), p.dt / 10);
    worst = std::max(worst, (q.state().position - ref.pos).norm());
  }
  RecordProperty("max_deviation_m", std::to_string(worst));
  EXPECT_LE(worst, 1e-3);
}

// Semi-implicit Euler moves with the end-of-step velocity, so over a speed
// change dv its position leads the continuous solution by about dv*dt/2.
TEST(Vehicle, FineReferenceGapWithinEulerLead) {
  const VehicleParams p = quiet_params();
  VehicleState init;
  init.position = Vec3(0, 0, 1.0);
  Quadrotor q(p, init);
  FineReference ref{p, init.position};
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    q.step(hold(1, 0, 1), Vec3::Zero());
    for (int s = 0; s < 10; ++s) ref.advance(Vec3(1, 0, 1), p.dt / 10);
    worst = std::max(worst, (q.state().position - ref.pos).norm());
  }
  EXPECT_LE(worst, 1.1 * p.max_speed * p.dt / 2);
  EXPECT_LT((q.state().position - ref.pos).norm(), 1e-4);  // both settle on the setpoint
}

TEST(Vehicle, ClosedLoopConverges) {
  const VehicleParams p = quiet_params();
  VehicleState init;
  init.position = Vec3(0, 0, 1.0);
  Quadrotor q(p, init);
  const Vec3 target(0.5, -0.3, 1.2);
  for (int k = 0; k < 1000; ++k) q.step(hold(target.x(), target.y(), target.z()), Vec3::Zero());
  EXPECT_LT((q.state().position - target).norm(), 0.01);
}

TEST(Vehicle, ThrustLimitsAndSpeedCapAtEveryStep) {
  const VehicleParams p;
  VehicleState init;
  init.position = Vec3(0, 0, 0.0);
  Quadrotor q(p, init);
  GravityBias bias(DisturbanceParams{}, p.dt);
  const Vec3 targets[] = {Vec3(1, 0, 1.5), Vec3(-1, 1, 0.3), Vec3(0, 0, 2.0), Vec3(0.2, -1, 0.1)};
  for (int k = 0; k < 4000; ++k) {
    const Vec3& t = targets[(k / 1000) % 4];
    const Vec3 a = q.step(hold(t.x(), t.y(), t.z(), 0.5 * k), bias.next());
    ASSERT_GE(a.z(), 0.0);
    ASSERT_LE(a.norm(), p.max_accel() * (1 + 1e-12));
    ASSERT_LE(q.state().velocity.norm(), p.max_speed * (1 + 1e-12));
    ASSERT_GT(q.state().yaw, -M_PI);
    ASSERT_LE(q.state().yaw, M_PI);
  }
}

TEST(Vehicle, YawSlewRateLimited) {
  const VehicleParams p = quiet_params();
  VehicleState init;
  init.position = Vec3(0, 0, 1);
  Quadrotor q(p, init);
  double prev = q.state().yaw, prev_t = q.state().time;
  for (int k = 0; k < 300; ++k) {
    q.step(hold(0, 0, 1, 3.0), Vec3::Zero());
    EXPECT_LE(std::abs(std::remainder(q.state().yaw - prev, 2 * M_PI)), p.yaw_rate_limit * p.dt + 1e-12);
    EXPECT_GT(q.state().time, prev_t);
    prev = q.state().yaw;
    prev_t = q.state().time;
  }
  EXPECT_NEAR(q.state().yaw, 3.0, 1e-12);
}

TEST(Vehicle, Deterministic) {
  auto run = [] {
    VehicleState init;
    Quadrotor q(VehicleParams{}, init);
    GravityBias bias(DisturbanceParams{}, 0.01);
    std::vector<double> trace;
    for (int k = 0; k < 2000; ++k) {
      q.step(hold(0.4, 0.1, 0.8, 1.0), bias.next());
      trace.push_back(q.state().position.x());
      trace.push_back(q.state().position.z());
    }
    return trace;
  };
  const auto a = run(), b = run();
  ASSERT_EQ(a.size(), b.size());
  EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0);
}

TEST(Vehicle, GroundEffectProfile) {
  const VehicleParams p;
  EXPECT_NEAR(ground_effect(0.0, p).z(), p.ground_effect_gain * p.gravity, 1e-15);
  EXPECT_NEAR(ground_effect(p.ground_effect_height / 2, p).z(), 0.5 * p.ground_effect_gain * p.gravity, 1e-15);
  EXPECT_EQ(ground_effect(1.0, p), Vec3::Zero());
}

TEST(GravityBias, ZeroGainIsSilent) {
  DisturbanceParams d;
  d.gain = 0.0;
  for (const Vec3& v : gravity_bias_profile(d, 0.01, 1000)) EXPECT_EQ(v, Vec3::Zero());
}

TEST(GravityBias, MeanPointsDown) {
  const auto s = gravity_bias_profile(DisturbanceParams{}, 0.01, 10000);
  Vec3 mean = Vec3::Zero();
  for (const Vec3& v : s) mean += v;
  mean /= static_cast<double>(s.size());
  EXPECT_LT(mean.z(), 0.0);
  EXPECT_LT(std::abs(mean.x()), 1e-3 * std::abs(mean.z()));
  EXPECT_LT(std::abs(mean.y()), 1e-3 * std::abs(mean.z()));
}

TEST(GravityBias, SeededAndRepeatable) {
  DisturbanceParams d;
  EXPECT_EQ(gravity_bias_profile(d, 0.01, 500), gravity_bias_profile(d, 0.01, 500));
  DisturbanceParams e = d;
  e.seed = d.seed + 1;
  EXPECT_NE(gravity_bias_profile(d, 0.01, 500), gravity_bias_profile(e, 0.01, 500));
}

TEST(VehicleParams, JsonRoundTripAndValidation) {
  VehicleParams p;
  p.z.ki = 1.7;
  const VehicleParams back = VehicleParams::from_json(p.to_json());
  EXPECT_EQ(back.to_json(), p.to_json());
  EXPECT_THROW(VehicleParams::from_json(json{{"mass", 0.05}}), Error);
  EXPECT_THROW(VehicleParams::from_json(json{{"dt", 0.0}}), Error);
  EXPECT_DOUBLE_EQ(p.z.ki, 1.7);
  EXPECT_DOUBLE_EQ(VehicleParams{}.z.ki, 4.0 * VehicleParams{}.xy.ki);
}
