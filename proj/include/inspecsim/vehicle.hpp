#pragma once

#include <cstdint>
#include <vector>

#include "inspecsim/json_util.hpp"
#include "inspecsim/planner/path.hpp"
#include "inspecsim/random.hpp"

namespace inspecsim {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

/// Point-mass micro quadrotor with yaw. Gains act at acceleration level
/// (m/s^2 per m, per m*s, per m/s).
///
/// The z integral gain defaults to 4x the horizontal one. The firmware's
/// "40" is in firmware units; only the ratio of z to x/y integral action is
/// carried over.
struct VehicleParams {
  double gravity = 9.81;
  double mass = 0.037;                   // kg, airframe + FPV camera
  double max_thrust_mass_equiv = 0.042;  // kg, maximum take-off mass
  double drag_coeff = 0.3;               // 1/s
  double max_speed = 0.3;                // m/s
  double yaw_rate_limit = 1.5;           // rad/s
  PidGains xy{2.5, 0.2, 1.6};
  PidGains z{1.6, 0.8, 1.8};
  double integrator_clamp = 0.05;        // m*s
  double ground_effect_height = 0.15;    // m
  double ground_effect_gain = 0.08;
  double floor_z = 0.0;                  // m, hard floor
  double dt = 0.01;                      // s

  /// Maximum specific thrust, g * max_thrust_mass_equiv / mass.
  double max_accel() const { return gravity * max_thrust_mass_equiv / mass; }

  void validate() const;
  json to_json() const;
  static VehicleParams from_json(const json& j);
};

struct VehicleState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;
  double time = 0.0;
};

enum class ControlMode {
  PositionHold,      // full PID, integrator accumulates
  VelocityTracking,  // integrator frozen while in transit
};

struct ControlCommand {
  Waypoint4D setpoint;
  ControlMode mode = ControlMode::PositionHold;
};

struct PidOutput {
  Vec3 accel_cmd = Vec3::Zero();
  Vec3 integrator = Vec3::Zero();
};

/// accel = Kp.err + Ki.I + Kd.(-v) + g z^, I = clamp(I + err dt). The result
/// is saturated to a thrust in [0, max_accel]: z first, then the horizontal
/// part scaled down to fit the remaining norm.
PidOutput pid_accel(const VehicleState& state, const ControlCommand& cmd, const Vec3& integrator,
                    double dt, const VehicleParams& params);

/// Lift near the floor: gain * g * max(0, 1 - height/ground_effect_height) z^.
Vec3 ground_effect(double z, const VehicleParams& params);

/// One semi-implicit Euler step under a given specific-thrust command.
/// With motors_on the ground effect applies and speed is limited to
/// max_speed; with motors off the body is ballistic (plus drag). The floor
/// stops downward motion. Yaw slews toward yaw_setpoint at <= yaw_rate_limit.
VehicleState integrate(const VehicleState& state, const Vec3& accel_cmd, double yaw_setpoint,
                       const VehicleParams& params, const Vec3& disturbance, bool motors_on);

/// Stateful vehicle: owns the PID integrator.
class Quadrotor {
 public:
  explicit Quadrotor(VehicleParams params, VehicleState initial = {});

  /// Closed-loop step toward cmd.setpoint. Returns the saturated acceleration
  /// command that was applied.
  Vec3 step(const ControlCommand& cmd, const Vec3& disturbance);
  /// Same, with the controller closed on `feedback` (e.g. the estimate)
  /// instead of the true state.
  Vec3 step(const ControlCommand& cmd, const Vec3& disturbance, const VehicleState& feedback);
  /// Motors cut: zero thrust, integrator reset.
  void step_unpowered(const Vec3& disturbance);
  void reset_integrator() { integrator_.setZero(); }

  const VehicleState& state() const { return state_; }
  const Vec3& integrator() const { return integrator_; }
  const VehicleParams& params() const { return params_; }
  bool on_floor() const { return state_.position.z() <= params_.floor_z + 1e-9; }

 private:
  VehicleParams params_;
  VehicleState state_;
  Vec3 integrator_ = Vec3::Zero();
};

/// Vertical disturbance standing in for gravity-induced sag and barometric
/// error: a constant downward bias, a slow sinusoidal drift with seeded phase,
/// and first-order low-pass noise. x and y are identically zero.
struct DisturbanceParams {
  double gain = 1.0;               // overall scale; 0 disables
  double z_bias = 0.08;            // m/s^2, downward
  double drift_amplitude = 0.1;    // m/s^2
  double drift_period = 20.0;      // s
  double noise_sigma = 0.1;        // m/s^2, stationary std of the filtered noise
  double noise_tau = 1.0;          // s
  std::uint64_t seed = 7;

  json to_json() const;
  static DisturbanceParams from_json(const json& j);
};

class GravityBias {
 public:
  GravityBias(DisturbanceParams params, double dt);
  Vec3 next();

 private:
  DisturbanceParams params_;
  double dt_;
  double phase_;
  double noise_ = 0.0;
  std::uint64_t tick_ = 0;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// First n samples of the GravityBias series.
std::vector<Vec3> gravity_bias_profile(const DisturbanceParams& params, double dt, std::size_t n);

}  // namespace inspecsim
