#include "inspecsim/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace inspecsim {

namespace {

json gains_to_json(const PidGains& g) { return json{{"kp", g.kp}, {"ki", g.ki}, {"kd", g.kd}}; }

PidGains gains_from_json(const json& j, PidGains g) {
  g.kp = json_get_or(j, "kp", g.kp);
  g.ki = json_get_or(j, "ki", g.ki);
  g.kd = json_get_or(j, "kd", g.kd);
  return g;
}

}  // namespace

void VehicleParams::validate() const {
  if (!(mass > 0.0 && mass < max_thrust_mass_equiv))
    throw Error(ErrorCode::InvalidInput, "vehicle: mass must be positive and below max_thrust_mass_equiv");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidInput, "vehicle: dt must be > 0");
  if (!(max_speed > 0.0)) throw Error(ErrorCode::InvalidInput, "vehicle: max_speed must be > 0");
  if (!(yaw_rate_limit > 0.0)) throw Error(ErrorCode::InvalidInput, "vehicle: yaw_rate_limit must be > 0");
  if (!(integrator_clamp >= 0.0)) throw Error(ErrorCode::InvalidInput, "vehicle: integrator_clamp must be >= 0");
  if (!(ground_effect_height > 0.0)) throw Error(ErrorCode::InvalidInput, "vehicle: ground_effect_height must be > 0");
  if (!(drag_coeff >= 0.0)) throw Error(ErrorCode::InvalidInput, "vehicle: drag_coeff must be >= 0");
}

json VehicleParams::to_json() const {
  return json{{"gravity", gravity},
              {"mass", mass},
              {"max_thrust_mass_equiv", max_thrust_mass_equiv},
              {"drag_coeff", drag_coeff},
              {"max_speed", max_speed},
              {"yaw_rate_limit", yaw_rate_limit},
              {"pid_xy", gains_to_json(xy)},
              {"pid_z", gains_to_json(z)},
              {"integrator_clamp", integrator_clamp},
              {"ground_effect_height", ground_effect_height},
              {"ground_effect_gain", ground_effect_gain},
              {"floor_z", floor_z},
              {"dt", dt}};
}

VehicleParams VehicleParams::from_json(const json& j) {
  VehicleParams p;
  p.gravity = json_get_or(j, "gravity", p.gravity);
  p.mass = json_get_or(j, "mass", p.mass);
  p.max_thrust_mass_equiv = json_get_or(j, "max_thrust_mass_equiv", p.max_thrust_mass_equiv);
  p.drag_coeff = json_get_or(j, "drag_coeff", p.drag_coeff);
  p.max_speed = json_get_or(j, "max_speed", p.max_speed);
  p.yaw_rate_limit = json_get_or(j, "yaw_rate_limit", p.yaw_rate_limit);
  if (j.contains("pid_xy")) p.xy = gains_from_json(j.at("pid_xy"), p.xy);
  if (j.contains("pid_z")) p.z = gains_from_json(j.at("pid_z"), p.z);
  p.integrator_clamp = json_get_or(j, "integrator_clamp", p.integrator_clamp);
  p.ground_effect_height = json_get_or(j, "ground_effect_height", p.ground_effect_height);
  p.ground_effect_gain = json_get_or(j, "ground_effect_gain", p.ground_effect_gain);
  p.floor_z = json_get_or(j, "floor_z", p.floor_z);
  p.dt = json_get_or(j, "dt", p.dt);
  p.validate();
  return p;
}

PidOutput pid_accel(const VehicleState& state, const ControlCommand& cmd, const Vec3& integrator,
                    double dt, const VehicleParams& params) {
  const Vec3 err = cmd.setpoint.position() - state.position;
  Vec3 integ = integrator;
  if (cmd.mode == ControlMode::PositionHold) {
    integ += err * dt;
    integ = integ.cwiseMax(-params.integrator_clamp).cwiseMin(params.integrator_clamp);
  }
  const Vec3 kp(params.xy.kp, params.xy.kp, params.z.kp);
  const Vec3 ki(params.xy.ki, params.xy.ki, params.z.ki);
  const Vec3 kd(params.xy.kd, params.xy.kd, params.z.kd);
  Vec3 accel = kp.cwiseProduct(err) + ki.cwiseProduct(integ) - kd.cwiseProduct(state.velocity);
  accel.z() += params.gravity;

  const double a_max = params.max_accel();
  accel.z() = std::clamp(accel.z(), 0.0, a_max);
  const double h_max = std::sqrt(std::max(0.0, a_max * a_max - accel.z() * accel.z()));
  const double h = std::hypot(accel.x(), accel.y());
  if (h > h_max) {
    const double s = h_max / h;
    accel.x() *= s;
    accel.y() *= s;
  }
  return PidOutput{accel, integ};
}

Vec3 ground_effect(double z, const VehicleParams& params) {
  const double height = z - params.floor_z;
  const double f = std::max(0.0, 1.0 - height / params.ground_effect_height);
  return Vec3(0.0, 0.0, params.ground_effect_gain * params.gravity * f);
}

VehicleState integrate(const VehicleState& state, const Vec3& accel_cmd, double yaw_setpoint,
                       const VehicleParams& params, const Vec3& disturbance, bool motors_on) {
  const double dt = params.dt;
  Vec3 accel = -params.drag_coeff * state.velocity + disturbance;
  accel.z() -= params.gravity;
  if (motors_on) accel += accel_cmd + ground_effect(state.position.z(), params);

  VehicleState next = state;
  next.velocity = state.velocity + accel * dt;
  if (motors_on) {
    const double speed = next.velocity.norm();
    if (speed > params.max_speed) next.velocity *= params.max_speed / speed;
  }
  next.position = state.position + next.velocity * dt;
  if (next.position.z() < params.floor_z) {
    next.position.z() = params.floor_z;
    next.velocity.z() = std::max(0.0, next.velocity.z());
    if (!motors_on) {
      next.velocity.x() = 0.0;
      next.velocity.y() = 0.0;
    }
  }

  const double max_turn = params.yaw_rate_limit * dt;
  const double turn = std::clamp(normalize_yaw(yaw_setpoint - state.yaw), -max_turn, max_turn);
  next.yaw = normalize_yaw(state.yaw + turn);
  next.time = state.time + dt;
  return next;
}

Quadrotor::Quadrotor(VehicleParams params, VehicleState initial)
    : params_(params), state_(initial) {
  params_.validate();
  state_.yaw = normalize_yaw(state_.yaw);
}

Vec3 Quadrotor::step(const ControlCommand& cmd, const Vec3& disturbance) {
  return step(cmd, disturbance, state_);
}

Vec3 Quadrotor::step(const ControlCommand& cmd, const Vec3& disturbance, const VehicleState& feedback) {
  const PidOutput out = pid_accel(feedback, cmd, integrator_, params_.dt, params_);
  integrator_ = out.integrator;
  state_ = integrate(state_, out.accel_cmd, cmd.setpoint.yaw, params_, disturbance, true);
  return out.accel_cmd;
}

void Quadrotor::step_unpowered(const Vec3& disturbance) {
  integrator_.setZero();
  state_ = integrate(state_, Vec3::Zero(), state_.yaw, params_, disturbance, false);
}

json DisturbanceParams::to_json() const {
  return json{{"gain", gain},
              {"z_bias", z_bias},
              {"drift_amplitude", drift_amplitude},
              {"drift_period", drift_period},
              {"noise_sigma", noise_sigma},
              {"noise_tau", noise_tau},
              {"seed", seed}};
}

DisturbanceParams DisturbanceParams::from_json(const json& j) {
  DisturbanceParams p;
  p.gain = json_get_or(j, "gain", p.gain);
  p.z_bias = json_get_or(j, "z_bias", p.z_bias);
  p.drift_amplitude = json_get_or(j, "drift_amplitude", p.drift_amplitude);
  p.drift_period = json_get_or(j, "drift_period", p.drift_period);
  p.noise_sigma = json_get_or(j, "noise_sigma", p.noise_sigma);
  p.noise_tau = json_get_or(j, "noise_tau", p.noise_tau);
  p.seed = json_get_or(j, "seed", p.seed);
  if (!(p.drift_period > 0.0) || !(p.noise_tau > 0.0) || !(p.noise_sigma >= 0.0))
    throw Error(ErrorCode::InvalidInput, "disturbance: drift_period and noise_tau must be > 0, noise_sigma >= 0");
  return p;
}

GravityBias::GravityBias(DisturbanceParams params, double dt)
    : params_(params), dt_(dt), rng_(make_rng(params.seed, {0xb1a5ULL})) {
  phase_ = 2.0 * std::numbers::pi * uniform01(rng_);
}

Vec3 GravityBias::next() {
  const double t = static_cast<double>(tick_++) * dt_;
  // AR(1) discretization of an Ornstein-Uhlenbeck process with stationary std noise_sigma.
  const double rho = std::exp(-dt_ / params_.noise_tau);
  noise_ = rho * noise_ + params_.noise_sigma * std::sqrt(1.0 - rho * rho) * normal_(rng_);
  if (params_.gain == 0.0) return Vec3::Zero();
  const double drift = params_.drift_amplitude * std::sin(2.0 * std::numbers::pi * t / params_.drift_period + phase_);
  return Vec3(0.0, 0.0, params_.gain * (-params_.z_bias + drift + noise_));
}

std::vector<Vec3> gravity_bias_profile(const DisturbanceParams& params, double dt, std::size_t n) {
  GravityBias gen(params, dt);
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(gen.next());
  return out;
}

}  // namespace inspecsim
