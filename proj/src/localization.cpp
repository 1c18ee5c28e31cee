#include "inspecsim/localization.hpp"

#include <algorithm>
#include <cmath>

namespace inspecsim {

void NoiseModel::validate() const {
  if (!(range_sigma >= 0.0)) throw Error(ErrorCode::InvalidInput, "noise: range_sigma must be >= 0");
  if (!(dropout_prob >= 0.0 && dropout_prob <= 1.0))
    throw Error(ErrorCode::InvalidInput, "noise: dropout_prob must be in [0, 1]");
}

json NoiseModel::to_json() const {
  return json{{"range_sigma", range_sigma}, {"range_bias", range_bias}, {"dropout_prob", dropout_prob}, {"seed", seed}};
}

NoiseModel NoiseModel::from_json(const json& j) {
  NoiseModel n;
  n.range_sigma = json_get_or(j, "range_sigma", n.range_sigma);
  n.range_bias = json_get_or(j, "range_bias", n.range_bias);
  n.dropout_prob = json_get_or(j, "dropout_prob", n.dropout_prob);
  n.seed = json_get_or(j, "seed", n.seed);
  n.validate();
  return n;
}

std::optional<RangeMeasurement> simulate_range(const Vec3& true_pos, const Anchor& anchor,
                                               const NoiseModel& noise, Rng& rng, double timestamp) {
  if (noise.dropout_prob > 0.0 && uniform01(rng) < noise.dropout_prob) return std::nullopt;
  double d = (true_pos - anchor.position).norm() + noise.range_bias;
  if (noise.range_sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, noise.range_sigma);
    d += gauss(rng);
  }
  return RangeMeasurement{anchor.id, std::max(0.0, d), timestamp};
}

std::optional<RangeMeasurement> RangeSimulator::measure(const Vec3& true_pos, const Anchor& anchor,
                                                        double timestamp) {
  Rng rng = make_rng(noise_.seed, {0x7a0ULL, counter_++});
  return simulate_range(true_pos, anchor, noise_, rng, timestamp);
}

EstimatorState ekf_predict(const EstimatorState& est, double dt, double accel_noise_density) {
  Matrix6d f = Matrix6d::Identity();
  f.topRightCorner<3, 3>() = dt * Eigen::Matrix3d::Identity();

  const double q = accel_noise_density;
  const Eigen::Matrix3d i3 = Eigen::Matrix3d::Identity();
  Matrix6d qd;
  qd.topLeftCorner<3, 3>() = q * dt * dt * dt / 3.0 * i3;
  qd.topRightCorner<3, 3>() = q * dt * dt / 2.0 * i3;
  qd.bottomLeftCorner<3, 3>() = q * dt * dt / 2.0 * i3;
  qd.bottomRightCorner<3, 3>() = q * dt * i3;

  EstimatorState out;
  out.mean = f * est.mean;
  const Matrix6d p = f * est.covariance * f.transpose() + qd;
  out.covariance = 0.5 * (p + p.transpose());
  return out;
}

RowVector6d range_jacobian(const Vector6d& mean, const Vec3& anchor_pos) {
  const Vec3 diff = mean.head<3>() - anchor_pos;
  RowVector6d h = RowVector6d::Zero();
  h.head<3>() = diff.transpose() / diff.norm();
  return h;
}

UpdateResult ekf_update_range(const EstimatorState& est, const RangeMeasurement& meas, const Anchor& anchor,
                              double sigma) {
  UpdateResult r{est, UpdateOutcome::Applied, 0.0, 0.0};
  const Vec3 diff = est.position() - anchor.position;
  const double predicted = diff.norm();
  if (predicted <= kMinAnchorDistance) {
    r.outcome = UpdateOutcome::DegenerateGeometry;
    return r;
  }
  const RowVector6d h = range_jacobian(est.mean, anchor.position);
  const double s = (h * est.covariance * h.transpose())(0, 0) + sigma * sigma;
  r.innovation = meas.distance - predicted;
  r.innovation_std = std::sqrt(s);
  if (std::abs(r.innovation) > kInnovationGate * r.innovation_std) {
    r.outcome = UpdateOutcome::Gated;
    return r;
  }
  const Vector6d k = est.covariance * h.transpose() / s;
  r.state.mean = est.mean + k * r.innovation;
  const Matrix6d ikh = Matrix6d::Identity() - k * h;
  const Matrix6d p = ikh * est.covariance * ikh.transpose() + (sigma * sigma) * (k * k.transpose());
  r.state.covariance = 0.5 * (p + p.transpose());
  return r;
}

json EstimatorParams::to_json() const {
  return json{{"accel_noise_density", accel_noise_density},
              {"initial_position_sigma", initial_position_sigma},
              {"initial_velocity_sigma", initial_velocity_sigma},
              {"range_sigma", range_sigma}};
}

EstimatorParams EstimatorParams::from_json(const json& j) {
  EstimatorParams p;
  p.accel_noise_density = json_get_or(j, "accel_noise_density", p.accel_noise_density);
  p.initial_position_sigma = json_get_or(j, "initial_position_sigma", p.initial_position_sigma);
  p.initial_velocity_sigma = json_get_or(j, "initial_velocity_sigma", p.initial_velocity_sigma);
  p.range_sigma = json_get_or(j, "range_sigma", p.range_sigma);
  if (!(p.accel_noise_density > 0.0)) throw Error(ErrorCode::InvalidInput, "estimator: accel_noise_density must be > 0");
  return p;
}

RangeEkf::RangeEkf(EstimatorParams params, const Vec3& initial_position, double range_sigma)
    : params_(params), range_sigma_(params.range_sigma > 0.0 ? params.range_sigma : range_sigma) {
  range_sigma_ = std::max(range_sigma_, kMinFilterRangeSigma);
  state_.mean.head<3>() = initial_position;
  state_.covariance = Matrix6d::Zero();
  state_.covariance.topLeftCorner<3, 3>().diagonal().setConstant(params.initial_position_sigma *
                                                                  params.initial_position_sigma);
  state_.covariance.bottomRightCorner<3, 3>().diagonal().setConstant(params.initial_velocity_sigma *
                                                                      params.initial_velocity_sigma);
}

void RangeEkf::predict(double dt) { state_ = ekf_predict(state_, dt, params_.accel_noise_density); }

UpdateOutcome RangeEkf::update(const RangeMeasurement& meas, const Anchor& anchor) {
  const UpdateResult r = ekf_update_range(state_, meas, anchor, range_sigma_);
  switch (r.outcome) {
    case UpdateOutcome::Applied: ++applied_; state_ = r.state; break;
    case UpdateOutcome::Gated: ++gated_; break;
    case UpdateOutcome::DegenerateGeometry: ++degenerate_; break;
  }
  return r.outcome;
}

}  // namespace inspecsim
