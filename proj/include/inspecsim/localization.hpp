#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>

#include "inspecsim/json_util.hpp"
#include "inspecsim/random.hpp"
#include "inspecsim/world_model.hpp"

namespace inspecsim {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using RowVector6d = Eigen::Matrix<double, 1, 6>;

struct RangeMeasurement {
  int anchor_id = 0;
  double distance = 0.0;
  double timestamp = 0.0;
};

struct NoiseModel {
  double range_sigma = 0.05;
  double range_bias = 0.0;
  double dropout_prob = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
  json to_json() const;
  static NoiseModel from_json(const json& j);
};

/// Two-way-ranging draw: empty with probability dropout_prob, otherwise
/// |true_pos - anchor| + bias + N(0, sigma), floored at zero.
std::optional<RangeMeasurement> simulate_range(const Vec3& true_pos, const Anchor& anchor,
                                               const NoiseModel& noise, Rng& rng, double timestamp = 0.0);

/// Stateful ranging source: measurement k draws from a stream derived from
/// (seed, k), so a replay with the same seed reproduces every draw.
class RangeSimulator {
 public:
  explicit RangeSimulator(NoiseModel noise) : noise_(noise) { noise_.validate(); }

  std::optional<RangeMeasurement> measure(const Vec3& true_pos, const Anchor& anchor, double timestamp);
  std::uint64_t count() const { return counter_; }
  const NoiseModel& noise() const { return noise_; }

 private:
  NoiseModel noise_;
  std::uint64_t counter_ = 0;
};

/// Mean is (position, velocity).
struct EstimatorState {
  Vector6d mean = Vector6d::Zero();
  Matrix6d covariance = Matrix6d::Identity();

  Vec3 position() const { return mean.head<3>(); }
  Vec3 velocity() const { return mean.tail<3>(); }
};

/// Constant-velocity prediction with white acceleration noise of spectral
/// density `accel_noise_density` ((m/s^2)^2 / Hz).
EstimatorState ekf_predict(const EstimatorState& est, double dt, double accel_noise_density);

/// d|p - a| / d(p, v) evaluated at the state mean.
RowVector6d range_jacobian(const Vector6d& mean, const Vec3& anchor_pos);

enum class UpdateOutcome { Applied, Gated, DegenerateGeometry };

struct UpdateResult {
  EstimatorState state;
  UpdateOutcome outcome = UpdateOutcome::Applied;
  double innovation = 0.0;
  double innovation_std = 0.0;
};

inline constexpr double kInnovationGate = 5.0;  // in innovation standard deviations
inline constexpr double kMinAnchorDistance = 1e-6;
/// Floor on the filter's assumed range sigma. A near-zero value lets the
/// covariance collapse faster than linearization error decays, and the gate
/// then rejects exact ranges.
inline constexpr double kMinFilterRangeSigma = 0.01;

/// Scalar range update, Joseph form. Skipped (state unchanged) when the
/// estimate sits on the anchor or when |innovation| exceeds 5 innovation
/// standard deviations.
UpdateResult ekf_update_range(const EstimatorState& est, const RangeMeasurement& meas, const Anchor& anchor,
                              double sigma);

struct EstimatorParams {
  double accel_noise_density = 0.1;
  double initial_position_sigma = 0.5;
  double initial_velocity_sigma = 0.1;
  /// Measurement sigma assumed by the filter; <= 0 means use the noise model's.
  double range_sigma = 0.0;

  json to_json() const;
  static EstimatorParams from_json(const json& j);
};

/// Single-owner filter with bookkeeping counters.
class RangeEkf {
 public:
  RangeEkf(EstimatorParams params, const Vec3& initial_position, double range_sigma);

  void predict(double dt);
  UpdateOutcome update(const RangeMeasurement& meas, const Anchor& anchor);

  const EstimatorState& state() const { return state_; }
  std::uint64_t gated_count() const { return gated_; }
  std::uint64_t degenerate_count() const { return degenerate_; }
  std::uint64_t applied_count() const { return applied_; }

 private:
  EstimatorParams params_;
  double range_sigma_;
  EstimatorState state_;
  std::uint64_t gated_ = 0;
  std::uint64_t degenerate_ = 0;
  std::uint64_t applied_ = 0;
};

}  // namespace inspecsim
