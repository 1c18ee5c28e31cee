#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "inspecsim/localization.hpp"
#include "inspecsim/planner/path.hpp"
#include "inspecsim/vehicle.hpp"
#include "inspecsim/world_model.hpp"

namespace inspecsim {

enum class MissionMode { Idle, TakingOff, ManualHover, Autonomous, Paused, Landing, EmergencyStop, Complete };
enum class OperatorCommand { TakeOff, Land, StartAutonomous, Pause, Resume, EStop };

inline constexpr MissionMode kAllModes[] = {
    MissionMode::Idle,   MissionMode::TakingOff, MissionMode::ManualHover,   MissionMode::Autonomous,
    MissionMode::Paused, MissionMode::Landing,   MissionMode::EmergencyStop, MissionMode::Complete};
inline constexpr OperatorCommand kAllCommands[] = {OperatorCommand::TakeOff, OperatorCommand::Land,
                                                   OperatorCommand::StartAutonomous, OperatorCommand::Pause,
                                                   OperatorCommand::Resume, OperatorCommand::EStop};

/// snake_case labels used in logs and on the wire.
std::string_view to_string(MissionMode mode);
std::optional<MissionMode> parse_mode(std::string_view label);
/// Wire labels: take_off, land, start_auto, pause, resume, estop.
std::string_view to_string(OperatorCommand cmd);
std::optional<OperatorCommand> parse_command(std::string_view label);

/// Target mode of a defined (mode, command) transition, or empty when the
/// pair is undefined.
///
///   Idle + TakeOff                          -> TakingOff
///   ManualHover + StartAutonomous (airborne) -> Autonomous
///   Autonomous + Pause                      -> Paused
///   Paused + Resume                         -> Autonomous
///   {ManualHover, Autonomous, Paused, Complete} + Land -> Landing
///   any + EStop                             -> EmergencyStop
std::optional<MissionMode> defined_transition(MissionMode mode, OperatorCommand cmd, bool airborne);

/// Undefined pairs are no-ops returning `mode`.
MissionMode fsm_transition(MissionMode mode, OperatorCommand cmd, bool airborne);

/// Why a command is a no-op in this state ("not airborne", ...); empty when
/// the command is accepted.
std::string rejection_reason(MissionMode mode, OperatorCommand cmd, bool airborne);

/// Arrival tracker. A waypoint is reached once the estimated position has
/// stayed inside the cube of half-side box_half_side around it (boundary
/// inclusive) for strictly more than dwell_required seconds.
struct WaypointTracker {
  std::shared_ptr<const InspectionPath> path;
  std::size_t active_index = 0;
  double dwell_elapsed = 0.0;
  double box_half_side = 0.075;
  double dwell_required = 0.5;

  std::size_t total() const { return path ? path->size() : 0; }
  bool finished() const { return active_index >= total(); }
};

enum class TrackerEvent { None, Advanced, MissionComplete };

/// Slack on the dwell comparison so that accumulated floating-point ticks do
/// not cross the threshold one tick early.
inline constexpr double kDwellSlack = 1e-9;

bool inside_arrival_box(const Vec3& est_pos, const Waypoint4D& wp, double half_side);

std::pair<WaypointTracker, TrackerEvent> waypoint_check(WaypointTracker tracker, const Vec3& est_pos, double dt);

/// One tick of the flight log.
struct TelemetryRecord {
  double time = 0.0;
  Vec3 true_pos = Vec3::Zero();
  Vec3 true_vel = Vec3::Zero();
  double yaw = 0.0;
  Vec3 est_pos = Vec3::Zero();
  Vec3 est_vel = Vec3::Zero();
  MissionMode mode = MissionMode::Idle;
  std::size_t active_index = 0;
  std::size_t total_waypoints = 0;
  double dwell_elapsed = 0.0;
  Waypoint4D setpoint;
  Vec3 accel_cmd = Vec3::Zero();
};

struct MissionConfig {
  MissionConfig(WorldModel w, InspectionPath p) : world(std::move(w)), path(std::move(p)) {}

  WorldModel world;
  InspectionPath path;
  VehicleParams vehicle;
  NoiseModel noise;
  EstimatorParams estimator;
  DisturbanceParams disturbance;
  double takeoff_altitude = 0.3;
  double landing_rate = 0.2;
  double box_half_side = 0.075;
  double dwell_required = 0.5;
  /// Take-off point (x, y) on the floor. Empty: below the first waypoint when
  /// that column is clear, else the first clear bounds corner.
  std::optional<Eigen::Vector2d> start;
};

struct CommandOutcome {
  OperatorCommand command = OperatorCommand::TakeOff;
  bool accepted = false;
  std::string reason;
  std::uint64_t tag = 0;
  MissionMode mode_after = MissionMode::Idle;
};

struct TickResult {
  TelemetryRecord record;
  std::vector<CommandOutcome> outcomes;
  TrackerEvent event = TrackerEvent::None;
};

/// The mission loop. Single writer of all mutable flight state; commands are
/// queued and drained in order at the start of each tick.
///
/// Per tick: drain commands, range one anchor (round robin), EKF
/// predict/update, arrival check on the estimated position, choose the
/// setpoint for the current mode, step the vehicle under disturbance, emit a
/// record describing the tick.
class Mission {
 public:
  explicit Mission(MissionConfig config);

  void enqueue(OperatorCommand cmd, std::uint64_t tag = 0);
  TickResult tick();

  MissionMode mode() const { return mode_; }
  const WaypointTracker& tracker() const { return tracker_; }
  const Quadrotor& vehicle() const { return vehicle_; }
  const RangeEkf& estimator() const { return ekf_; }
  const MissionConfig& config() const { return config_; }
  /// The path actually flown: approach waypoints (if any) followed by the
  /// configured path.
  const InspectionPath& flight_path() const { return *tracker_.path; }
  std::size_t approach_count() const { return approach_count_; }
  bool airborne() const;
  double time() const;
  std::uint64_t ticks() const { return tick_; }
  bool reached_complete() const { return reached_complete_; }

  /// Test hook: constant offset added to the estimate before the arrival
  /// check and the controller see it.
  void set_estimate_bias(const Vec3& bias) { estimate_bias_ = bias; }

  /// Where the mission takes off from, resolved per MissionConfig::start.
  static Eigen::Vector2d resolve_start(const MissionConfig& config);

 private:
  void apply_command(OperatorCommand cmd, std::uint64_t tag, std::vector<CommandOutcome>& out);
  Vec3 estimate() const;

  MissionConfig config_;
  Quadrotor vehicle_;
  RangeSimulator lps_;
  RangeEkf ekf_;
  GravityBias disturbance_;
  WaypointTracker tracker_;
  MissionMode mode_ = MissionMode::Idle;
  std::deque<std::pair<OperatorCommand, std::uint64_t>> queue_;
  Waypoint4D hold_;
  double landing_z_ = 0.0;
  Eigen::Vector2d start_;
  std::size_t approach_count_ = 0;
  std::uint64_t tick_ = 0;
  bool reached_complete_ = false;
  Vec3 estimate_bias_ = Vec3::Zero();
};

}  // namespace inspecsim
