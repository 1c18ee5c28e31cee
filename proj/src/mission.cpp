#include "inspecsim/mission.hpp"

#include <algorithm>
#include <cmath>

#include "inspecsim/planner/sampling.hpp"

namespace inspecsim {

std::string_view to_string(MissionMode mode) {
  switch (mode) {
    case MissionMode::Idle: return "idle";
    case MissionMode::TakingOff: return "taking_off";
    case MissionMode::ManualHover: return "manual_hover";
    case MissionMode::Autonomous: return "autonomous";
    case MissionMode::Paused: return "paused";
    case MissionMode::Landing: return "landing";
    case MissionMode::EmergencyStop: return "emergency_stop";
    case MissionMode::Complete: return "complete";
  }
  return "unknown";
}

std::optional<MissionMode> parse_mode(std::string_view label) {
  for (MissionMode m : kAllModes)
    if (to_string(m) == label) return m;
  return std::nullopt;
}

std::string_view to_string(OperatorCommand cmd) {
  switch (cmd) {
    case OperatorCommand::TakeOff: return "take_off";
    case OperatorCommand::Land: return "land";
    case OperatorCommand::StartAutonomous: return "start_auto";
    case OperatorCommand::Pause: return "pause";
    case OperatorCommand::Resume: return "resume";
    case OperatorCommand::EStop: return "estop";
  }
  return "unknown";
}

std::optional<OperatorCommand> parse_command(std::string_view label) {
  for (OperatorCommand c : kAllCommands)
    if (to_string(c) == label) return c;
  return std::nullopt;
}

std::optional<MissionMode> defined_transition(MissionMode mode, OperatorCommand cmd, bool airborne) {
  using M = MissionMode;
  switch (cmd) {
    case OperatorCommand::EStop:
      return M::EmergencyStop;
    case OperatorCommand::TakeOff:
      if (mode == M::Idle) return M::TakingOff;
      break;
    case OperatorCommand::StartAutonomous:
      if (mode == M::ManualHover && airborne) return M::Autonomous;
      break;
    case OperatorCommand::Pause:
      if (mode == M::Autonomous) return M::Paused;
      break;
    case OperatorCommand::Resume:
      if (mode == M::Paused) return M::Autonomous;
      break;
    case OperatorCommand::Land:
      if (mode == M::ManualHover || mode == M::Autonomous || mode == M::Paused || mode == M::Complete)
        return M::Landing;
      break;
  }
  return std::nullopt;
}

MissionMode fsm_transition(MissionMode mode, OperatorCommand cmd, bool airborne) {
  return defined_transition(mode, cmd, airborne).value_or(mode);
}

std::string rejection_reason(MissionMode mode, OperatorCommand cmd, bool airborne) {
  if (defined_transition(mode, cmd, airborne)) return {};
  if (cmd == OperatorCommand::StartAutonomous && !airborne) return "not airborne";
  return std::string("not allowed in mode ") + std::string(to_string(mode));
}

bool inside_arrival_box(const Vec3& est_pos, const Waypoint4D& wp, double half_side) {
  return std::abs(est_pos.x() - wp.x) <= half_side && std::abs(est_pos.y() - wp.y) <= half_side &&
         std::abs(est_pos.z() - wp.z) <= half_side;
}

std::pair<WaypointTracker, TrackerEvent> waypoint_check(WaypointTracker tracker, const Vec3& est_pos, double dt) {
  if (tracker.finished()) return {std::move(tracker), TrackerEvent::MissionComplete};
  const Waypoint4D& wp = tracker.path->waypoints[tracker.active_index];
  if (inside_arrival_box(est_pos, wp, tracker.box_half_side))
    tracker.dwell_elapsed += dt;
  else
    tracker.dwell_elapsed = 0.0;

  if (tracker.dwell_elapsed > tracker.dwell_required + kDwellSlack) {
    ++tracker.active_index;
    tracker.dwell_elapsed = 0.0;
    const TrackerEvent ev = tracker.finished() ? TrackerEvent::MissionComplete : TrackerEvent::Advanced;
    return {std::move(tracker), ev};
  }
  return {std::move(tracker), TrackerEvent::None};
}

namespace {

constexpr double kTouchdownHeight = 0.05;
// Integrate only near the setpoint; in transit the integrator is frozen.
constexpr double kIntegrateRadius = 0.15;

bool column_clear(const WorldModel& world, const Eigen::Vector2d& xy, double floor_z, double hover_z) {
  const Vec3 ground(xy.x(), xy.y(), floor_z);
  const Vec3 hover(xy.x(), xy.y(), hover_z);
  return world.inside_bounds(ground) && world.inside_bounds(hover) && world.point_clear(hover) &&
         !world.point_in_inflated_target(ground, world.safety_margin()) && world.segment_clear(ground, hover);
}

}  // namespace

Eigen::Vector2d Mission::resolve_start(const MissionConfig& config) {
  if (config.start) return *config.start;
  const WorldModel& world = config.world;
  const double floor_z = config.vehicle.floor_z;
  const double hover_z = floor_z + config.takeoff_altitude;
  if (!config.path.waypoints.empty()) {
    const Waypoint4D& w0 = config.path.waypoints.front();
    const Eigen::Vector2d xy(w0.x, w0.y);
    if (column_clear(world, xy, floor_z, hover_z)) return xy;
  }
  const Aabb& b = world.bounds();
  const double inset = world.safety_margin() + 0.1;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector2d xy((i & 1) ? b.max_corner.x() - inset : b.min_corner.x() + inset,
                             (i & 2) ? b.max_corner.y() - inset : b.min_corner.y() + inset);
    if (column_clear(world, xy, floor_z, hover_z)) return xy;
  }
  throw Error(ErrorCode::InvalidInput, "mission: no clear take-off point; set 'start' explicitly");
}

namespace {

std::shared_ptr<const InspectionPath> build_flight_path(const MissionConfig& config, const Eigen::Vector2d& start,
                                                        std::size_t& approach_count) {
  auto flight = std::make_shared<InspectionPath>(config.path);
  approach_count = 0;
  if (config.path.waypoints.empty()) return flight;
  const Waypoint4D& w0 = config.path.waypoints.front();
  const Waypoint4D hover = Waypoint4D::at(Vec3(start.x(), start.y(), config.vehicle.floor_z + config.takeoff_altitude),
                                          w0.yaw);
  const auto legs = route_detour(hover, w0, config.world);
  // Intermediate legs only; the hover point and w0 itself are excluded.
  if (legs.size() > 2) {
    flight->waypoints.insert(flight->waypoints.begin(), legs.begin() + 1, legs.end() - 1);
    approach_count = legs.size() - 2;
  }
  return flight;
}

}  // namespace

Mission::Mission(MissionConfig config)
    : config_(std::move(config)),
      vehicle_(config_.vehicle),
      lps_(config_.noise),
      ekf_(config_.estimator, Vec3::Zero(), config_.noise.range_sigma),
      disturbance_(config_.disturbance, config_.vehicle.dt) {
  if (config_.path.waypoints.empty()) throw Error(ErrorCode::InvalidInput, "mission: path has no waypoints");
  if (!(config_.box_half_side > 0.0) || !(config_.dwell_required >= 0.0))
    throw Error(ErrorCode::InvalidInput, "mission: box_half_side must be > 0 and dwell_required >= 0");
  start_ = resolve_start(config_);
  tracker_.path = build_flight_path(config_, start_, approach_count_);
  tracker_.box_half_side = config_.box_half_side;
  tracker_.dwell_required = config_.dwell_required;

  VehicleState initial;
  initial.position = Vec3(start_.x(), start_.y(), config_.vehicle.floor_z);
  initial.yaw = config_.path.waypoints.front().yaw;
  vehicle_ = Quadrotor(config_.vehicle, initial);
  ekf_ = RangeEkf(config_.estimator, initial.position, config_.noise.range_sigma);
  hold_ = Waypoint4D::at(initial.position, initial.yaw);
}

void Mission::enqueue(OperatorCommand cmd, std::uint64_t tag) { queue_.emplace_back(cmd, tag); }

double Mission::time() const { return static_cast<double>(tick_) * config_.vehicle.dt; }

Vec3 Mission::estimate() const { return ekf_.state().position() + estimate_bias_; }

bool Mission::airborne() const {
  if (mode_ == MissionMode::Idle || mode_ == MissionMode::EmergencyStop) return false;
  return estimate().z() - config_.vehicle.floor_z >= 0.5 * config_.takeoff_altitude;
}

void Mission::apply_command(OperatorCommand cmd, std::uint64_t tag, std::vector<CommandOutcome>& out) {
  const bool air = airborne();
  CommandOutcome outcome{cmd, false, rejection_reason(mode_, cmd, air), tag, mode_};
  if (const auto next = defined_transition(mode_, cmd, air)) {
    outcome.accepted = true;
    const MissionMode prev = mode_;
    mode_ = *next;
    switch (mode_) {
      case MissionMode::TakingOff:
        vehicle_.reset_integrator();
        hold_ = Waypoint4D::at(Vec3(start_.x(), start_.y(), config_.vehicle.floor_z + config_.takeoff_altitude),
                               vehicle_.state().yaw);
        break;
      case MissionMode::Paused:
        hold_ = Waypoint4D::at(estimate(), vehicle_.state().yaw);
        break;
      case MissionMode::Landing:
        if (prev == MissionMode::Autonomous) hold_ = Waypoint4D::at(estimate(), vehicle_.state().yaw);
        landing_z_ = std::max(config_.vehicle.floor_z, std::min(hold_.z, estimate().z()));
        break;
      case MissionMode::Autonomous:
        if (prev == MissionMode::ManualHover) tracker_.dwell_elapsed = 0.0;
        break;
      default:
        break;
    }
  }
  outcome.mode_after = mode_;
  out.push_back(std::move(outcome));
}

TickResult Mission::tick() {
  TickResult result;
  const double dt = config_.vehicle.dt;
  const double t = time();

  while (!queue_.empty()) {
    const auto [cmd, tag] = queue_.front();
    queue_.pop_front();
    apply_command(cmd, tag, result.outcomes);
  }

  // Localization: one anchor per tick, round robin.
  const auto& anchors = config_.world.anchors();
  const Anchor& anchor = anchors[tick_ % anchors.size()];
  const auto meas = lps_.measure(vehicle_.state().position, anchor, t);
  if (tick_ > 0) ekf_.predict(dt);
  if (meas) ekf_.update(*meas, anchor);
  const Vec3 est = estimate();
  if (!est.allFinite() || !vehicle_.state().position.allFinite()) mode_ = MissionMode::EmergencyStop;

  // Mode events driven by the simulation.
  const double floor_z = config_.vehicle.floor_z;
  if (mode_ == MissionMode::TakingOff && est.z() >= hold_.z - config_.box_half_side) {
    mode_ = MissionMode::ManualHover;
  } else if (mode_ == MissionMode::Autonomous) {
    auto [next, event] = waypoint_check(std::move(tracker_), est, dt);
    tracker_ = std::move(next);
    result.event = event;
    if (event == TrackerEvent::MissionComplete) {
      mode_ = MissionMode::Complete;
      reached_complete_ = true;
      hold_ = tracker_.path->waypoints.back();
    }
  } else if (mode_ == MissionMode::Landing) {
    landing_z_ = std::max(floor_z, landing_z_ - config_.landing_rate * dt);
    if (landing_z_ <= floor_z && est.z() - floor_z <= kTouchdownHeight) mode_ = MissionMode::Idle;
  }

  Waypoint4D setpoint = hold_;
  bool motors_on = true;
  switch (mode_) {
    case MissionMode::Idle:
    case MissionMode::EmergencyStop:
      motors_on = false;
      setpoint = Waypoint4D::at(vehicle_.state().position, vehicle_.state().yaw);
      break;
    case MissionMode::Autonomous:
      setpoint = tracker_.path->waypoints[std::min(tracker_.active_index, tracker_.total() - 1)];
      break;
    case MissionMode::Landing:
      setpoint.z = landing_z_;
      break;
    default:
      break;
  }

  TelemetryRecord& rec = result.record;
  const VehicleState& truth = vehicle_.state();
  rec.time = t;
  rec.true_pos = truth.position;
  rec.true_vel = truth.velocity;
  rec.yaw = truth.yaw;
  rec.est_pos = est;
  rec.est_vel = ekf_.state().velocity();
  rec.mode = mode_;
  rec.active_index = tracker_.active_index;
  rec.total_waypoints = tracker_.total();
  rec.dwell_elapsed = tracker_.dwell_elapsed;
  rec.setpoint = setpoint;

  const Vec3 disturbance = disturbance_.next();
  if (motors_on) {
    VehicleState feedback = truth;
    feedback.position = est;
    feedback.velocity = ekf_.state().velocity();
    const Vec3 err = setpoint.position() - est;
    const ControlCommand cmd{setpoint, err.lpNorm<Eigen::Infinity>() <= kIntegrateRadius
                                           ? ControlMode::PositionHold
                                           : ControlMode::VelocityTracking};
    rec.accel_cmd = vehicle_.step(cmd, disturbance, feedback);
  } else {
    vehicle_.step_unpowered(disturbance);
    rec.accel_cmd = Vec3::Zero();
  }
  ++tick_;
  return result;
}

}  // namespace inspecsim
