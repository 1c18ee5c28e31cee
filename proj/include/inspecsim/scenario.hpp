#pragma once

#include <optional>
#include <string>
#include <vector>

#include "inspecsim/analysis.hpp"
#include "inspecsim/mission.hpp"
#include "inspecsim/planner/spiral.hpp"
#include "inspecsim/planner/viewpoints.hpp"

namespace inspecsim {

/// A runnable scenario. JSON layout:
///
///   {
///     "name": "demo_spiral",
///     "world": "worlds/box_stack.json" | {inline world},
///     "path": "plan.json" | {"planner": "spiral"|"sampling", "params": {...}},
///     "waypoint_spacing": 0.1,
///     "vehicle": {...}, "noise": {...}, "estimator": {...}, "disturbance": {...},
///     "mission": {"takeoff_altitude", "landing_rate", "box_half_side",
///                 "dwell_required", "start": [x, y], "max_time"},
///     "seed": 1, "tick_rate_hz": 100, "settle_skip": 0
///   }
///
/// Relative file references resolve against the scenario file's directory.
/// A top-level "seed" reseeds the ranging noise and the disturbance; the
/// planned path does not depend on it.
struct Scenario {
  Scenario(std::string n, MissionConfig c, InspectionPath p)
      : name(std::move(n)), config(std::move(c)), planned(std::move(p)) {}

  std::string name;
  MissionConfig config;
  /// The path as planned or loaded, before densification.
  InspectionPath planned;
  double waypoint_spacing = 0.0;
  double max_time = 1800.0;
  double settle_skip = 0.0;
  std::optional<std::uint64_t> seed;

  static Scenario from_json(const json& j, const std::string& base_dir = ".");
  static Scenario load(const std::string& path);

  /// Same scenario with noise and disturbance reseeded from `seed`.
  Scenario with_seed(std::uint64_t seed) const;
};

/// Plans a path from {"planner": "spiral"|"sampling", "params": {...}}.
InspectionPath plan_from_spec(const WorldModel& world, const json& spec);

struct HeadlessResult {
  FlightLog log;
  std::optional<TrackingReport> report;
  MissionMode final_mode = MissionMode::Idle;
  bool mission_complete = false;
  std::vector<CommandOutcome> outcomes;
};

/// Scripted flight: TakeOff at tick 0, StartAutonomous once in ManualHover,
/// Land once Complete; stops on touchdown, EmergencyStop, or max_time.
/// `report` is empty when the log has no Autonomous segment.
HeadlessResult run_headless(const Scenario& scenario);

}  // namespace inspecsim
