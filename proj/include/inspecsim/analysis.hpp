#pragma once

#include <string>
#include <vector>

#include "inspecsim/mission.hpp"

namespace inspecsim {

/// Ordered telemetry records, one per tick.
struct FlightLog {
  std::vector<TelemetryRecord> records;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }

  /// Throws InvalidInput unless timestamps strictly increase with constant
  /// spacing (1e-9 s tolerance).
  void validate() const;

  std::string to_ndjson() const;
  static FlightLog from_ndjson(const std::string& text);
  static FlightLog load(const std::string& path);
  void save(const std::string& path) const;
};

/// Setpoint active at time t: the record with the largest timestamp <= t.
/// A waypoint advance takes effect on the tick it happens. Throws OutOfRange
/// outside [first, last] record time.
Vec3 reference_position(double t, const FlightLog& log);

struct TrackingReport {
  double mae_x = 0.0;
  double mae_y = 0.0;
  double mae_z = 0.0;
  double mae_xy = 0.0;
  double max_err_x = 0.0;
  double max_err_y = 0.0;
  double max_err_z = 0.0;
  bool mission_complete = false;
  std::size_t waypoints_visited = 0;
  std::size_t total_waypoints = 0;
  double flight_time = 0.0;
  std::size_t samples = 0;
  double settle_skip = 0.0;

  json to_json() const;
  /// Pretty-printed, 9 significant digits, trailing newline.
  std::string dump() const;
};

/// Errors of the true position against the setpoint channel over Autonomous
/// samples, skipping the first settle_skip seconds after each waypoint
/// advance. flight_time spans the first to the last non-Idle record.
/// Throws NoAutonomousSegment when no sample qualifies.
TrackingReport compute_report(const FlightLog& log, double settle_skip = 0.0);

struct AxisSeries {
  std::vector<double> time, ref, truth, est;
};

/// CSV text with header time,ref,true,est; values at 9 significant digits.
std::string axis_csv(const FlightLog& log, int axis);
AxisSeries parse_axis_csv(const std::string& text);

/// Writes report_path and, next to it, <stem>_x.csv, <stem>_y.csv,
/// <stem>_z.csv where stem is report_path without its ".json" suffix.
/// Returns the paths written.
std::vector<std::string> export_report(const TrackingReport& report, const FlightLog& log,
                                       const std::string& report_path);

}  // namespace inspecsim
