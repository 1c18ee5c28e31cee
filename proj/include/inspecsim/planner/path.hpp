#pragma once

#include <optional>
#include <string>
#include <vector>

#include "inspecsim/json_util.hpp"
#include "inspecsim/world_model.hpp"

namespace inspecsim {

/// Wraps an angle into (-pi, pi].
double normalize_yaw(double yaw);

/// Heading (atan2 in the x/y plane) that looks from `from` toward `to`.
double yaw_towards(const Vec3& from, const Vec3& to);

/// Commanded pose sample. yaw in radians, normalized into (-pi, pi].
struct Waypoint4D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;

  Vec3 position() const { return Vec3(x, y, z); }
  static Waypoint4D at(const Vec3& p, double yaw) { return {p.x(), p.y(), p.z(), normalize_yaw(yaw)}; }

  friend bool operator==(const Waypoint4D&, const Waypoint4D&) = default;
};

struct InspectionPath {
  std::vector<Waypoint4D> waypoints;
  std::string planner_name;
  double coverage = 0.0;

  std::size_t size() const { return waypoints.size(); }
  /// Sum of straight segment lengths.
  double length() const;

  json to_json() const;
  static InspectionPath from_json(const json& j);
  static InspectionPath load(const std::string& path);
};

/// Independent feasibility check: every waypoint inside bounds and clear of
/// the target inflated by safety_margin, every consecutive segment clear,
/// every yaw normalized. Returns a description of the first violation.
std::optional<std::string> validate_path(const InspectionPath& path, const WorldModel& world);

/// Splits every segment longer than max_step into equal pieces no longer than
/// max_step (a relative 1e-12 excess is tolerated, so a 0.1 m leg at 0.05
/// spacing splits in two). Inserted waypoints take the yaw of the segment's end waypoint.
/// Original waypoints are preserved in order.
InspectionPath densify(const InspectionPath& path, double max_step);

}  // namespace inspecsim
