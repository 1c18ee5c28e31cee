#include "inspecsim/planner/path.hpp"

#include <cmath>
#include <numbers>

namespace inspecsim {

double normalize_yaw(double yaw) {
  constexpr double kPi = std::numbers::pi;
  double r = std::remainder(yaw, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double yaw_towards(const Vec3& from, const Vec3& to) {
  return normalize_yaw(std::atan2(to.y() - from.y(), to.x() - from.x()));
}

double InspectionPath::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i)
    total += (waypoints[i].position() - waypoints[i - 1].position()).norm();
  return total;
}

json InspectionPath::to_json() const {
  json wps = json::array();
  for (const Waypoint4D& w : waypoints) wps.push_back({{"x", w.x}, {"y", w.y}, {"z", w.z}, {"yaw", w.yaw}});
  return json{{"planner", planner_name}, {"waypoints", std::move(wps)}, {"coverage", coverage}};
}

InspectionPath InspectionPath::from_json(const json& j) {
  if (!j.is_object() || !j.contains("waypoints") || !j.at("waypoints").is_array())
    throw Error(ErrorCode::InvalidInput, "path: missing 'waypoints' array");
  InspectionPath path;
  path.planner_name = json_get_or<std::string>(j, "planner", "external");
  path.coverage = json_get_or(j, "coverage", 0.0);
  for (const auto& w : j.at("waypoints")) {
    for (const char* key : {"x", "y", "z"})
      if (!w.contains(key) || !w.at(key).is_number())
        throw Error(ErrorCode::InvalidInput, std::string("waypoint missing numeric '") + key + "'");
    path.waypoints.push_back(Waypoint4D{w.at("x").get<double>(), w.at("y").get<double>(),
                                        w.at("z").get<double>(),
                                        normalize_yaw(json_get_or(w, "yaw", 0.0))});
  }
  return path;
}

InspectionPath InspectionPath::load(const std::string& path) { return from_json(read_json_file(path)); }

std::optional<std::string> validate_path(const InspectionPath& path, const WorldModel& world) {
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const Waypoint4D& w = path.waypoints[i];
    const Vec3 p = w.position();
    if (!world.inside_bounds(p)) return "waypoint " + std::to_string(i) + " outside bounds";
    if (world.point_in_inflated_target(p, world.safety_margin()))
      return "waypoint " + std::to_string(i) + " inside safety margin";
    if (!(w.yaw > -std::numbers::pi && w.yaw <= std::numbers::pi))
      return "waypoint " + std::to_string(i) + " yaw not normalized";
    if (i > 0 && world.segment_hits_target(path.waypoints[i - 1].position(), p, world.safety_margin()))
      return "segment " + std::to_string(i - 1) + "-" + std::to_string(i) + " collides";
  }
  return std::nullopt;
}

InspectionPath densify(const InspectionPath& path, double max_step) {
  if (!(max_step > 0.0)) throw Error(ErrorCode::InvalidInput, "densify: max_step must be > 0");
  InspectionPath out;
  out.planner_name = path.planner_name;
  out.coverage = path.coverage;
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const Waypoint4D& b = path.waypoints[i];
    if (i > 0) {
      const Vec3 pa = path.waypoints[i - 1].position();
      const Vec3 pb = b.position();
      const double len = (pb - pa).norm();
      const auto pieces = static_cast<std::size_t>(std::ceil(len / max_step * (1.0 - 1e-12)));
      for (std::size_t k = 1; k < pieces; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(pieces);
        out.waypoints.push_back(Waypoint4D::at(pa + s * (pb - pa), b.yaw));
      }
    }
    out.waypoints.push_back(b);
  }
  return out;
}

}  // namespace inspecsim
