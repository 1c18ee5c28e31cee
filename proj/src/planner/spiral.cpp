#include "inspecsim/planner/spiral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "inspecsim/planner/viewpoints.hpp"

namespace inspecsim {

json SpiralParams::to_json() const {
  return json{{"standoff", standoff},
              {"z_min", z_min},
              {"z_max", z_max},
              {"vertical_interval", vertical_interval},
              {"points_per_ring", points_per_ring},
              {"direction", direction == RingDirection::Ccw ? "ccw" : "cw"}};
}

SpiralParams SpiralParams::from_json(const json& j) {
  SpiralParams p;
  p.standoff = json_get_or(j, "standoff", p.standoff);
  p.z_min = json_get_or(j, "z_min", p.z_min);
  p.z_max = json_get_or(j, "z_max", p.z_max);
  p.vertical_interval = json_get_or(j, "vertical_interval", p.vertical_interval);
  p.points_per_ring = json_get_or(j, "points_per_ring", p.points_per_ring);
  const auto dir = json_get_or<std::string>(j, "direction", "ccw");
  if (dir == "ccw") p.direction = RingDirection::Ccw;
  else if (dir == "cw") p.direction = RingDirection::Cw;
  else throw Error(ErrorCode::InvalidInput, "spiral direction must be 'ccw' or 'cw'");
  return p;
}

RingGeometry ring_geometry(const WorldModel& world) {
  const auto& boxes = world.target();
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  for (const Aabb& b : boxes) {
    x0 = std::min(x0, b.min_corner.x());
    y0 = std::min(y0, b.min_corner.y());
    x1 = std::max(x1, b.max_corner.x());
    y1 = std::max(y1, b.max_corner.y());
  }
  RingGeometry g;
  g.center_x = 0.5 * (x0 + x1);
  g.center_y = 0.5 * (y0 + y1);
  for (const Aabb& b : boxes) {
    for (double x : {b.min_corner.x(), b.max_corner.x()})
      for (double y : {b.min_corner.y(), b.max_corner.y()})
        g.footprint_radius = std::max(g.footprint_radius, std::hypot(x - g.center_x, y - g.center_y));
  }
  return g;
}

int spiral_ring_count(const SpiralParams& params) {
  const double q = (params.z_max - params.z_min) / params.vertical_interval;
  return static_cast<int>(std::floor(q * (1.0 + 1e-9) + 1e-12)) + 1;
}

InspectionPath generate_spiral(const WorldModel& world, const SpiralParams& params) {
  if (world.target().empty()) throw Error(ErrorCode::InvalidInput, "spiral: target is empty");
  if (!(params.standoff > 0.0)) throw Error(ErrorCode::InvalidInput, "spiral: standoff must be > 0");
  if (!(params.vertical_interval > 0.0))
    throw Error(ErrorCode::InvalidInput, "spiral: vertical_interval must be > 0");
  if (params.points_per_ring < 4) throw Error(ErrorCode::InvalidInput, "spiral: points_per_ring must be >= 4");
  if (!(params.z_min <= params.z_max)) throw Error(ErrorCode::InvalidInput, "spiral: z_min exceeds z_max");
  if (params.standoff < world.safety_margin())
    throw Error(ErrorCode::InfeasibleStandoff, "spiral: standoff " + std::to_string(params.standoff) +
                                                   " is below the safety margin " +
                                                   std::to_string(world.safety_margin()));

  const RingGeometry g = ring_geometry(world);
  const double radius = g.footprint_radius + params.standoff;
  const Vec3 axis_point(g.center_x, g.center_y, 0.0);
  const int rings = spiral_ring_count(params);
  const int n = params.points_per_ring;
  const double sign = params.direction == RingDirection::Ccw ? 1.0 : -1.0;
  const double step = 2.0 * std::numbers::pi / n;

  InspectionPath path;
  path.planner_name = "spiral";
  path.waypoints.reserve(static_cast<std::size_t>(rings * n));
  for (int r = 0; r < rings; ++r) {
    const double z = params.z_min + r * params.vertical_interval;
    for (int i = 0; i < n; ++i) {
      const double theta = sign * step * i;
      const Vec3 p(g.center_x + radius * std::cos(theta), g.center_y + radius * std::sin(theta), z);
      const Vec3 look(axis_point.x(), axis_point.y(), z);
      const Waypoint4D w = Waypoint4D::at(p, yaw_towards(p, look));
      if (!world.point_clear(p))
        throw Error(ErrorCode::InfeasibleStandoff,
                    "spiral: ring " + std::to_string(r) + " point " + std::to_string(i) +
                        " violates the safety margin or bounds");
      if (!path.waypoints.empty() && !world.segment_clear(path.waypoints.back().position(), p))
        throw Error(ErrorCode::InfeasibleStandoff,
                    "spiral: segment into ring " + std::to_string(r) + " point " + std::to_string(i) +
                        " collides");
      path.waypoints.push_back(w);
    }
  }
  // Scored against the default viewing constraints; the spiral does not aim
  // at facets, so this is what it happens to see.
  const ViewpointParams view;
  path.coverage = path_coverage(path, subdivide_faces(world, view.facet_size), world, view);
  return path;
}

}  // namespace inspecsim
