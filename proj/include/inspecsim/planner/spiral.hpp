#pragma once

#include "inspecsim/planner/path.hpp"

namespace inspecsim {

enum class RingDirection { Ccw, Cw };

struct SpiralParams {
  double standoff = 0.5;
  double z_min = 0.25;
  double z_max = 1.0;
  double vertical_interval = 0.25;
  int points_per_ring = 8;
  RingDirection direction = RingDirection::Ccw;

  json to_json() const;
  static SpiralParams from_json(const json& j);
};

/// Horizontal circle the rings are drawn on: centered on the centroid of the
/// target footprint (x/y bounding rectangle), radius = largest distance from
/// that centroid to a box footprint corner, plus standoff.
struct RingGeometry {
  double center_x = 0.0;
  double center_y = 0.0;
  double footprint_radius = 0.0;
};

RingGeometry ring_geometry(const WorldModel& world);

/// floor((z_max - z_min) / dz) + 1, tolerant of representation error in the
/// quotient (1e-9 relative).
int spiral_ring_count(const SpiralParams& params);

/// Stacked rings around the target, one regular polygon per level, joined in
/// spiral order. Every waypoint yaws toward the vertical axis through the
/// footprint centroid. Coverage is scored with the default ViewpointParams.
///
/// Throws InfeasibleStandoff when a ring point or connecting segment
/// violates the safety margin or leaves the flight bounds (including the
/// case standoff < safety_margin), InvalidInput on malformed parameters.
InspectionPath generate_spiral(const WorldModel& world, const SpiralParams& params);

}  // namespace inspecsim
