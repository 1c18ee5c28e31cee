#pragma once

#include <vector>

#include "inspecsim/planner/tour.hpp"
#include "inspecsim/planner/viewpoints.hpp"

namespace inspecsim {

/// Connects a to b. Returns [a, b] when the straight segment is clear, [a]
/// when a == b, otherwise lifts over the obstruction: climb vertically to
/// z_clear, traverse, descend. z_clear is the highest obstructing box top
/// plus the safety margin (never below either endpoint), raised until every
/// leg is clear. Throws NoRouteFound when z_clear leaves the flight bounds.
std::vector<Waypoint4D> route_detour(const Waypoint4D& a, const Waypoint4D& b, const WorldModel& world);

/// Length of the route_detour polyline between a and b.
double routed_distance(const Waypoint4D& a, const Waypoint4D& b, const WorldModel& world);

struct SamplingResult {
  InspectionPath path;
  /// One viewpoint per covered facet, in tour order.
  std::vector<Waypoint4D> viewpoints;
  std::vector<std::size_t> viewpoint_facets;
  std::size_t facet_count = 0;
  /// Routed tour length after the initial plan and after each resample round.
  std::vector<double> objective_history;
};

/// Sampling-based inspection planner: one viewpoint per coverable facet,
/// tour via plan_tour, then `resample_rounds` passes that replace a viewpoint
/// with a fresh draw only when it shortens the routed legs to its tour
/// neighbours. Throws EmptyPlan if no facet can be covered.
SamplingResult plan_sampling(const WorldModel& world, const ViewpointParams& params);

InspectionPath generate_sampling_path(const WorldModel& world, const ViewpointParams& params);

}  // namespace inspecsim
