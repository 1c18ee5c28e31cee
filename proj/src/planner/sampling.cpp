#include "inspecsim/planner/sampling.hpp"

#include <algorithm>

namespace inspecsim {

std::vector<Waypoint4D> route_detour(const Waypoint4D& a, const Waypoint4D& b, const WorldModel& world) {
  const Vec3 pa = a.position();
  const Vec3 pb = b.position();
  if (pa == pb) return {a};
  if (world.segment_clear(pa, pb)) return {a, b};

  const double margin = world.safety_margin();
  const auto& boxes = world.target();
  double z_clear = std::max(pa.z(), pb.z());
  for (std::size_t i : world.boxes_hit_by_segment(pa, pb, margin))
    z_clear = std::max(z_clear, boxes[i].max_corner.z() + margin);

  for (std::size_t attempt = 0; attempt <= boxes.size(); ++attempt) {
    if (z_clear > world.bounds().max_corner.z())
      throw Error(ErrorCode::NoRouteFound, "detour: clearance altitude " + std::to_string(z_clear) +
                                               " exceeds the flight bounds");
    const Vec3 up(pa.x(), pa.y(), z_clear);
    const Vec3 over(pb.x(), pb.y(), z_clear);
    double raised = z_clear;
    for (auto [p, q] : {std::pair{pa, up}, std::pair{up, over}, std::pair{over, pb}}) {
      for (std::size_t i : world.boxes_hit_by_segment(p, q, margin))
        raised = std::max(raised, boxes[i].max_corner.z() + margin);
    }
    if (raised == z_clear) {
      bool blocked = false;
      for (auto [p, q] : {std::pair{pa, up}, std::pair{up, over}, std::pair{over, pb}})
        blocked = blocked || !world.segment_clear(p, q);
      if (blocked) break;
      std::vector<Waypoint4D> out{a};
      if (up != pa) out.push_back(Waypoint4D::at(up, a.yaw));
      if (over != up) out.push_back(Waypoint4D::at(over, b.yaw));
      if (pb != over) out.push_back(b);
      return out;
    }
    z_clear = raised;
  }
  throw Error(ErrorCode::NoRouteFound, "detour: no vertical detour clears the target");
}

double routed_distance(const Waypoint4D& a, const Waypoint4D& b, const WorldModel& world) {
  const auto legs = route_detour(a, b, world);
  double total = 0.0;
  for (std::size_t i = 1; i < legs.size(); ++i) total += (legs[i].position() - legs[i - 1].position()).norm();
  return total;
}

namespace {

double routed_tour_length(const std::vector<Waypoint4D>& vps, const WorldModel& world) {
  double total = 0.0;
  for (std::size_t i = 1; i < vps.size(); ++i) total += routed_distance(vps[i - 1], vps[i], world);
  return total;
}

// Routed length of the legs touching position k when it holds `w`.
double adjacent_cost(const std::vector<Waypoint4D>& vps, std::size_t k, const Waypoint4D& w,
                     const WorldModel& world) {
  double c = 0.0;
  if (k > 0) c += routed_distance(vps[k - 1], w, world);
  if (k + 1 < vps.size()) c += routed_distance(w, vps[k + 1], world);
  return c;
}

}  // namespace

SamplingResult plan_sampling(const WorldModel& world, const ViewpointParams& params) {
  params.validate();
  const std::vector<Facet> facets = subdivide_faces(world, params.facet_size);

  std::vector<Waypoint4D> found;
  std::vector<std::size_t> found_facets;
  for (std::size_t i = 0; i < facets.size(); ++i) {
    Rng rng = facet_rng(params.rng_seed, i, 0);
    if (auto vp = sample_viewpoint(facets[i], world, params, rng)) {
      found.push_back(*vp);
      found_facets.push_back(i);
    }
  }
  if (found.empty()) throw Error(ErrorCode::EmptyPlan, "sampling: no facet admits a feasible viewpoint");

  SamplingResult result;
  result.facet_count = facets.size();
  for (std::size_t idx : plan_tour(found, world)) {
    result.viewpoints.push_back(found[idx]);
    result.viewpoint_facets.push_back(found_facets[idx]);
  }
  auto& vps = result.viewpoints;
  result.objective_history.push_back(routed_tour_length(vps, world));

  constexpr double kMinGain = 1e-12;
  for (int round = 1; round <= params.resample_rounds; ++round) {
    for (std::size_t k = 0; k < vps.size(); ++k) {
      const std::size_t f = result.viewpoint_facets[k];
      Rng rng = facet_rng(params.rng_seed, f, static_cast<std::size_t>(round));
      const auto candidate = sample_viewpoint(facets[f], world, params, rng);
      if (!candidate) continue;
      try {
        const double before = adjacent_cost(vps, k, vps[k], world);
        const double after = adjacent_cost(vps, k, *candidate, world);
        if (after < before - kMinGain) vps[k] = *candidate;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoRouteFound) throw;
      }
    }
    result.objective_history.push_back(routed_tour_length(vps, world));
  }

  InspectionPath& path = result.path;
  path.planner_name = "sampling";
  path.coverage = static_cast<double>(vps.size()) / static_cast<double>(facets.size());
  path.waypoints.push_back(vps.front());
  for (std::size_t k = 1; k < vps.size(); ++k) {
    const auto legs = route_detour(vps[k - 1], vps[k], world);
    path.waypoints.insert(path.waypoints.end(), legs.begin() + 1, legs.end());
  }
  return result;
}

InspectionPath generate_sampling_path(const WorldModel& world, const ViewpointParams& params) {
  return plan_sampling(world, params).path;
}

}  // namespace inspecsim
