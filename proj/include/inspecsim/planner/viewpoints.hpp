#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "inspecsim/planner/path.hpp"
#include "inspecsim/random.hpp"

namespace inspecsim {

/// Square-ish cell of an exposed target face.
struct Facet {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  // outward, unit length
  double area = 0.0;
  std::size_t box = 0;
};

struct ViewpointParams {
  double d_min = 0.4;
  double d_max = 1.2;
  double max_incidence = 60.0 * 3.14159265358979323846 / 180.0;
  int samples_per_facet = 200;
  double facet_size = 0.5;
  int resample_rounds = 8;
  std::uint64_t rng_seed = 1;

  /// Throws InvalidInput unless 0 < d_min <= d_max, 0 < max_incidence < pi/2,
  /// samples_per_facet >= 1, facet_size > 0, resample_rounds >= 0.
  void validate() const;

  json to_json() const;
  static ViewpointParams from_json(const json& j);
};

/// Tiles every exposed face of every target box into cells of side <= pitch.
/// A cell is exposed when a point just outside its center is not inside any
/// other box; faces shared between abutting boxes therefore drop out.
std::vector<Facet> subdivide_faces(const WorldModel& world, double pitch);

/// Random source for facet `facet_index` in resampling round `round`.
Rng facet_rng(std::uint64_t seed, std::size_t facet_index, std::size_t round);

/// Draws up to samples_per_facet candidates uniformly from the cone of
/// half-angle max_incidence around the facet normal, at a distance uniform in
/// [d_min, d_max], and returns the first that is visible, clear and in bounds.
/// The waypoint yaws toward the facet center. Accepts max_incidence = 0, in
/// which case the viewing ray is the normal itself.
std::optional<Waypoint4D> sample_viewpoint(const Facet& facet, const WorldModel& world,
                                           const ViewpointParams& params, Rng& rng);

/// True iff `w` sees `facet` within the distance band and incidence limit,
/// with a clear line of sight, outside the safety margin and in bounds.
bool viewpoint_satisfies(const Vec3& w, const Facet& facet, const WorldModel& world,
                         const ViewpointParams& params);

/// Fraction of facets seen (per viewpoint_satisfies) by at least one waypoint.
double path_coverage(const InspectionPath& path, std::span<const Facet> facets,
                     const WorldModel& world, const ViewpointParams& params);

}  // namespace inspecsim
