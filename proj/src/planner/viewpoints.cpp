#include "inspecsim/planner/viewpoints.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace inspecsim {

void ViewpointParams::validate() const {
  if (!(d_min > 0.0 && d_min <= d_max)) throw Error(ErrorCode::InvalidInput, "viewpoint: need 0 < d_min <= d_max");
  if (!(max_incidence > 0.0 && max_incidence < std::numbers::pi / 2))
    throw Error(ErrorCode::InvalidInput, "viewpoint: need 0 < max_incidence < pi/2");
  if (samples_per_facet < 1) throw Error(ErrorCode::InvalidInput, "viewpoint: samples_per_facet must be >= 1");
  if (!(facet_size > 0.0)) throw Error(ErrorCode::InvalidInput, "viewpoint: facet_size must be > 0");
  if (resample_rounds < 0) throw Error(ErrorCode::InvalidInput, "viewpoint: resample_rounds must be >= 0");
}

json ViewpointParams::to_json() const {
  return json{{"d_min", d_min},
              {"d_max", d_max},
              {"max_incidence_deg", max_incidence / std::numbers::pi * 180.0},
              {"samples_per_facet", samples_per_facet},
              {"facet_size", facet_size},
              {"resample_rounds", resample_rounds},
              {"rng_seed", rng_seed}};
}

ViewpointParams ViewpointParams::from_json(const json& j) {
  ViewpointParams p;
  p.d_min = json_get_or(j, "d_min", p.d_min);
  p.d_max = json_get_or(j, "d_max", p.d_max);
  p.max_incidence = json_get_or(j, "max_incidence_deg", p.max_incidence / std::numbers::pi * 180.0) *
                    std::numbers::pi / 180.0;
  p.samples_per_facet = json_get_or(j, "samples_per_facet", p.samples_per_facet);
  p.facet_size = json_get_or(j, "facet_size", p.facet_size);
  p.resample_rounds = json_get_or(j, "resample_rounds", p.resample_rounds);
  p.rng_seed = json_get_or(j, "rng_seed", p.rng_seed);
  return p;
}

namespace {

int cell_count(double extent, double pitch) {
  return std::max(1, static_cast<int>(std::ceil(extent / pitch * (1.0 - 1e-12))));
}

bool inside_other_box(const WorldModel& world, std::size_t self, const Vec3& p) {
  const auto& boxes = world.target();
  for (std::size_t j = 0; j < boxes.size(); ++j) {
    if (j == self) continue;
    const Aabb& b = boxes[j];
    if ((p.array() > b.min_corner.array()).all() && (p.array() < b.max_corner.array()).all()) return true;
  }
  return false;
}

}  // namespace

std::vector<Facet> subdivide_faces(const WorldModel& world, double pitch) {
  if (!(pitch > 0.0)) throw Error(ErrorCode::InvalidInput, "subdivide_faces: pitch must be > 0");
  constexpr double kProbe = 1e-7;
  std::vector<Facet> facets;
  const auto& boxes = world.target();
  for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
    const Aabb& box = boxes[bi];
    const Vec3 ext = box.extent();
    for (int axis = 0; axis < 3; ++axis) {
      const int u = (axis + 1) % 3;
      const int v = (axis + 2) % 3;
      if (ext[u] <= 0.0 || ext[v] <= 0.0) continue;
      const int nu = cell_count(ext[u], pitch);
      const int nv = cell_count(ext[v], pitch);
      const double du = ext[u] / nu;
      const double dv = ext[v] / nv;
      for (double sign : {-1.0, 1.0}) {
        Vec3 normal = Vec3::Zero();
        normal[axis] = sign;
        const double plane = sign > 0 ? box.max_corner[axis] : box.min_corner[axis];
        for (int i = 0; i < nu; ++i) {
          for (int k = 0; k < nv; ++k) {
            Vec3 c;
            c[axis] = plane;
            c[u] = box.min_corner[u] + (i + 0.5) * du;
            c[v] = box.min_corner[v] + (k + 0.5) * dv;
            if (inside_other_box(world, bi, c + kProbe * normal)) continue;
            facets.push_back(Facet{c, normal, du * dv, bi});
          }
        }
      }
    }
  }
  return facets;
}

Rng facet_rng(std::uint64_t seed, std::size_t facet_index, std::size_t round) {
  return make_rng(seed, {0x5ace7ULL, facet_index, round});
}

bool viewpoint_satisfies(const Vec3& w, const Facet& facet, const WorldModel& world,
                         const ViewpointParams& params) {
  const Vec3 ray = w - facet.center;
  const double dist = ray.norm();
  if (dist < params.d_min - 1e-9 || dist > params.d_max + 1e-9) return false;
  if (dist <= 0.0) return false;
  if (ray.dot(facet.normal) / dist < std::cos(params.max_incidence) - 1e-12) return false;
  if (!world.point_clear(w)) return false;
  return world.ray_visibility(w, facet.center);
}

std::optional<Waypoint4D> sample_viewpoint(const Facet& facet, const WorldModel& world,
                                           const ViewpointParams& params, Rng& rng) {
  // Orthonormal frame (t1, t2, normal).
  const Vec3& n = facet.normal;
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 t1 = n.cross(helper).normalized();
  const Vec3 t2 = n.cross(t1);
  const double cos_max = std::cos(params.max_incidence);

  for (int s = 0; s < params.samples_per_facet; ++s) {
    const double cos_a = 1.0 - uniform01(rng) * (1.0 - cos_max);
    const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    const double dist = params.d_min + uniform01(rng) * (params.d_max - params.d_min);
    const Vec3 dir = cos_a * n + sin_a * (std::cos(phi) * t1 + std::sin(phi) * t2);
    const Vec3 w = facet.center + dist * dir;
    if (viewpoint_satisfies(w, facet, world, params)) return Waypoint4D::at(w, yaw_towards(w, facet.center));
  }
  return std::nullopt;
}

double path_coverage(const InspectionPath& path, std::span<const Facet> facets, const WorldModel& world,
                     const ViewpointParams& params) {
  if (facets.empty()) return 0.0;
  std::size_t seen = 0;
  for (const Facet& f : facets) {
    for (const Waypoint4D& w : path.waypoints) {
      if (viewpoint_satisfies(w.position(), f, world, params)) {
        ++seen;
        break;
      }
    }
  }
  return static_cast<double>(seen) / static_cast<double>(facets.size());
}

}  // namespace inspecsim
