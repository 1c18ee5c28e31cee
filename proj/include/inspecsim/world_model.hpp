#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "inspecsim/json_util.hpp"
#include "inspecsim/kernels/kernels.hpp"

namespace inspecsim {

struct Aabb {
  Vec3 min_corner = Vec3::Zero();
  Vec3 max_corner = Vec3::Zero();

  Vec3 center() const { return 0.5 * (min_corner + max_corner); }
  Vec3 extent() const { return max_corner - min_corner; }
  bool valid() const { return (min_corner.array() <= max_corner.array()).all(); }
  /// Closed containment.
  bool contains(const Vec3& p) const {
    return (p.array() >= min_corner.array()).all() && (p.array() <= max_corner.array()).all();
  }
  bool contains(const Aabb& other) const {
    return contains(other.min_corner) && contains(other.max_corner);
  }
};

struct Anchor {
  int id = 0;
  Vec3 position = Vec3::Zero();
};

/// Static scene: inspection target boxes, UWB anchors and the flight volume.
///
/// Obstacles are open sets. A point exactly `margin` away from a box face is
/// clear; a segment that only touches an inflated face is clear. Inflation is
/// the Minkowski sum with an axis-aligned cube of half-side `margin`.
///
/// Immutable after construction.
class WorldModel {
 public:
  static constexpr double kDefaultSafetyMargin = 0.20;
  static constexpr double kFaceEpsilon = 1e-9;

  /// Throws Error(InvalidInput) if an invariant is violated.
  WorldModel(std::vector<Aabb> target, std::vector<Anchor> anchors, Aabb bounds,
             double safety_margin = kDefaultSafetyMargin);

  static WorldModel from_json(const json& j);
  static WorldModel load(const std::string& path);
  json to_json() const;

  const std::vector<Aabb>& target() const { return target_; }
  const std::vector<Anchor>& anchors() const { return anchors_; }
  const Aabb& bounds() const { return bounds_; }
  double safety_margin() const { return safety_margin_; }
  const kernels::BoxSoA& target_soa() const { return soa_; }

  bool point_in_inflated_target(const Vec3& p, double margin) const;
  bool segment_hits_target(const Vec3& a, const Vec3& b, double margin) const;
  /// Indices of target boxes whose inflated interior the closed segment meets.
  std::vector<std::size_t> boxes_hit_by_segment(const Vec3& a, const Vec3& b, double margin) const;

  /// True iff the open segment viewpoint-surface_point stays out of every
  /// box interior. Boxes are shrunk by kFaceEpsilon so grazing the owning
  /// face does not count as occlusion.
  bool ray_visibility(const Vec3& viewpoint, const Vec3& surface_point) const;

  bool inside_bounds(const Vec3& p) const { return bounds_.contains(p); }

  /// Inside bounds and outside the target inflated by safety_margin.
  bool point_clear(const Vec3& p) const {
    return inside_bounds(p) && !point_in_inflated_target(p, safety_margin_);
  }
  bool segment_clear(const Vec3& a, const Vec3& b) const {
    return !segment_hits_target(a, b, safety_margin_);
  }

  /// Eight anchors at the corners of `bounds`, ids 0..7.
  static std::vector<Anchor> corner_anchors(const Aabb& bounds);

 private:
  std::vector<Aabb> target_;
  std::vector<Anchor> anchors_;
  Aabb bounds_;
  double safety_margin_;
  kernels::BoxSoA soa_;
};

json aabb_to_json(const Aabb& box);
Aabb aabb_from_json(const json& j);

}  // namespace inspecsim
