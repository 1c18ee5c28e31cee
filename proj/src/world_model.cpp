#include "inspecsim/world_model.hpp"

#include <algorithm>
#include <set>

namespace inspecsim {

json aabb_to_json(const Aabb& box) {
  return json{{"min", vec3_to_json(box.min_corner)}, {"max", vec3_to_json(box.max_corner)}};
}

Aabb aabb_from_json(const json& j) {
  if (!j.is_object() || !j.contains("min") || !j.contains("max"))
    throw Error(ErrorCode::InvalidInput, "box requires 'min' and 'max'");
  return Aabb{vec3_from_json(j.at("min"), "min"), vec3_from_json(j.at("max"), "max")};
}

WorldModel::WorldModel(std::vector<Aabb> target, std::vector<Anchor> anchors, Aabb bounds,
                       double safety_margin)
    : target_(std::move(target)),
      anchors_(std::move(anchors)),
      bounds_(bounds),
      safety_margin_(safety_margin) {
  if (!bounds_.valid()) throw Error(ErrorCode::InvalidInput, "bounds: min exceeds max");
  if (!(safety_margin_ >= 0.0)) throw Error(ErrorCode::InvalidInput, "safety_margin must be >= 0");
  for (std::size_t i = 0; i < target_.size(); ++i) {
    const Aabb& box = target_[i];
    if (!box.valid())
      throw Error(ErrorCode::InvalidInput, "target[" + std::to_string(i) + "]: min exceeds max");
    if (!bounds_.contains(box))
      throw Error(ErrorCode::InvalidInput, "target[" + std::to_string(i) + "] lies outside bounds");
    soa_.push_back(box.min_corner.data(), box.max_corner.data());
  }
  if (anchors_.size() < 4)
    throw Error(ErrorCode::InvalidInput, "at least 4 anchors are required for 3D positioning");
  std::set<int> ids;
  for (const Anchor& a : anchors_) {
    if (!ids.insert(a.id).second)
      throw Error(ErrorCode::InvalidInput, "duplicate anchor id " + std::to_string(a.id));
  }
}

std::vector<Anchor> WorldModel::corner_anchors(const Aabb& bounds) {
  std::vector<Anchor> out;
  for (int i = 0; i < 8; ++i) {
    Vec3 p((i & 1) ? bounds.max_corner.x() : bounds.min_corner.x(),
           (i & 2) ? bounds.max_corner.y() : bounds.min_corner.y(),
           (i & 4) ? bounds.max_corner.z() : bounds.min_corner.z());
    out.push_back(Anchor{i, p});
  }
  return out;
}

WorldModel WorldModel::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "world: expected an object");
  if (!j.contains("bounds")) throw Error(ErrorCode::InvalidInput, "world: missing 'bounds'");
  const Aabb bounds = aabb_from_json(j.at("bounds"));

  std::vector<Aabb> target;
  if (j.contains("target")) {
    if (!j.at("target").is_array()) throw Error(ErrorCode::InvalidInput, "world: 'target' must be an array");
    for (const auto& b : j.at("target")) target.push_back(aabb_from_json(b));
  }

  std::vector<Anchor> anchors;
  if (j.contains("anchors")) {
    if (!j.at("anchors").is_array()) throw Error(ErrorCode::InvalidInput, "world: 'anchors' must be an array");
    for (const auto& a : j.at("anchors")) {
      if (!a.contains("id") || !a.contains("pos") || !a.at("id").is_number_integer())
        throw Error(ErrorCode::InvalidInput, "anchor requires integer 'id' and 'pos'");
      anchors.push_back(Anchor{a.at("id").get<int>(), vec3_from_json(a.at("pos"), "pos")});
    }
  } else {
    anchors = corner_anchors(bounds);
  }

  const double margin = json_get_or(j, "safety_margin", kDefaultSafetyMargin);
  return WorldModel(std::move(target), std::move(anchors), bounds, margin);
}

WorldModel WorldModel::load(const std::string& path) { return from_json(read_json_file(path)); }

json WorldModel::to_json() const {
  json j;
  j["bounds"] = aabb_to_json(bounds_);
  j["target"] = json::array();
  for (const Aabb& b : target_) j["target"].push_back(aabb_to_json(b));
  j["anchors"] = json::array();
  for (const Anchor& a : anchors_) j["anchors"].push_back({{"id", a.id}, {"pos", vec3_to_json(a.position)}});
  j["safety_margin"] = safety_margin_;
  return j;
}

bool WorldModel::point_in_inflated_target(const Vec3& p, double margin) const {
  if (target_.empty()) return false;
  std::vector<std::uint8_t> hit(soa_.padded_size());
  return kernels::point_hits(soa_, p.data(), margin, hit) > 0;
}

bool WorldModel::segment_hits_target(const Vec3& a, const Vec3& b, double margin) const {
  if (target_.empty()) return false;
  std::vector<std::uint8_t> hit(soa_.padded_size());
  return kernels::segment_hits(soa_, a.data(), b.data(), margin, hit) > 0;
}

std::vector<std::size_t> WorldModel::boxes_hit_by_segment(const Vec3& a, const Vec3& b,
                                                          double margin) const {
  std::vector<std::size_t> out;
  if (target_.empty()) return out;
  std::vector<std::uint8_t> hit(soa_.padded_size());
  kernels::segment_hits(soa_, a.data(), b.data(), margin, hit);
  for (std::size_t i = 0; i < target_.size(); ++i)
    if (hit[i]) out.push_back(i);
  return out;
}

bool WorldModel::ray_visibility(const Vec3& viewpoint, const Vec3& surface_point) const {
  return !segment_hits_target(viewpoint, surface_point, -kFaceEpsilon);
}

}  // namespace inspecsim
