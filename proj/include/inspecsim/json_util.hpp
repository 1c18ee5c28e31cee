#pragma once

#include <Eigen/Core>
#include <json.hpp>

#include <string>

#include "inspecsim/error.hpp"

namespace inspecsim {

using Vec3 = Eigen::Vector3d;
using json = nlohmann::json;

/// Rounds to 9 significant decimal digits. Logs and CSV exports carry values
/// at this precision so that re-serialization is bit-exact.
double round_sig9(double value);

json vec3_to_json(const Vec3& v);
Vec3 vec3_from_json(const json& j, const char* what);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

template <typename T>
T json_get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace inspecsim
