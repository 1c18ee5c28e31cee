#include "inspecsim/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include "inspecsim/planner/sampling.hpp"

namespace inspecsim {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kScenarioKeys = {"name",      "world",       "path",      "waypoint_spacing",
                                             "vehicle",   "noise",       "estimator", "disturbance",
                                             "mission",   "seed",        "tick_rate_hz", "settle_skip"};
const std::set<std::string> kMissionKeys = {"takeoff_altitude", "landing_rate", "box_half_side",
                                            "dwell_required",   "start",        "max_time"};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw Error(ErrorCode::InvalidInput, where + ": unknown field '" + key + "'");
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw Error(ErrorCode::InvalidInput, std::string("scenario: '") + key + "' must be an object");
  return j.at(key);
}

std::string resolve(const std::string& base_dir, const std::string& ref) {
  const fs::path p(ref);
  return p.is_absolute() ? ref : (fs::path(base_dir) / p).string();
}

WorldModel load_world(const json& j, const std::string& base_dir) {
  if (!j.contains("world")) throw Error(ErrorCode::InvalidInput, "scenario: 'world' is required");
  const json& w = j.at("world");
  if (w.is_string()) return WorldModel::load(resolve(base_dir, w.get<std::string>()));
  if (w.is_object()) return WorldModel::from_json(w);
  throw Error(ErrorCode::InvalidInput, "scenario: 'world' must be a file name or an object");
}

InspectionPath load_path(const json& j, const WorldModel& world, const std::string& base_dir) {
  if (!j.contains("path")) throw Error(ErrorCode::InvalidInput, "scenario: 'path' is required");
  const json& p = j.at("path");
  if (p.is_string()) return InspectionPath::load(resolve(base_dir, p.get<std::string>()));
  if (p.is_object()) {
    if (p.contains("waypoints")) return InspectionPath::from_json(p);
    return plan_from_spec(world, p);
  }
  throw Error(ErrorCode::InvalidInput, "scenario: 'path' must be a file name or an object");
}

}  // namespace

InspectionPath plan_from_spec(const WorldModel& world, const json& spec) {
  const std::string kind = json_get_or<std::string>(spec, "planner", "");
  const json params = spec.contains("params") ? spec.at("params") : json::object();
  if (kind == "spiral") return generate_spiral(world, SpiralParams::from_json(params));
  if (kind == "sampling") return generate_sampling_path(world, ViewpointParams::from_json(params));
  throw Error(ErrorCode::InvalidInput, "planner must be \"spiral\" or \"sampling\", got '" + kind + "'");
}

Scenario Scenario::from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "scenario must be a JSON object");
  reject_unknown(j, kScenarioKeys, "scenario");

  WorldModel world = load_world(j, base_dir);
  InspectionPath planned = load_path(j, world, base_dir);
  if (auto problem = validate_path(planned, world))
    throw Error(ErrorCode::InvalidInput, "scenario path rejected: " + *problem);

  const double spacing = json_get_or(j, "waypoint_spacing", 0.0);
  if (!(spacing >= 0.0)) throw Error(ErrorCode::InvalidInput, "waypoint_spacing must be >= 0");
  InspectionPath flown = spacing > 0.0 ? densify(planned, spacing) : planned;

  MissionConfig config(std::move(world), std::move(flown));
  config.vehicle = VehicleParams::from_json(section(j, "vehicle"));
  if (j.contains("tick_rate_hz")) {
    const double rate = j.at("tick_rate_hz").get<double>();
    if (!(rate > 0.0)) throw Error(ErrorCode::InvalidInput, "tick_rate_hz must be > 0");
    config.vehicle.dt = 1.0 / rate;
  }
  config.noise = NoiseModel::from_json(section(j, "noise"));
  config.estimator = EstimatorParams::from_json(section(j, "estimator"));
  config.disturbance = DisturbanceParams::from_json(section(j, "disturbance"));

  const json& m = section(j, "mission");
  reject_unknown(m, kMissionKeys, "scenario.mission");
  config.takeoff_altitude = json_get_or(m, "takeoff_altitude", config.takeoff_altitude);
  config.landing_rate = json_get_or(m, "landing_rate", config.landing_rate);
  config.box_half_side = json_get_or(m, "box_half_side", config.box_half_side);
  config.dwell_required = json_get_or(m, "dwell_required", config.dwell_required);
  if (!(config.takeoff_altitude > 0.0) || !(config.landing_rate > 0.0))
    throw Error(ErrorCode::InvalidInput, "takeoff_altitude and landing_rate must be > 0");
  if (m.contains("start")) {
    const json& s = m.at("start");
    if (!s.is_array() || s.size() != 2) throw Error(ErrorCode::InvalidInput, "mission.start must be [x, y]");
    config.start = Eigen::Vector2d(s[0].get<double>(), s[1].get<double>());
  }

  Scenario sc(json_get_or<std::string>(j, "name", "scenario"), std::move(config), std::move(planned));
  sc.waypoint_spacing = spacing;
  sc.max_time = json_get_or(m, "max_time", sc.max_time);
  sc.settle_skip = json_get_or(j, "settle_skip", sc.settle_skip);
  if (!(sc.max_time > 0.0) || !(sc.settle_skip >= 0.0))
    throw Error(ErrorCode::InvalidInput, "max_time must be > 0 and settle_skip >= 0");
  if (j.contains("seed")) sc = sc.with_seed(j.at("seed").get<std::uint64_t>());
  return sc;
}

Scenario Scenario::load(const std::string& path) {
  const json j = read_json_file(path);
  const fs::path parent = fs::path(path).parent_path();
  return from_json(j, parent.empty() ? "." : parent.string());
}

Scenario Scenario::with_seed(std::uint64_t s) const {
  Scenario out = *this;
  out.seed = s;
  out.config.noise.seed = derive_seed(s, {1});
  out.config.disturbance.seed = derive_seed(s, {2});
  return out;
}

HeadlessResult run_headless(const Scenario& scenario) {
  HeadlessResult result;
  Mission mission(scenario.config);
  const auto max_ticks = static_cast<std::uint64_t>(std::ceil(scenario.max_time / scenario.config.vehicle.dt));

  mission.enqueue(OperatorCommand::TakeOff);
  bool started = false;
  bool landing = false;
  for (std::uint64_t k = 0; k < max_ticks; ++k) {
    TickResult tr = mission.tick();
    for (auto& o : tr.outcomes) result.outcomes.push_back(std::move(o));
    result.log.records.push_back(tr.record);

    const MissionMode mode = mission.mode();
    if (mode == MissionMode::EmergencyStop) break;
    if (mode == MissionMode::ManualHover && !started) {
      mission.enqueue(OperatorCommand::StartAutonomous);
      started = true;
    } else if (mode == MissionMode::Complete && !landing) {
      mission.enqueue(OperatorCommand::Land);
      landing = true;
    } else if (mode == MissionMode::Idle && landing) {
      break;
    }
  }
  result.final_mode = mission.mode();
  result.mission_complete = mission.reached_complete();
  try {
    result.report = compute_report(result.log, scenario.settle_skip);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoAutonomousSegment) throw;
  }
  return result;
}

}  // namespace inspecsim
