#include "inspecsim/telemetry.hpp"

namespace inspecsim {

namespace {

json v3(const Vec3& v) { return json::array({round_sig9(v.x()), round_sig9(v.y()), round_sig9(v.z())}); }

double num(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw Error(ErrorCode::InvalidInput, std::string("log record: missing numeric '") + key + "'");
  return j.at(key).get<double>();
}

std::size_t count(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_unsigned())
    throw Error(ErrorCode::InvalidInput, std::string("log record: missing count '") + key + "'");
  return j.at(key).get<std::size_t>();
}

const json& object(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_object())
    throw Error(ErrorCode::InvalidInput, std::string("log record: missing object '") + key + "'");
  return j.at(key);
}

}  // namespace

std::string record_to_log_line(const TelemetryRecord& rec) {
  json j;
  j["t"] = round_sig9(rec.time);
  j["mode"] = to_string(rec.mode);
  j["wp"] = rec.active_index;
  j["wp_total"] = rec.total_waypoints;
  j["dwell"] = round_sig9(rec.dwell_elapsed);
  j["true"] = {{"pos", v3(rec.true_pos)}, {"vel", v3(rec.true_vel)}, {"yaw", round_sig9(rec.yaw)}};
  j["est"] = {{"pos", v3(rec.est_pos)}, {"vel", v3(rec.est_vel)}};
  j["sp"] = json::array({round_sig9(rec.setpoint.x), round_sig9(rec.setpoint.y), round_sig9(rec.setpoint.z),
                         round_sig9(rec.setpoint.yaw)});
  j["acc"] = v3(rec.accel_cmd);
  return j.dump();
}

TelemetryRecord record_from_log_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, std::string("log record: ") + e.what());
  }
  TelemetryRecord rec;
  rec.time = num(j, "t");
  const std::string mode = j.value("mode", "");
  const auto m = parse_mode(mode);
  if (!m) throw Error(ErrorCode::InvalidInput, "log record: unknown mode '" + mode + "'");
  rec.mode = *m;
  rec.active_index = count(j, "wp");
  rec.total_waypoints = count(j, "wp_total");
  rec.dwell_elapsed = num(j, "dwell");
  const json& tr = object(j, "true");
  rec.true_pos = vec3_from_json(tr.at("pos"), "true.pos");
  rec.true_vel = vec3_from_json(tr.at("vel"), "true.vel");
  rec.yaw = num(tr, "yaw");
  const json& est = object(j, "est");
  rec.est_pos = vec3_from_json(est.at("pos"), "est.pos");
  rec.est_vel = vec3_from_json(est.at("vel"), "est.vel");
  const json& sp = j.at("sp");
  if (!sp.is_array() || sp.size() != 4) throw Error(ErrorCode::InvalidInput, "log record: 'sp' must be [x,y,z,yaw]");
  rec.setpoint = Waypoint4D{sp[0].get<double>(), sp[1].get<double>(), sp[2].get<double>(), sp[3].get<double>()};
  rec.accel_cmd = vec3_from_json(j.at("acc"), "acc");
  return rec;
}

TelemetryFrame TelemetryFrame::from_record(const TelemetryRecord& rec) {
  TelemetryFrame f;
  f.t = round_sig9(rec.time);
  f.true_pos = Vec3(round_sig9(rec.true_pos.x()), round_sig9(rec.true_pos.y()), round_sig9(rec.true_pos.z()));
  f.est_pos = Vec3(round_sig9(rec.est_pos.x()), round_sig9(rec.est_pos.y()), round_sig9(rec.est_pos.z()));
  f.yaw = round_sig9(rec.yaw);
  f.mode = std::string(to_string(rec.mode));
  f.wp = static_cast<std::int64_t>(rec.active_index);
  f.wp_total = static_cast<std::int64_t>(rec.total_waypoints);
  f.dwell = round_sig9(rec.dwell_elapsed);
  return f;
}

json TelemetryFrame::to_json() const {
  return json{{"t", t},       {"true", vec3_to_json(true_pos)}, {"est", vec3_to_json(est_pos)},
              {"yaw", yaw},   {"mode", mode},                   {"wp", wp},
              {"wp_total", wp_total}, {"dwell", dwell}};
}

TelemetryFrame TelemetryFrame::from_json(const json& j) {
  TelemetryFrame f;
  f.t = num(j, "t");
  f.true_pos = vec3_from_json(j.at("true"), "true");
  f.est_pos = vec3_from_json(j.at("est"), "est");
  f.yaw = num(j, "yaw");
  f.mode = j.at("mode").get<std::string>();
  f.wp = j.at("wp").get<std::int64_t>();
  f.wp_total = j.at("wp_total").get<std::int64_t>();
  f.dwell = num(j, "dwell");
  return f;
}

json CommandMessage::to_json() const { return json{{"cmd", to_string(command)}, {"id", request_id}}; }

json CommandReply::to_json() const { return json{{"id", request_id}, {"ok", ok}, {"reason", reason}}; }

CommandReply CommandReply::from_json(const json& j) {
  return CommandReply{j.at("id").get<std::int64_t>(), j.at("ok").get<bool>(), j.value("reason", "")};
}

std::variant<CommandMessage, CommandReply> parse_command_message(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    return CommandReply{-1, false, "malformed message"};
  }
  if (!j.is_object() || !j.contains("id") || !j.at("id").is_number_integer())
    return CommandReply{-1, false, "malformed message: integer 'id' required"};
  const std::int64_t id = j.at("id").get<std::int64_t>();
  if (!j.contains("cmd") || !j.at("cmd").is_string()) return CommandReply{id, false, "malformed message: 'cmd' required"};
  const auto cmd = parse_command(j.at("cmd").get<std::string>());
  if (!cmd) return CommandReply{id, false, "unknown command '" + j.at("cmd").get<std::string>() + "'"};
  return CommandMessage{*cmd, id};
}

}  // namespace inspecsim
