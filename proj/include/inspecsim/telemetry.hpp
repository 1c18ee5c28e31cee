#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "inspecsim/mission.hpp"

namespace inspecsim {

/// One NDJSON flight-log line. Numbers carry 9 significant digits.
///
///   {"t":..,"mode":"..","wp":i,"wp_total":n,"dwell":..,
///    "true":{"pos":[..],"vel":[..],"yaw":..},"est":{"pos":[..],"vel":[..]},
///    "sp":[x,y,z,yaw],"acc":[..]}
std::string record_to_log_line(const TelemetryRecord& rec);
TelemetryRecord record_from_log_line(const std::string& line);

/// Live wire frame, exact schema:
///   {"t":f,"true":[x,y,z],"est":[x,y,z],"yaw":f,"mode":"...","wp":i,"wp_total":i,"dwell":f}
struct TelemetryFrame {
  double t = 0.0;
  Vec3 true_pos = Vec3::Zero();
  Vec3 est_pos = Vec3::Zero();
  double yaw = 0.0;
  std::string mode;
  std::int64_t wp = 0;
  std::int64_t wp_total = 0;
  double dwell = 0.0;

  static TelemetryFrame from_record(const TelemetryRecord& rec);
  json to_json() const;
  static TelemetryFrame from_json(const json& j);
  friend bool operator==(const TelemetryFrame&, const TelemetryFrame&) = default;
};

/// Client command: {"cmd":"take_off"|"land"|"start_auto"|"pause"|"resume"|"estop","id":n}
struct CommandMessage {
  OperatorCommand command = OperatorCommand::TakeOff;
  std::int64_t request_id = 0;

  json to_json() const;
  friend bool operator==(const CommandMessage&, const CommandMessage&) = default;
};

/// Reply: {"id":n,"ok":bool,"reason":"..."}
struct CommandReply {
  std::int64_t request_id = 0;
  bool ok = false;
  std::string reason;

  json to_json() const;
  static CommandReply from_json(const json& j);
  friend bool operator==(const CommandReply&, const CommandReply&) = default;
};

/// Parses a client text message. On failure returns the nack to send back;
/// the id is echoed when it could be read, else -1.
std::variant<CommandMessage, CommandReply> parse_command_message(const std::string& text);

}  // namespace inspecsim
