#include "inspecsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "inspecsim/telemetry.hpp"

namespace inspecsim {

namespace {

constexpr double kTimeTolerance = 1e-9;

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_stem(const std::string& report_path) {
  const std::string suffix = ".json";
  if (report_path.size() > suffix.size() &&
      report_path.compare(report_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return report_path.substr(0, report_path.size() - suffix.size());
  return report_path;
}

}  // namespace

void FlightLog::validate() const {
  if (records.size() < 2) return;
  const double dt = records[1].time - records[0].time;
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidInput, "flight log: timestamps must strictly increase");
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double step = records[i].time - records[i - 1].time;
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidInput, "flight log: timestamps must strictly increase");
    if (std::abs(step - dt) > kTimeTolerance)
      throw Error(ErrorCode::InvalidInput, "flight log: non-constant dt at record " + std::to_string(i));
  }
}

std::string FlightLog::to_ndjson() const {
  std::string out;
  for (const auto& r : records) {
    out += record_to_log_line(r);
    out += '\n';
  }
  return out;
}

FlightLog FlightLog::from_ndjson(const std::string& text) {
  FlightLog log;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    log.records.push_back(record_from_log_line(line));
  }
  log.validate();
  return log;
}

FlightLog FlightLog::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open log '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_ndjson(ss.str());
}

void FlightLog::save(const std::string& path) const { write_text_file(path, to_ndjson()); }

Vec3 reference_position(double t, const FlightLog& log) {
  if (log.empty() || !(t >= log.records.front().time) || !(t <= log.records.back().time))
    throw Error(ErrorCode::OutOfRange, "reference_position: t outside log span");
  const auto it = std::upper_bound(log.records.begin(), log.records.end(), t,
                                   [](double v, const TelemetryRecord& r) { return v < r.time; });
  return std::prev(it)->setpoint.position();
}

json TrackingReport::to_json() const {
  return json{{"mae_x", round_sig9(mae_x)},
              {"mae_y", round_sig9(mae_y)},
              {"mae_z", round_sig9(mae_z)},
              {"mae_xy", round_sig9(mae_xy)},
              {"max_err", {{"x", round_sig9(max_err_x)}, {"y", round_sig9(max_err_y)}, {"z", round_sig9(max_err_z)}}},
              {"mission_complete", mission_complete},
              {"waypoints_visited", waypoints_visited},
              {"total_waypoints", total_waypoints},
              {"flight_time", round_sig9(flight_time)},
              {"samples", samples},
              {"settle_skip", round_sig9(settle_skip)}};
}

std::string TrackingReport::dump() const { return to_json().dump(2) + "\n"; }

TrackingReport compute_report(const FlightLog& log, double settle_skip) {
  if (!(settle_skip >= 0.0)) throw Error(ErrorCode::InvalidInput, "settle_skip must be >= 0");
  TrackingReport rep;
  rep.settle_skip = settle_skip;

  double sum[3] = {0, 0, 0};
  double sum_xy = 0.0;
  double last_advance = -INFINITY;
  std::size_t prev_index = log.empty() ? 0 : log.records.front().active_index;
  const TelemetryRecord* first_active = nullptr;
  const TelemetryRecord* last_active = nullptr;

  for (const auto& r : log.records) {
    if (r.active_index != prev_index) {
      if (r.active_index > prev_index) rep.waypoints_visited += r.active_index - prev_index;
      last_advance = r.time;
      prev_index = r.active_index;
    }
    rep.total_waypoints = std::max(rep.total_waypoints, r.total_waypoints);
    if (r.mode == MissionMode::Complete) rep.mission_complete = true;
    if (r.mode != MissionMode::Idle) {
      if (!first_active) first_active = &r;
      last_active = &r;
    }
    if (r.mode != MissionMode::Autonomous) continue;
    if (r.time - last_advance < settle_skip) continue;

    const Vec3 d = r.true_pos - r.setpoint.position();
    double* mx[3] = {&rep.max_err_x, &rep.max_err_y, &rep.max_err_z};
    for (int k = 0; k < 3; ++k) {
      sum[k] += std::abs(d[k]);
      *mx[k] = std::max(*mx[k], std::abs(d[k]));
    }
    sum_xy += std::hypot(d.x(), d.y());
    ++rep.samples;
  }
  if (rep.samples == 0) throw Error(ErrorCode::NoAutonomousSegment, "log has no Autonomous samples to score");

  const double n = static_cast<double>(rep.samples);
  rep.mae_x = sum[0] / n;
  rep.mae_y = sum[1] / n;
  rep.mae_z = sum[2] / n;
  rep.mae_xy = sum_xy / n;
  if (first_active) rep.flight_time = last_active->time - first_active->time;
  return rep;
}

std::string axis_csv(const FlightLog& log, int axis) {
  if (axis < 0 || axis > 2) throw Error(ErrorCode::InvalidInput, "axis must be 0, 1 or 2");
  std::string out = "time,ref,true,est\n";
  for (const auto& r : log.records) {
    out += fmt9(r.time) + ',' + fmt9(r.setpoint.position()[axis]) + ',' + fmt9(r.true_pos[axis]) + ',' +
           fmt9(r.est_pos[axis]) + '\n';
  }
  return out;
}

AxisSeries parse_axis_csv(const std::string& text) {
  AxisSeries s;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "time,ref,true,est")
    throw Error(ErrorCode::InvalidInput, "axis csv: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double v[4];
    std::size_t pos = 0;
    for (int k = 0; k < 4; ++k) {
      const std::size_t end = line.find(',', pos);
      const std::string field = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      char* stop = nullptr;
      v[k] = std::strtod(field.c_str(), &stop);
      if (field.empty() || *stop != '\0') throw Error(ErrorCode::InvalidInput, "axis csv: bad number '" + field + "'");
      if ((end == std::string::npos) != (k == 3)) throw Error(ErrorCode::InvalidInput, "axis csv: expected 4 columns");
      pos = end + 1;
    }
    s.time.push_back(v[0]);
    s.ref.push_back(v[1]);
    s.truth.push_back(v[2]);
    s.est.push_back(v[3]);
  }
  return s;
}

std::vector<std::string> export_report(const TrackingReport& report, const FlightLog& log,
                                       const std::string& report_path) {
  std::vector<std::string> written;
  write_text_file(report_path, report.dump());
  written.push_back(report_path);
  const std::string stem = csv_stem(report_path);
  const char* names[3] = {"_x.csv", "_y.csv", "_z.csv"};
  for (int k = 0; k < 3; ++k) {
    const std::string p = stem + names[k];
    write_text_file(p, axis_csv(log, k));
    written.push_back(p);
  }
  return written;
}

}  // namespace inspecsim
