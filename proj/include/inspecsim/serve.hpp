#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

#include "inspecsim/scenario.hpp"

namespace inspecsim {

struct ServeOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  /// Wall-clock pacing multiplier; 0 runs unpaced.
  double speed = 1.0;
  double frame_rate_hz = 20.0;
  /// Per-client cap on queued telemetry frames; further frames are dropped
  /// for that client. Replies are never dropped.
  std::size_t max_pending_frames = 64;
};

/// Scene description sent once to every client on connect:
///   {"scene":{"bounds":{...},"target":[{...}],"path":[{x,y,z,yaw}...]}}
json scene_message(const WorldModel& world, const InspectionPath& flight_path);

/// Live simulation behind a WebSocket endpoint. One thread owns the mission
/// and ticks it at fixed dt; one thread runs the network. They exchange
/// commands and outgoing messages through queues only.
class SimServer {
 public:
  SimServer(Scenario scenario, ServeOptions options);
  ~SimServer();
  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;

  /// Binds, starts both threads, returns the bound port.
  unsigned short start();
  void stop();

  std::uint64_t ticks() const;
  std::size_t client_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace inspecsim
