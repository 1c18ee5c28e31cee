#include <gtest/gtest.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "inspecsim/serve.hpp"
#include "inspecsim/telemetry.hpp"

using namespace inspecsim;
namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using namespace std::chrono_literals;

namespace {

Scenario line_scenario() {
  json wps = json::array();
  for (int i = 0; i <= 10; ++i) wps.push_back({{"x", -1.0 + 0.1 * i}, {"y", -1.0}, {"z", 0.8}, {"yaw", 0.0}});
  const json j = {{"name", "serve_line"},
                  {"world",
                   {{"bounds", {{"min", {-1.8, -1.8, 0}}, {"max", {1.8, 1.8, 2}}}},
                    {"target", {{{"min", {-0.3, -0.3, 0}}, {"max", {0.3, 0.3, 0.6}}}}}}},
                  {"path", {{"waypoints", wps}}},
                  {"waypoint_spacing", 0.05},
                  {"seed", 5}};
  return Scenario::from_json(j);
}

/// Blocking WebSocket client on its own thread. The thread alternates
/// between reading one message and flushing queued sends.
class Client {
 public:
  explicit Client(unsigned short port) : ws_(ioc_) {
    net::ip::tcp::resolver resolver(ioc_);
    net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws_.handshake("127.0.0.1", "/");
    ws_.text(true);
    thread_ = std::thread([this] { loop(); });
  }
  ~Client() { close(); }

  void send(const std::string& text) {
    std::lock_guard lock(mutex_);
    outbox_.push_back(text);
  }

  void close() {
    if (!thread_.joinable()) return;
    done_ = true;
    thread_.join();
    beast::error_code ec;
    ws_.close(websocket::close_code::normal, ec);
  }

  std::vector<json> messages() {
    std::lock_guard lock(mutex_);
    return received_;
  }

  /// Waits until pred(messages) holds.
  template <class Pred>
  bool wait_for(Pred pred, std::chrono::milliseconds timeout = 20s) {
    std::unique_lock lock(mutex_);
    return cv_.wait_for(lock, timeout, [&] { return pred(received_); });
  }

  std::vector<TelemetryFrame> frames() {
    std::vector<TelemetryFrame> out;
    for (const auto& m : messages())
      if (m.contains("t")) out.push_back(TelemetryFrame::from_json(m));
    return out;
  }

  std::vector<CommandReply> replies() {
    std::vector<CommandReply> out;
    for (const auto& m : messages())
      if (m.contains("ok")) out.push_back(CommandReply::from_json(m));
    return out;
  }

 private:
  void loop() {
    while (!done_) {
      beast::flat_buffer buf;
      beast::error_code ec;
      ws_.read(buf, ec);
      if (ec) break;
      {
        std::lock_guard lock(mutex_);
        received_.push_back(json::parse(beast::buffers_to_string(buf.data())));
      }
      cv_.notify_all();
      std::deque<std::string> out;
      {
        std::lock_guard lock(mutex_);
        out.swap(outbox_);
      }
      for (const auto& text : out) ws_.write(net::buffer(text), ec);
    }
  }

  net::io_context ioc_;
  websocket::stream<net::ip::tcp::socket> ws_;
  std::thread thread_;
  std::atomic<bool> done_{false};
  std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<json> received_;
  std::deque<std::string> outbox_;
};

ServeOptions fast() {
  ServeOptions o;
  o.port = 0;
  o.speed = 10.0;
  return o;
}

bool has_mode(const std::vector<json>& msgs, const std::string& mode) {
  for (const auto& m : msgs)
    if (m.contains("mode") && m["mode"] == mode) return true;
  return false;
}

std::size_t reply_count(const std::vector<json>& msgs) {
  std::size_t n = 0;
  for (const auto& m : msgs) n += m.contains("ok");
  return n;
}

std::vector<std::string> mode_timeline(const std::vector<TelemetryFrame>& frames) {
  std::vector<std::string> out;
  for (const auto& f : frames)
    if (out.empty() || out.back() != f.mode) out.push_back(f.mode);
  return out;
}

}  // namespace

TEST(Serve, SceneArrivesFirst) {
  const Scenario sc = line_scenario();
  SimServer server(sc, fast());
  const unsigned short port = server.start();
  Client c(port);
  ASSERT_TRUE(c.wait_for([](const auto& m) { return m.size() >= 3; }));
  const auto msgs = c.messages();
  ASSERT_TRUE(msgs[0].contains("scene"));
  EXPECT_EQ(msgs[0]["scene"]["path"].size(), Mission(sc.config).flight_path().size());
  EXPECT_TRUE(msgs[1].contains("t"));
  EXPECT_EQ(server.client_count(), 1u);
}

TEST(Serve, TakeOffThenStartAutonomous) {
  SimServer server(line_scenario(), fast());
  Client c(server.start());
  ASSERT_TRUE(c.wait_for([](const auto& m) { return has_mode(m, "idle"); }));
  c.send(CommandMessage{OperatorCommand::TakeOff, 1}.to_json().dump());
  ASSERT_TRUE(c.wait_for([](const auto& m) { return has_mode(m, "manual_hover"); }));
  c.send(CommandMessage{OperatorCommand::StartAutonomous, 2}.to_json().dump());
  ASSERT_TRUE(c.wait_for([](const auto& m) { return has_mode(m, "autonomous"); }));
  c.close();

  EXPECT_EQ(mode_timeline(c.frames()),
            (std::vector<std::string>{"idle", "taking_off", "manual_hover", "autonomous"}));
  const auto replies = c.replies();
  ASSERT_EQ(replies.size(), 2u);
  EXPECT_EQ(replies[0], (CommandReply{1, true, ""}));
  EXPECT_EQ(replies[1], (CommandReply{2, true, ""}));
}

TEST(Serve, StartAutonomousOnGroundNacked) {
  SimServer server(line_scenario(), fast());
  Client c(server.start());
  ASSERT_TRUE(c.wait_for([](const auto& m) { return has_mode(m, "idle"); }));
  c.send(R"({"cmd":"start_auto","id":41})");
  ASSERT_TRUE(c.wait_for([](const auto& m) { return reply_count(m) == 1; }));
  const CommandReply r = c.replies().front();
  EXPECT_EQ(r.request_id, 41);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.reason, "not airborne");
  for (const auto& f : c.frames()) EXPECT_EQ(f.mode, "idle");
}

TEST(Serve, RepliesKeepSendOrder) {
  SimServer server(line_scenario(), fast());
  Client c(server.start());
  ASSERT_TRUE(c.wait_for([](const auto& m) { return m.size() >= 2; }));
  const std::vector<std::string> msgs = {
      R"({"cmd":"pause","id":1})",       R"({"cmd":"take_off","id":2})", "{broken",
      R"({"cmd":"warp","id":4})",        R"({"cmd":"resume","id":5})",   R"({"cmd":"land","id":6})",
      R"({"cmd":"estop","id":7})",       R"({"id":8})"};
  for (const auto& m : msgs) c.send(m);
  ASSERT_TRUE(c.wait_for([&](const auto& m) { return reply_count(m) == msgs.size(); }));
  const auto replies = c.replies();
  const std::vector<std::int64_t> ids = {1, 2, -1, 4, 5, 6, 7, 8};
  ASSERT_EQ(replies.size(), ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) EXPECT_EQ(replies[i].request_id, ids[i]) << i;
  EXPECT_FALSE(replies[0].ok);  // pause while idle
  EXPECT_TRUE(replies[1].ok);
  EXPECT_FALSE(replies[2].ok);
  EXPECT_FALSE(replies[3].ok);
  EXPECT_NE(replies[3].reason.find("warp"), std::string::npos);
  EXPECT_TRUE(replies[6].ok);  // estop is always accepted
  EXPECT_FALSE(replies[7].ok);
}

TEST(Serve, ClientsSeeIdenticalFrames) {
  SimServer server(line_scenario(), fast());
  const unsigned short port = server.start();
  Client a(port), b(port), c(port);
  ASSERT_TRUE(a.wait_for([](const auto& m) { return m.size() >= 2; }));
  a.send(CommandMessage{OperatorCommand::TakeOff, 1}.to_json().dump());
  ASSERT_TRUE(a.wait_for([](const auto& m) { return has_mode(m, "manual_hover"); }));
  std::this_thread::sleep_for(200ms);
  a.close();
  b.close();
  c.close();

  const auto fa = a.frames(), fb = b.frames(), fc = c.frames();
  // Compare over the window every client observed.
  const double lo = std::max({fa.front().t, fb.front().t, fc.front().t});
  const double hi = std::min({fa.back().t, fb.back().t, fc.back().t});
  auto window = [&](const std::vector<TelemetryFrame>& f) {
    std::vector<TelemetryFrame> out;
    for (const auto& x : f)
      if (x.t >= lo && x.t <= hi) out.push_back(x);
    return out;
  };
  const auto wa = window(fa);
  ASSERT_GT(wa.size(), 20u);
  EXPECT_EQ(window(fb), wa);
  EXPECT_EQ(window(fc), wa);
  for (std::size_t i = 1; i < wa.size(); ++i) EXPECT_NEAR(wa[i].t - wa[i - 1].t, 0.05, 1e-9);
}

TEST(Serve, StalledClientDoesNotStallSimulation) {
  SimServer server(line_scenario(), fast());
  const unsigned short port = server.start();
  // Handshake, then never read.
  net::io_context ioc;
  websocket::stream<net::ip::tcp::socket> ws(ioc);
  net::ip::tcp::resolver resolver(ioc);
  net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
  ws.handshake("127.0.0.1", "/");
  const std::uint64_t before = server.ticks();
  std::this_thread::sleep_for(500ms);
  const std::uint64_t advanced = server.ticks() - before;
  // 0.5 s wall at 10x and 100 Hz is 500 ticks.
  EXPECT_GT(advanced, 400u);
  EXPECT_LT(advanced, 600u);
}

TEST(Serve, RejectsBadOptions) {
  ServeOptions o = fast();
  o.frame_rate_hz = 0;
  EXPECT_THROW(SimServer(line_scenario(), o), Error);
}
