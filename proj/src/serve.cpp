#include "inspecsim/serve.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <cmath>
#include <deque>
#include <mutex>
#include <set>
#include <thread>
#include <variant>

#include "inspecsim/telemetry.hpp"

namespace inspecsim {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

json scene_message(const WorldModel& world, const InspectionPath& flight_path) {
  json target = json::array();
  for (const auto& box : world.target()) target.push_back(aabb_to_json(box));
  json path = json::array();
  for (const auto& w : flight_path.waypoints)
    path.push_back({{"x", round_sig9(w.x)}, {"y", round_sig9(w.y)}, {"z", round_sig9(w.z)}, {"yaw", round_sig9(w.yaw)}});
  return json{{"scene", {{"bounds", aabb_to_json(world.bounds())}, {"target", target}, {"path", path}}}};
}

namespace {

class Hub;

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, Hub& hub, std::size_t max_frames)
      : ws_(std::move(socket)), hub_(hub), max_frames_(max_frames) {}

  void run();
  /// Network thread only.
  void send(std::string text, bool is_frame);

 private:
  struct Outgoing {
    std::string text;
    bool is_frame;
  };

  void on_read(beast::error_code ec, std::size_t);
  void write_next();
  void close();

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  Hub& hub_;
  std::size_t max_frames_;
  std::deque<Outgoing> outbox_;
  std::size_t pending_frames_ = 0;
  bool writing_ = false;
  bool closed_ = false;
};

/// Queued input for the simulation thread: a command to apply, or a reply
/// that is already decided (malformed input) but must keep its place in the
/// per-connection order.
struct Inbound {
  std::weak_ptr<Session> session;
  std::variant<CommandMessage, CommandReply> message;
};

class Hub {
 public:
  explicit Hub(std::string scene) : scene_(std::move(scene)) {}

  // Network thread.
  void join(const std::shared_ptr<Session>& s) {
    sessions_.insert(s);
    clients_.store(sessions_.size());
    s->send(scene_, false);
  }
  void leave(const std::shared_ptr<Session>& s) {
    sessions_.erase(s);
    clients_.store(sessions_.size());
  }
  void broadcast(const std::string& frame) {
    for (const auto& s : sessions_) s->send(frame, true);
  }

  // Any thread.
  void submit(const std::shared_ptr<Session>& s, const std::string& text) {
    std::lock_guard lock(mutex_);
    inbox_.push_back(Inbound{s, parse_command_message(text)});
  }
  std::deque<Inbound> drain() {
    std::lock_guard lock(mutex_);
    std::deque<Inbound> out;
    out.swap(inbox_);
    return out;
  }
  std::size_t clients() const { return clients_.load(); }

 private:
  std::string scene_;
  std::set<std::shared_ptr<Session>> sessions_;
  std::atomic<std::size_t> clients_{0};
  std::mutex mutex_;
  std::deque<Inbound> inbox_;
};

void Session::run() {
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.text(true);
  ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    self->hub_.join(self);
    self->ws_.async_read(self->buffer_, beast::bind_front_handler(&Session::on_read, self));
  });
}

void Session::on_read(beast::error_code ec, std::size_t) {
  if (ec) {
    close();
    return;
  }
  hub_.submit(shared_from_this(), beast::buffers_to_string(buffer_.data()));
  buffer_.consume(buffer_.size());
  ws_.async_read(buffer_, beast::bind_front_handler(&Session::on_read, shared_from_this()));
}

void Session::send(std::string text, bool is_frame) {
  if (closed_) return;
  if (is_frame) {
    if (pending_frames_ >= max_frames_) return;
    ++pending_frames_;
  }
  outbox_.push_back(Outgoing{std::move(text), is_frame});
  if (!writing_) write_next();
}

void Session::write_next() {
  if (outbox_.empty() || closed_) {
    writing_ = false;
    return;
  }
  writing_ = true;
  ws_.async_write(net::buffer(outbox_.front().text), [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (self->outbox_.front().is_frame) --self->pending_frames_;
    self->outbox_.pop_front();
    if (ec) {
      self->close();
      return;
    }
    self->write_next();
  });
}

void Session::close() {
  if (closed_) return;
  closed_ = true;
  hub_.leave(shared_from_this());
}

}  // namespace

struct SimServer::Impl {
  Impl(Scenario sc, ServeOptions opt) : scenario(std::move(sc)), options(opt) {}

  void accept_loop() {
    acceptor->async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Session>(std::move(socket), *hub, options.max_pending_frames)->run();
      accept_loop();
    });
  }

  void post_reply(const std::weak_ptr<Session>& session, const CommandReply& reply) {
    net::post(ioc, [session, text = reply.to_json().dump()] {
      if (auto s = session.lock()) s->send(text, false);
    });
  }

  void sim_loop() {
    const double dt = scenario.config.vehicle.dt;
    const auto frame_every =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(1.0 / (dt * options.frame_rate_hz))));
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t next_tag = 1;

    while (!stopping.load()) {
      // Commands queued since the last tick, applied in arrival order.
      std::deque<Inbound> batch = hub->drain();
      std::vector<std::pair<std::uint64_t, const Inbound*>> order;
      for (const auto& in : batch) {
        std::uint64_t tag = 0;
        if (const auto* cmd = std::get_if<CommandMessage>(&in.message)) {
          tag = next_tag++;
          mission->enqueue(cmd->command, tag);
        }
        order.emplace_back(tag, &in);
      }

      const TickResult tr = mission->tick();
      const std::uint64_t k = mission->ticks();
      tick_count.store(k);

      for (const auto& [tag, in] : order) {
        if (const auto* reply = std::get_if<CommandReply>(&in->message)) {
          post_reply(in->session, *reply);
          continue;
        }
        const auto& cmd = std::get<CommandMessage>(in->message);
        for (const auto& o : tr.outcomes) {
          if (o.tag != tag) continue;
          post_reply(in->session, CommandReply{cmd.request_id, o.accepted, o.reason});
        }
      }

      if ((k - 1) % frame_every == 0) {
        net::post(ioc, [this, text = TelemetryFrame::from_record(tr.record).to_json().dump()] { hub->broadcast(text); });
      }

      if (options.speed > 0.0) {
        // Deadlines from the start time, so sleep error never accumulates.
        const auto deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                       std::chrono::duration<double>(static_cast<double>(k) * dt / options.speed));
        std::this_thread::sleep_until(deadline);
      }
    }
  }

  Scenario scenario;
  ServeOptions options;
  net::io_context ioc{1};
  std::optional<tcp::acceptor> acceptor;
  std::unique_ptr<Hub> hub;
  std::unique_ptr<Mission> mission;
  std::thread net_thread;
  std::thread sim_thread;
  std::atomic<bool> stopping{false};
  std::atomic<std::uint64_t> tick_count{0};
  bool started = false;
};

SimServer::SimServer(Scenario scenario, ServeOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), options)) {
  if (!(options.speed >= 0.0) || !(options.frame_rate_hz > 0.0) || options.max_pending_frames == 0)
    throw Error(ErrorCode::InvalidInput, "serve: speed must be >= 0, frame rate > 0, frame queue > 0");
  impl_->mission = std::make_unique<Mission>(impl_->scenario.config);
  impl_->hub = std::make_unique<Hub>(scene_message(impl_->scenario.config.world, impl_->mission->flight_path()).dump());
}

SimServer::~SimServer() { stop(); }

unsigned short SimServer::start() {
  if (impl_->started) throw Error(ErrorCode::InvalidInput, "serve: already started");
  beast::error_code ec;
  const auto address = net::ip::make_address(impl_->options.address, ec);
  if (ec) throw Error(ErrorCode::InvalidInput, "serve: bad address '" + impl_->options.address + "'");
  auto& acc = impl_->acceptor.emplace(impl_->ioc);
  const tcp::endpoint endpoint(address, impl_->options.port);
  acc.open(endpoint.protocol(), ec);
  if (!ec) acc.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) acc.bind(endpoint, ec);
  if (!ec) acc.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw Error(ErrorCode::Io, "serve: cannot listen on port " + std::to_string(impl_->options.port) + ": " + ec.message());
  const unsigned short port = acc.local_endpoint().port();

  impl_->started = true;
  impl_->accept_loop();
  impl_->net_thread = std::thread([this] {
    auto guard = net::make_work_guard(impl_->ioc);
    impl_->ioc.run();
  });
  impl_->sim_thread = std::thread([this] { impl_->sim_loop(); });
  return port;
}

void SimServer::stop() {
  if (!impl_ || !impl_->started) return;
  impl_->stopping.store(true);
  if (impl_->sim_thread.joinable()) impl_->sim_thread.join();
  impl_->ioc.stop();
  if (impl_->net_thread.joinable()) impl_->net_thread.join();
  impl_->started = false;
}

std::uint64_t SimServer::ticks() const { return impl_->tick_count.load(); }

std::size_t SimServer::client_count() const { return impl_->hub->clients(); }

}  // namespace inspecsim
