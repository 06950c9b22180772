#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "pgg/host.hpp"
#include "pgg/log.hpp"
#include "pgg/net/endpoint.hpp"
#include "pgg/protocol.hpp"
#include "pgg/rng.hpp"
#include "pgg/server_config.hpp"
#include "pgg/session.hpp"
#include "pgg/wire.hpp"

namespace pgg::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

inline std::int64_t utc_now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

namespace detail {

class Connection;

/// Owns one Session and everything touching it; all access goes through `strand`.
struct SessionRuntime {
  SessionRuntime(asio::io_context& ioc, Session session, std::filesystem::path log_path)
      : strand(asio::make_strand(ioc)), sink(log_path), path(std::move(log_path)), id(session.id()) {
    host = std::make_unique<SessionHost>(
        std::move(session), sink, [this](ConnectionId to, const msg::ServerMessage& m) { send(to, m); },
        [this](const TimerRequest& t) { schedule(t); },
        [last = std::int64_t{0}]() mutable { return last = std::max(last, utc_now_ms()); });
  }

  void send(ConnectionId to, const msg::ServerMessage& m);
  void schedule(const TimerRequest& t) {
    auto timer = std::make_shared<asio::steady_timer>(strand, std::chrono::milliseconds(t.delay_ms));
    timers.insert(timer);
    timer->async_wait([this, timer, t](const beast::error_code& ec) {
      timers.erase(timer);
      if (ec || stopping) return;
      host->fire(t);
      after_input();
    });
  }

  /// Called on the strand after every input to publish the closed state.
  void after_input();

  void stop() {
    stopping = true;
    for (const auto& t : timers) t->cancel();
    timers.clear();
  }

  asio::strand<asio::io_context::executor_type> strand;
  FileLogSink sink;
  std::filesystem::path path;
  std::string id;
  std::unique_ptr<SessionHost> host;
  std::map<ConnectionId, std::weak_ptr<Connection>> connections;
  std::set<std::shared_ptr<asio::steady_timer>> timers;
  bool stopping = false;
  std::function<void(SessionRuntime&)> on_closed;
  bool reported_closed = false;
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  using Router = std::function<SessionRuntime*(const std::string&)>;

  Connection(tcp::socket socket, ConnectionId id, Router router)
      : ws_(std::move(socket)), id_(id), router_(std::move(router)) {}

  void run() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](const beast::error_code& ec) {
      if (!ec) self->read();
    });
  }

  /// Thread-safe: queues a text frame for this connection.
  void send(std::string text) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      self->queue_.push_back(std::move(text));
      if (self->queue_.size() == 1) self->write_next();
    });
  }

  void close() {
    asio::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->closing_) return;
      self->closing_ = true;
      if (self->queue_.empty()) self->do_close();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](const beast::error_code& ec, std::size_t) {
      if (ec) return self->gone();
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->on_frame(std::move(text));
      self->read();
    });
  }

  void on_frame(std::string text) {
    if (!session_) {
      // The first join decides which session this connection belongs to.
      std::optional<msg::ClientMessage> decoded;
      try {
        decoded = msg::decode_client(text);
      } catch (const Error& e) {
        return send(msg::encode(msg::ServerMessage{msg::error_from(e)}));
      }
      const auto* join = std::get_if<msg::Join>(&*decoded);
      if (!join) {
        return send(msg::encode(msg::ServerMessage{msg::ErrorMsg{std::string(to_string(ErrorCode::NotJoined)),
                                                                 "join a session first"}}));
      }
      SessionRuntime* rt = router_(join->session);
      if (!rt) {
        return send(msg::encode(msg::ServerMessage{msg::ErrorMsg{
            std::string(to_string(ErrorCode::UnknownSession)), "no session '" + join->session + "'"}}));
      }
      session_ = rt;
      asio::dispatch(rt->strand, [rt, self = shared_from_this()] { rt->connections[self->id_] = self; });
    }
    asio::dispatch(session_->strand, [rt = session_, id = id_, text = std::move(text)] {
      if (rt->stopping) return;
      rt->host->deliver(id, text);
      rt->after_input();
    });
  }

  void gone() {
    if (!session_) return;
    asio::dispatch(session_->strand, [rt = session_, id = id_] {
      rt->connections.erase(id);
      if (rt->stopping) return;
      rt->host->disconnect(id);
      rt->after_input();
    });
  }

  void write_next() {
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](const beast::error_code& ec,
                                                                             std::size_t) {
      if (ec) {
        self->queue_.clear();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) {
        self->write_next();
      } else if (self->closing_) {
        self->do_close();
      }
    });
  }

  void do_close() {
    ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](const beast::error_code&) {});
  }

  websocket::stream<beast::tcp_stream> ws_;
  ConnectionId id_;
  Router router_;
  SessionRuntime* session_ = nullptr;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool closing_ = false;
};

inline void SessionRuntime::send(ConnectionId to, const msg::ServerMessage& m) {
  auto it = connections.find(to);
  if (it == connections.end()) return;
  if (auto conn = it->second.lock()) conn->send(msg::encode(m));
}

inline void SessionRuntime::after_input() {
  if (reported_closed || !host->session().closed()) return;
  reported_closed = true;
  for (const auto& [id, weak] : connections) {
    if (auto conn = weak.lock()) conn->close();
  }
  if (on_closed) on_closed(*this);
}

}  // namespace detail

/// Outcome of one session once it has closed.
struct SessionOutcome {
  std::string session_id;
  std::filesystem::path log_path;
  bool completed = false;  // all rounds were played
  std::vector<Money> final_scores;
};

/// WebSocket game server. Each configured session gets its own log file
/// `<log_dir>/<session_id>.ndjson` and a seed derived from the server seed.
class Server {
 public:
  Server(ServerConfig config, std::uint64_t seed, unsigned threads = 1)
      : config_(std::move(config)), seed_(seed), threads_(std::max(1u, threads)) {}

  ~Server() { stop(); }

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds, opens every session and starts serving on background threads.
  void start() {
    require_wire_representable(config_.settings.game);
    std::filesystem::create_directories(config_.log_dir);
    const Endpoint ep = parse_endpoint(config_.listen);

    for (std::size_t i = 0; i < config_.sessions.size(); ++i) {
      const std::string& id = config_.sessions[i];
      if (runtimes_.contains(id)) throw Error(ErrorCode::InvalidArgument, "duplicate session id '" + id + "'");
      auto path = std::filesystem::path(config_.log_dir) / (id + ".ndjson");
      auto rt = std::make_unique<detail::SessionRuntime>(
          ioc_, Session(id, config_.settings, Rng::derive(seed_, i)), path);
      rt->on_closed = [this](detail::SessionRuntime& r) { record_outcome(r); };
      runtimes_.emplace(id, std::move(rt));
    }

    tcp::endpoint endpoint(asio::ip::make_address(ep.host), ep.port);
    acceptor_.open(endpoint.protocol());
    acceptor_.set_option(asio::socket_base::reuse_address(true));
    acceptor_.bind(endpoint);
    acceptor_.listen(asio::socket_base::max_listen_connections);
    port_ = acceptor_.local_endpoint().port();

    for (auto& [id, rt] : runtimes_) {
      asio::dispatch(rt->strand, [r = rt.get()] {
        r->host->start();
        r->after_input();
      });
    }
    accept();
    for (unsigned t = 0; t < threads_; ++t) workers_.emplace_back([this] { ioc_.run(); });
  }

  std::uint16_t port() const noexcept { return port_; }
  const ServerConfig& config() const noexcept { return config_; }

  /// Blocks until every session has closed or `timeout` passes.
  bool wait_all_closed(std::optional<std::chrono::milliseconds> timeout = std::nullopt) {
    std::unique_lock lock(mu_);
    auto done = [&] { return outcomes_.size() == runtimes_.size(); };
    if (!timeout) {
      cv_.wait(lock, done);
      return true;
    }
    return cv_.wait_for(lock, *timeout, done);
  }

  std::vector<SessionOutcome> outcomes() const {
    std::lock_guard lock(mu_);
    return outcomes_;
  }

  void stop() {
    if (stopped_.exchange(true)) return;
    asio::post(ioc_, [this] {
      beast::error_code ec;
      acceptor_.close(ec);
    });
    for (auto& [id, rt] : runtimes_) asio::post(rt->strand, [r = rt.get()] { r->stop(); });
    // Give queued closing handshakes a moment before tearing the loop down.
    if (!workers_.empty()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    ioc_.stop();
    for (auto& w : workers_) {
      if (w.joinable()) w.join();
    }
  }

 private:
  void accept() {
    acceptor_.async_accept(asio::make_strand(ioc_), [this](const beast::error_code& ec, tcp::socket socket) {
      if (ec) return;
      auto conn = std::make_shared<detail::Connection>(std::move(socket), next_conn_++, [this](const std::string& id) {
        auto it = runtimes_.find(id);
        return it == runtimes_.end() ? nullptr : it->second.get();
      });
      conn->run();
      accept();
    });
  }

  void record_outcome(detail::SessionRuntime& rt) {
    const Session& s = rt.host->session();
    SessionOutcome out{rt.id, rt.path, s.history().complete(), {}};
    if (out.completed) out.final_scores = final_scores(s.history());
    {
      std::lock_guard lock(mu_);
      outcomes_.push_back(std::move(out));
    }
    cv_.notify_all();
  }

  ServerConfig config_;
  std::uint64_t seed_;
  unsigned threads_;
  asio::io_context ioc_;
  tcp::acceptor acceptor_{ioc_};
  std::uint16_t port_ = 0;
  std::map<std::string, std::unique_ptr<detail::SessionRuntime>> runtimes_;
  std::atomic<ConnectionId> next_conn_{1};
  std::vector<std::thread> workers_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<SessionOutcome> outcomes_;
  std::atomic<bool> stopped_{false};
};

}  // namespace pgg::net
