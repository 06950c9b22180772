#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pgg/error.hpp"
#include "pgg/log.hpp"
#include "pgg/protocol.hpp"
#include "pgg/session.hpp"

namespace pgg {

/// Runs a Session against real effects: every event is appended to the log
/// (and flushed) before any message produced by the same input goes out.
/// Not thread-safe; the caller serializes all calls for one session.
class SessionHost {
 public:
  using SendFn = std::function<void(ConnectionId, const msg::ServerMessage&)>;
  using ScheduleFn = std::function<void(const TimerRequest&)>;
  using ClockFn = std::function<std::int64_t()>;

  SessionHost(Session session, LogSink& sink, SendFn send, ScheduleFn schedule, ClockFn clock)
      : session_(std::move(session)), sink_(sink), send_(std::move(send)),
        schedule_(std::move(schedule)), clock_(std::move(clock)) {}

  void start() { process(session_.start(clock_())); }
  void deliver(ConnectionId from, std::string_view text) { process(session_.handle_text(from, text, clock_())); }
  void deliver(ConnectionId from, const msg::ClientMessage& m) {
    process(session_.handle_message(from, m, clock_()));
  }
  void disconnect(ConnectionId conn) { process(session_.on_disconnect(conn, clock_())); }
  void fire(const TimerRequest& t) { process(session_.on_timer(t, clock_())); }

  const Session& session() const noexcept { return session_; }
  bool sink_failed() const noexcept { return sink_failed_; }

 private:
  void process(Step step) {
    if (!sink_failed_) {
      for (const SessionEvent& ev : step.events) {
        try {
          append_log(sink_, ev);
        } catch (const Error& e) {
          sink_failed_ = true;
          Step aborted = session_.abort(ErrorCode::SinkUnavailable, e.detail(), clock_());
          for (const Outbound& o : aborted.outbound) send_(o.to, o.message);
          return;
        }
      }
    }
    for (const Outbound& o : step.outbound) send_(o.to, o.message);
    if (!session_.closed()) {
      for (const TimerRequest& t : step.timers) schedule_(t);
    }
  }

  Session session_;
  LogSink& sink_;
  SendFn send_;
  ScheduleFn schedule_;
  ClockFn clock_;
  bool sink_failed_ = false;
};

/// Discrete-event loop over virtual milliseconds. Callbacks with equal due
/// times run in the order they were scheduled.
class VirtualLoop {
 public:
  std::int64_t now() const noexcept { return now_; }

  void after(std::int64_t delay_ms, std::function<void()> fn) {
    queue_.push(Item{now_ + delay_ms, seq_++, std::move(fn)});
  }

  bool run_one() {
    if (queue_.empty()) return false;
    Item item = queue_.top();
    queue_.pop();
    now_ = std::max(now_, item.due);
    item.fn();
    return true;
  }

  void run_until_idle() {
    while (run_one()) {
    }
  }

  void run_until(std::int64_t t) {
    while (!queue_.empty() && queue_.top().due <= t) run_one();
    now_ = std::max(now_, t);
  }

  bool idle() const noexcept { return queue_.empty(); }

 private:
  struct Item {
    std::int64_t due;
    std::uint64_t seq;
    std::function<void()> fn;
    bool operator<(const Item& o) const { return due != o.due ? due > o.due : seq > o.seq; }
  };

  std::priority_queue<Item> queue_;
  std::int64_t now_ = 0;
  std::uint64_t seq_ = 0;
};

/// In-process driver: a SessionHost on a VirtualLoop with in-memory client
/// mailboxes. Used by the simulator and the protocol tests.
class LocalRunner {
 public:
  struct Delivery {
    std::int64_t at_ms;
    ConnectionId to;
    msg::ServerMessage message;
  };

  LocalRunner(Session session, LogSink& sink) {
    host_ = std::make_unique<SessionHost>(
        std::move(session), sink,
        [this](ConnectionId to, const msg::ServerMessage& m) { trace_.push_back({loop_.now(), to, m}); },
        [this](const TimerRequest& t) { loop_.after(t.delay_ms, [this, t] { host_->fire(t); }); },
        [this] { return loop_.now(); });
  }

  LocalRunner(const LocalRunner&) = delete;
  LocalRunner& operator=(const LocalRunner&) = delete;

  void start() { host_->start(); }
  ConnectionId connect() { return next_conn_++; }

  /// Queues `m` from `from` to arrive `delay_ms` from now.
  void send(ConnectionId from, msg::ClientMessage m, std::int64_t delay_ms = 0) {
    loop_.after(delay_ms, [this, from, m = std::move(m)] { host_->deliver(from, m); });
  }
  void send_text(ConnectionId from, std::string text, std::int64_t delay_ms = 0) {
    loop_.after(delay_ms, [this, from, text = std::move(text)] { host_->deliver(from, text); });
  }
  void disconnect(ConnectionId conn, std::int64_t delay_ms = 0) {
    loop_.after(delay_ms, [this, conn] { host_->disconnect(conn); });
  }

  void run_until_idle() { loop_.run_until_idle(); }
  void run_until(std::int64_t t) { loop_.run_until(t); }
  bool run_one() { return loop_.run_one(); }

  std::int64_t now() const noexcept { return loop_.now(); }
  const Session& session() const noexcept { return host_->session(); }
  const SessionHost& host() const noexcept { return *host_; }
  const std::vector<Delivery>& trace() const noexcept { return trace_; }

  std::vector<msg::ServerMessage> inbox(ConnectionId conn) const {
    std::vector<msg::ServerMessage> out;
    for (const Delivery& d : trace_) {
      if (d.to == conn) out.push_back(d.message);
    }
    return out;
  }

 private:
  VirtualLoop loop_;
  std::unique_ptr<SessionHost> host_;
  std::vector<Delivery> trace_;
  ConnectionId next_conn_ = 1;
};

}  // namespace pgg
