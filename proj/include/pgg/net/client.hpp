#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "pgg/game.hpp"
#include "pgg/net/endpoint.hpp"
#include "pgg/protocol.hpp"
#include "pgg/rng.hpp"
#include "pgg/strategy.hpp"

namespace pgg::net {

/// Blocking WebSocket client. Every receive has a deadline so a stalled
/// server surfaces as an error instead of a hang.
class WsClient {
 public:
  WsClient(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout = std::chrono::seconds(30))
      : ws_(ioc_), timeout_(timeout) {
    boost::asio::ip::tcp::resolver resolver(ioc_);
    auto results = resolver.resolve(host, std::to_string(port));
    boost::beast::get_lowest_layer(ws_).expires_after(timeout_);
    boost::beast::get_lowest_layer(ws_).connect(results);
    boost::beast::get_lowest_layer(ws_).expires_never();
    ws_.handshake(host + ":" + std::to_string(port), "/");
    ws_.text(true);
  }

  explicit WsClient(const Endpoint& ep) : WsClient(ep.host, ep.port) {}

  ~WsClient() { close(); }

  WsClient(const WsClient&) = delete;
  WsClient& operator=(const WsClient&) = delete;

  void send(const msg::ClientMessage& m) { send_text(msg::encode(m)); }
  void send_text(const std::string& text) { ws_.write(boost::asio::buffer(text)); }

  /// Next frame, or nullopt when the server closed the connection.
  std::optional<std::string> receive_text() {
    boost::beast::flat_buffer buffer;
    boost::beast::error_code result = boost::asio::error::would_block;
    ws_.async_read(buffer, [&](const boost::beast::error_code& ec, std::size_t) { result = ec; });
    ioc_.restart();
    ioc_.run_for(timeout_);
    if (result == boost::asio::error::would_block) {
      boost::beast::get_lowest_layer(ws_).cancel();
      ioc_.restart();
      ioc_.run();
      throw Error(ErrorCode::InvalidArgument, "timed out waiting for the server");
    }
    if (result == boost::beast::websocket::error::closed || result == boost::asio::error::eof ||
        result == boost::asio::error::connection_reset) {
      open_ = false;
      return std::nullopt;
    }
    if (result) throw boost::beast::system_error(result);
    return boost::beast::buffers_to_string(buffer.data());
  }

  std::optional<msg::ServerMessage> receive() {
    auto text = receive_text();
    if (!text) return std::nullopt;
    return msg::decode_server(*text);
  }

  void close() {
    if (!open_) return;
    open_ = false;
    boost::beast::error_code ec;
    ws_.close(boost::beast::websocket::close_code::normal, ec);
  }

 private:
  boost::asio::io_context ioc_;
  boost::beast::websocket::stream<boost::beast::tcp_stream> ws_;
  std::chrono::milliseconds timeout_;
  bool open_ = true;
};

struct BotOptions {
  std::string name = "bot";
  DelayWindow think{0, 0};  // wait before each contribution
  /// Runs after each round's contribution has been sent.
  std::function<void(WsClient&, int round)> after_contribute;
  /// Sees every inbound message before the bot reacts to it.
  std::function<void(const msg::ServerMessage&)> observe;
};

struct BotReport {
  PlayerId player;
  std::vector<Money> final_scores;
  std::vector<msg::ServerMessage> received;
  std::vector<msg::ErrorMsg> errors;
  bool finished = false;
};

/// Plays one seat of `session` over the wire with a built-in strategy. The
/// bot rebuilds the game history from round_result frames and returns at
/// game_over (or when the server hangs up).
inline BotReport run_bot_client(WsClient& client, const std::string& session, const std::string& strategy_token,
                                std::uint64_t seed, const BotOptions& options = {}) {
  const StrategyState strategy = make_strategy(strategy_token, seed);
  Rng rng(Rng::derive(seed, 1));
  BotReport report;
  std::optional<GameHistory> history;

  client.send(msg::Join{session, options.name});
  while (auto m = client.receive()) {
    report.received.push_back(*m);
    if (options.observe) options.observe(*m);
    if (const auto* w = std::get_if<msg::Welcome>(&*m)) {
      report.player = w->player;
      history.emplace(w->config);
    } else if (const auto* rs = std::get_if<msg::RoundStart>(&*m)) {
      if (!history) throw Error(ErrorCode::OutOfPhaseMessage, "round_start before welcome");
      const Money amount = decide(strategy, *history, report.player);
      if (options.think.max_ms > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(rng.uniform(options.think.min_ms, options.think.max_ms)));
      }
      client.send(msg::Contribute{rs->round, amount.to_cents()});
      if (options.after_contribute) options.after_contribute(client, rs->round);
    } else if (const auto* rr = std::get_if<msg::RoundResultMsg>(&*m)) {
      if (!history) throw Error(ErrorCode::OutOfPhaseMessage, "round_result before welcome");
      history = apply_round(std::move(*history), rr->result);
    } else if (const auto* g = std::get_if<msg::GameOver>(&*m)) {
      report.final_scores = g->final_scores;
      report.finished = true;
      break;
    } else if (const auto* e = std::get_if<msg::ErrorMsg>(&*m)) {
      // Before welcome an error means the join itself was refused.
      if (!history) throw Error(parse_error_code(e->code).value_or(ErrorCode::InvalidArgument), e->message);
      report.errors.push_back(*e);
    }
  }
  client.close();
  return report;
}

}  // namespace pgg::net
