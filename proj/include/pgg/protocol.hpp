#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pgg/error.hpp"
#include "pgg/events.hpp"
#include "pgg/game.hpp"
#include "pgg/wire.hpp"

// Wire protocol: one JSON object per text frame, discriminated by "type".

namespace pgg::msg {

// client -> server

struct Join {
  std::string session;
  std::string name;
  friend bool operator==(const Join&, const Join&) = default;
};

struct Contribute {
  int round = 0;
  std::int64_t amount_cents = 0;
  friend bool operator==(const Contribute&, const Contribute&) = default;
};

struct Questionnaire {
  nlohmann::json answers;
  friend bool operator==(const Questionnaire&, const Questionnaire&) = default;
};

using ClientMessage = std::variant<Join, Contribute, Questionnaire>;

// server -> client

struct Welcome {
  PlayerId player;
  GameConfig config;
  std::vector<SeatInfo> seats;  // strategy tokens are never sent to clients
  bool questionnaire = false;
  friend bool operator==(const Welcome&, const Welcome&) = default;
};

struct RoundStart {
  int round = 0;
  int round_of = 0;
  friend bool operator==(const RoundStart&, const RoundStart&) = default;
};

struct ContributionAck {
  int round = 0;
  friend bool operator==(const ContributionAck&, const ContributionAck&) = default;
};

struct RoundResultMsg {
  RoundResult result;
  std::vector<Money> cumulative;
  friend bool operator==(const RoundResultMsg&, const RoundResultMsg&) = default;
};

struct PersonaEvent {
  PlayerId player;
  std::string action_id;
  friend bool operator==(const PersonaEvent&, const PersonaEvent&) = default;
};

struct GameOver {
  std::vector<Money> final_scores;
  friend bool operator==(const GameOver&, const GameOver&) = default;
};

struct ErrorMsg {
  std::string code;
  std::string message;
  friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

using ServerMessage =
    std::variant<Welcome, RoundStart, ContributionAck, RoundResultMsg, PersonaEvent, GameOver, ErrorMsg>;

inline ErrorMsg error_from(const Error& e) { return {std::string(to_string(e.code())), e.detail()}; }

inline std::string_view message_type(const ServerMessage& m) {
  static constexpr std::string_view names[] = {"welcome",       "round_start", "contribution_ack",
                                                "round_result",  "persona_event", "game_over", "error"};
  return names[m.index()];
}

inline nlohmann::json to_json(const ClientMessage& m) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Join>) {
          return {{"type", "join"}, {"session", v.session}, {"name", v.name}};
        } else if constexpr (std::is_same_v<T, Contribute>) {
          return {{"type", "contribute"}, {"round", v.round}, {"amount_cents", v.amount_cents}};
        } else {
          return {{"type", "questionnaire"}, {"answers", v.answers}};
        }
      },
      m);
}

inline nlohmann::json to_json(const ServerMessage& m) {
  nlohmann::json j;
  j["type"] = std::string(message_type(m));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Welcome>) {
          j["player_id"] = v.player.index;
          j["config"] = config_to_json(v.config);
          j["config"]["questionnaire"] = v.questionnaire;
          auto seats = nlohmann::json::array();
          for (const SeatInfo& s : v.seats) {
            seats.push_back({{"player_id", s.player.index}, {"name", s.name}, {"bot", s.bot}});
          }
          j["seats"] = std::move(seats);
        } else if constexpr (std::is_same_v<T, RoundStart>) {
          j["round"] = v.round;
          j["round_of"] = v.round_of;
        } else if constexpr (std::is_same_v<T, ContributionAck>) {
          j["round"] = v.round;
        } else if constexpr (std::is_same_v<T, RoundResultMsg>) {
          j["round"] = v.result.round_index;
          j["contributions_cents"] = to_cents(v.result.contributions);
          j["pool_milli"] = v.result.pool.to_milli();
          j["multiplied_milli"] = v.result.multiplied_pool.to_milli();
          j["share_milli"] = v.result.share.to_milli();
          j["payoffs_milli"] = to_milli(v.result.payoffs);
          j["cumulative_milli"] = to_milli(v.cumulative);
        } else if constexpr (std::is_same_v<T, PersonaEvent>) {
          j["player_id"] = v.player.index;
          j["action_id"] = v.action_id;
        } else if constexpr (std::is_same_v<T, GameOver>) {
          j["final_scores_milli"] = to_milli(v.final_scores);
        } else {
          j["code"] = v.code;
          j["message"] = v.message;
        }
      },
      m);
  return j;
}

inline std::string encode(const ClientMessage& m) { return to_json(m).dump(); }
inline std::string encode(const ServerMessage& m) { return to_json(m).dump(); }

/// Parses one inbound frame. Anything that is not a well-formed client
/// message throws MalformedMessage.
inline ClientMessage decode_client(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    const auto type = j.at("type").get<std::string>();
    if (type == "join") return Join{j.at("session").get<std::string>(), j.at("name").get<std::string>()};
    if (type == "contribute") {
      return Contribute{j.at("round").get<int>(), j.at("amount_cents").get<std::int64_t>()};
    }
    if (type == "questionnaire") return Questionnaire{j.at("answers")};
    throw Error(ErrorCode::MalformedMessage, "unknown message type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedMessage, e.what());
  }
}

inline ServerMessage decode_server(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    const auto type = j.at("type").get<std::string>();
    if (type == "welcome") {
      std::vector<SeatInfo> seats;
      for (const auto& s : j.at("seats")) {
        seats.push_back({PlayerId{s.at("player_id").get<int>()}, s.at("name").get<std::string>(),
                         s.at("bot").get<bool>(), ""});
      }
      const auto& cfg = j.at("config");
      return Welcome{PlayerId{j.at("player_id").get<int>()}, config_from_json(cfg), std::move(seats),
                     cfg.value("questionnaire", false)};
    }
    if (type == "round_start") return RoundStart{j.at("round").get<int>(), j.at("round_of").get<int>()};
    if (type == "contribution_ack") return ContributionAck{j.at("round").get<int>()};
    if (type == "round_result") {
      RoundResultMsg r;
      r.result.round_index = j.at("round").get<int>();
      r.result.contributions = from_cents(j.at("contributions_cents").get<std::vector<std::int64_t>>());
      r.result.pool = Money::from_milli(j.at("pool_milli").get<std::int64_t>());
      r.result.multiplied_pool = Money::from_milli(j.at("multiplied_milli").get<std::int64_t>());
      r.result.share = Money::from_milli(j.at("share_milli").get<std::int64_t>());
      r.result.payoffs = from_milli(j.at("payoffs_milli").get<std::vector<std::int64_t>>());
      r.cumulative = from_milli(j.at("cumulative_milli").get<std::vector<std::int64_t>>());
      return r;
    }
    if (type == "persona_event") {
      return PersonaEvent{PlayerId{j.at("player_id").get<int>()}, j.at("action_id").get<std::string>()};
    }
    if (type == "game_over") {
      return GameOver{from_milli(j.at("final_scores_milli").get<std::vector<std::int64_t>>())};
    }
    if (type == "error") return ErrorMsg{j.at("code").get<std::string>(), j.at("message").get<std::string>()};
    throw Error(ErrorCode::MalformedMessage, "unknown message type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedMessage, e.what());
  }
}

}  // namespace pgg::msg
