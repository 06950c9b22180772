#pragma once

#include <cstdint>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pgg/config.hpp"
#include "pgg/error.hpp"
#include "pgg/game.hpp"
#include "pgg/questionnaire.hpp"
#include "pgg/wire.hpp"

namespace pgg {

inline constexpr int kLogSchemaVersion = 1;

struct SeatInfo {
  PlayerId player;
  std::string name;
  bool bot = false;
  std::string strategy;  // token for bot seats, empty for humans
  friend bool operator==(const SeatInfo&, const SeatInfo&) = default;
};

namespace event {

struct Joined {
  PlayerId player;
  std::string name;
  bool bot = false;
  friend bool operator==(const Joined&, const Joined&) = default;
};

/// First line of every log: schema version, game config and seat layout.
struct SessionStarted {
  GameConfig config;
  std::vector<SeatInfo> seats;
  std::uint64_t seed = 0;
  int schema = kLogSchemaVersion;
  friend bool operator==(const SessionStarted&, const SessionStarted&) = default;
};

struct RoundStarted {
  int round = 0;
  friend bool operator==(const RoundStarted&, const RoundStarted&) = default;
};

struct ContributionSubmitted {
  PlayerId player;
  int round = 0;
  std::int64_t amount_cents = 0;
  bool timed_out = false;
  friend bool operator==(const ContributionSubmitted&, const ContributionSubmitted&) = default;
};

struct RoundRevealed {
  RoundResult result;
  std::vector<Money> cumulative;
  friend bool operator==(const RoundRevealed&, const RoundRevealed&) = default;
};

struct PersonaEvent {
  PlayerId player;
  std::string action_id;
  friend bool operator==(const PersonaEvent&, const PersonaEvent&) = default;
};

struct QuestionnaireSubmitted {
  PlayerId player;
  QuestionnaireResponse answers;
  friend bool operator==(const QuestionnaireSubmitted&, const QuestionnaireSubmitted&) = default;
};

struct GameOver {
  std::vector<Money> final_scores;
  friend bool operator==(const GameOver&, const GameOver&) = default;
};

struct Disconnected {
  PlayerId player;
  friend bool operator==(const Disconnected&, const Disconnected&) = default;
};

struct SessionClosed {
  std::string reason;
  friend bool operator==(const SessionClosed&, const SessionClosed&) = default;
};

struct Failure {
  std::string code;
  std::string message;
  friend bool operator==(const Failure&, const Failure&) = default;
};

}  // namespace event

using EventBody =
    std::variant<event::Joined, event::SessionStarted, event::RoundStarted, event::ContributionSubmitted,
                 event::RoundRevealed, event::PersonaEvent, event::QuestionnaireSubmitted,
                 event::GameOver, event::Disconnected, event::SessionClosed, event::Failure>;

struct SessionEvent {
  std::int64_t timestamp_ms = 0;
  std::string session_id;
  EventBody body;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&body);
  }

  friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

inline std::string_view event_type(const EventBody& body) {
  return std::visit(
      [](const auto& e) -> std::string_view {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, event::Joined>) return "joined";
        else if constexpr (std::is_same_v<T, event::SessionStarted>) return "session_started";
        else if constexpr (std::is_same_v<T, event::RoundStarted>) return "round_started";
        else if constexpr (std::is_same_v<T, event::ContributionSubmitted>) return "contribution_submitted";
        else if constexpr (std::is_same_v<T, event::RoundRevealed>) return "round_revealed";
        else if constexpr (std::is_same_v<T, event::PersonaEvent>) return "persona_event";
        else if constexpr (std::is_same_v<T, event::QuestionnaireSubmitted>) return "questionnaire_submitted";
        else if constexpr (std::is_same_v<T, event::GameOver>) return "game_over";
        else if constexpr (std::is_same_v<T, event::Disconnected>) return "disconnected";
        else if constexpr (std::is_same_v<T, event::SessionClosed>) return "session_closed";
        else return "error";
      },
      body);
}

inline nlohmann::json to_json(const SessionEvent& ev) {
  nlohmann::json j;
  j["ts"] = ev.timestamp_ms;
  j["session"] = ev.session_id;
  j["type"] = std::string(event_type(ev.body));
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, event::Joined>) {
          j["player"] = e.player.index;
          j["name"] = e.name;
          j["bot"] = e.bot;
        } else if constexpr (std::is_same_v<T, event::SessionStarted>) {
          j["schema"] = e.schema;
          j["config"] = config_to_json(e.config);
          auto seats = nlohmann::json::array();
          for (const SeatInfo& s : e.seats) {
            seats.push_back({{"player", s.player.index}, {"name", s.name}, {"bot", s.bot}, {"strategy", s.strategy}});
          }
          j["seats"] = std::move(seats);
          j["seed"] = e.seed;
        } else if constexpr (std::is_same_v<T, event::RoundStarted>) {
          j["round"] = e.round;
        } else if constexpr (std::is_same_v<T, event::ContributionSubmitted>) {
          j["player"] = e.player.index;
          j["round"] = e.round;
          j["amount_cents"] = e.amount_cents;
          j["timed_out"] = e.timed_out;
        } else if constexpr (std::is_same_v<T, event::RoundRevealed>) {
          j["round"] = e.result.round_index;
          j["contributions_cents"] = to_cents(e.result.contributions);
          j["pool_milli"] = e.result.pool.to_milli();
          j["multiplied_milli"] = e.result.multiplied_pool.to_milli();
          j["share_milli"] = e.result.share.to_milli();
          j["payoffs_milli"] = to_milli(e.result.payoffs);
          j["cumulative_milli"] = to_milli(e.cumulative);
        } else if constexpr (std::is_same_v<T, event::PersonaEvent>) {
          j["player"] = e.player.index;
          j["action_id"] = e.action_id;
        } else if constexpr (std::is_same_v<T, event::QuestionnaireSubmitted>) {
          j["player"] = e.player.index;
          j["answers"] = to_json(e.answers);
        } else if constexpr (std::is_same_v<T, event::GameOver>) {
          j["final_scores_milli"] = to_milli(e.final_scores);
        } else if constexpr (std::is_same_v<T, event::Disconnected>) {
          j["player"] = e.player.index;
        } else if constexpr (std::is_same_v<T, event::SessionClosed>) {
          j["reason"] = e.reason;
        } else {
          j["code"] = e.code;
          j["message"] = e.message;
        }
      },
      ev.body);
  return j;
}

/// Inverse of to_json. Throws nlohmann::json::exception or pgg::Error on bad input;
/// a session_started record with another schema version throws SchemaVersionMismatch.
inline SessionEvent event_from_json(const nlohmann::json& j) {
  SessionEvent ev;
  ev.timestamp_ms = j.at("ts").get<std::int64_t>();
  ev.session_id = j.at("session").get<std::string>();
  const auto type = j.at("type").get<std::string>();
  auto player = [&] { return PlayerId{j.at("player").get<int>()}; };

  if (type == "joined") {
    ev.body = event::Joined{player(), j.at("name").get<std::string>(), j.at("bot").get<bool>()};
  } else if (type == "session_started") {
    const int schema = j.at("schema").get<int>();
    if (schema != kLogSchemaVersion) {
      throw Error(ErrorCode::SchemaVersionMismatch, "log schema " + std::to_string(schema) +
                                                        ", expected " + std::to_string(kLogSchemaVersion));
    }
    std::vector<SeatInfo> seats;
    for (const auto& s : j.at("seats")) {
      seats.push_back({PlayerId{s.at("player").get<int>()}, s.at("name").get<std::string>(),
                       s.at("bot").get<bool>(), s.at("strategy").get<std::string>()});
    }
    ev.body = event::SessionStarted{config_from_json(j.at("config")), std::move(seats),
                                    j.at("seed").get<std::uint64_t>(), schema};
  } else if (type == "round_started") {
    ev.body = event::RoundStarted{j.at("round").get<int>()};
  } else if (type == "contribution_submitted") {
    ev.body = event::ContributionSubmitted{player(), j.at("round").get<int>(),
                                           j.at("amount_cents").get<std::int64_t>(),
                                           j.at("timed_out").get<bool>()};
  } else if (type == "round_revealed") {
    event::RoundRevealed r;
    r.result.round_index = j.at("round").get<int>();
    r.result.contributions = from_cents(j.at("contributions_cents").get<std::vector<std::int64_t>>());
    r.result.pool = Money::from_milli(j.at("pool_milli").get<std::int64_t>());
    r.result.multiplied_pool = Money::from_milli(j.at("multiplied_milli").get<std::int64_t>());
    r.result.share = Money::from_milli(j.at("share_milli").get<std::int64_t>());
    r.result.payoffs = from_milli(j.at("payoffs_milli").get<std::vector<std::int64_t>>());
    r.cumulative = from_milli(j.at("cumulative_milli").get<std::vector<std::int64_t>>());
    ev.body = std::move(r);
  } else if (type == "persona_event") {
    ev.body = event::PersonaEvent{player(), j.at("action_id").get<std::string>()};
  } else if (type == "questionnaire_submitted") {
    ev.body = event::QuestionnaireSubmitted{player(), questionnaire_from_json(j.at("answers"))};
  } else if (type == "game_over") {
    ev.body = event::GameOver{from_milli(j.at("final_scores_milli").get<std::vector<std::int64_t>>())};
  } else if (type == "disconnected") {
    ev.body = event::Disconnected{player()};
  } else if (type == "session_closed") {
    ev.body = event::SessionClosed{j.at("reason").get<std::string>()};
  } else if (type == "error") {
    ev.body = event::Failure{j.at("code").get<std::string>(), j.at("message").get<std::string>()};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown event type '" + type + "'");
  }
  return ev;
}

}  // namespace pgg
