#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pgg/config.hpp"
#include "pgg/error.hpp"
#include "pgg/session.hpp"

namespace pgg {

/// Everything `pgg serve` needs, read from one JSON document:
///
///   {
///     "sessions": ["pilot"],
///     "game": {"num_players": 4, "num_rounds": 10, "endowment": "1.00",
///              "allowed": ["0", "0.50", "1.00"], "multiplier": "1.6"},
///     "seats": [{"bot": true, "strategy": "ac", "name": "iCub"},
///               {"bot": false}, {"bot": false}, {"bot": false}],
///     "decision_timeout_s": 0,
///     "bot_delay_ms": {"min": 2000, "max": 8000},
///     "reveal_pause_ms": 0,
///     "persona": {"actions": ["think_aloud", "clear_throat"], "max_actions": 1},
///     "questionnaire": true,
///     "log_dir": "logs",
///     "listen": "127.0.0.1:8080"
///   }
///
/// Every key is optional; omitted keys take the defaults shown above.
struct ServerConfig {
  std::vector<std::string> sessions = {"pilot"};
  SessionSettings settings = default_settings();
  std::string log_dir = "logs";
  std::string listen = "127.0.0.1:8080";
};

inline ServerConfig parse_server_config(const nlohmann::json& j) {
  ServerConfig cfg;
  try {
    if (j.contains("sessions")) cfg.sessions = j.at("sessions").get<std::vector<std::string>>();
    if (cfg.sessions.empty()) throw Error(ErrorCode::InvalidArgument, "no sessions configured");

    if (j.contains("game")) {
      const auto& g = j.at("game");
      RawConfig raw;
      raw.num_players = g.value("num_players", raw.num_players);
      raw.num_rounds = g.value("num_rounds", raw.num_rounds);
      if (g.contains("endowment")) raw.endowment = Money::parse(g.at("endowment").get<std::string>());
      if (g.contains("allowed")) {
        raw.allowed_contributions.clear();
        for (const auto& a : g.at("allowed")) raw.allowed_contributions.push_back(Money::parse(a.get<std::string>()));
      }
      if (g.contains("multiplier")) raw.multiplier = Rational::parse(g.at("multiplier").get<std::string>());
      cfg.settings.game = validate_config(raw);
    }
    if (j.contains("seats")) {
      cfg.settings.seats.clear();
      for (const auto& s : j.at("seats")) {
        SeatSpec seat;
        seat.bot = s.value("bot", false);
        seat.strategy = s.value("strategy", std::string());
        seat.name = s.value("name", std::string());
        cfg.settings.seats.push_back(std::move(seat));
      }
    }
    if (j.contains("decision_timeout_s")) {
      cfg.settings.decision_timeout_ms =
          static_cast<std::int64_t>(j.at("decision_timeout_s").get<double>() * 1000.0);
    }
    if (j.contains("bot_delay_ms")) {
      cfg.settings.bot_delay.min_ms = j.at("bot_delay_ms").at("min").get<std::int64_t>();
      cfg.settings.bot_delay.max_ms = j.at("bot_delay_ms").at("max").get<std::int64_t>();
    }
    cfg.settings.reveal_pause_ms = j.value("reveal_pause_ms", cfg.settings.reveal_pause_ms);
    if (j.contains("persona")) {
      const auto& p = j.at("persona");
      cfg.settings.persona_actions.clear();
      for (const auto& a : p.value("actions", nlohmann::json::array())) {
        cfg.settings.persona_actions.push_back({a.get<std::string>()});
      }
      cfg.settings.max_persona_actions = p.value("max_actions", cfg.settings.max_persona_actions);
    }
    cfg.settings.questionnaire = j.value("questionnaire", cfg.settings.questionnaire);
    cfg.log_dir = j.value("log_dir", cfg.log_dir);
    cfg.listen = j.value("listen", cfg.listen);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("server config: ") + e.what());
  }
  validate_settings(cfg.settings);
  return cfg;
}

inline ServerConfig load_server_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path.string());
  try {
    return parse_server_config(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
}

}  // namespace pgg
