#pragma once

#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "pgg/config.hpp"
#include "pgg/error.hpp"
#include "pgg/game.hpp"
#include "pgg/money.hpp"

// Integer encodings shared by the wire protocol and the event log:
// contributions and config amounts in cents, computed quantities in milli-euros.

namespace pgg {

inline std::vector<std::int64_t> to_cents(std::span<const Money> amounts) {
  std::vector<std::int64_t> out;
  out.reserve(amounts.size());
  for (const Money& m : amounts) out.push_back(m.to_cents());
  return out;
}

inline std::vector<std::int64_t> to_milli(std::span<const Money> amounts) {
  std::vector<std::int64_t> out;
  out.reserve(amounts.size());
  for (const Money& m : amounts) out.push_back(m.to_milli());
  return out;
}

inline std::vector<Money> from_cents(const std::vector<std::int64_t>& cents) {
  std::vector<Money> out;
  out.reserve(cents.size());
  for (auto c : cents) out.push_back(Money::from_cents(c));
  return out;
}

inline std::vector<Money> from_milli(const std::vector<std::int64_t>& milli) {
  std::vector<Money> out;
  out.reserve(milli.size());
  for (auto m : milli) out.push_back(Money::from_milli(m));
  return out;
}

inline nlohmann::json config_to_json(const GameConfig& cfg) {
  return {
      {"num_players", cfg.num_players()},
      {"num_rounds", cfg.num_rounds()},
      {"endowment_cents", cfg.endowment().to_cents()},
      {"allowed_cents", to_cents(cfg.allowed_contributions())},
      {"multiplier", cfg.multiplier().to_string()},
  };
}

inline GameConfig config_from_json(const nlohmann::json& j) {
  try {
    RawConfig raw;
    raw.num_players = j.at("num_players").get<int>();
    raw.num_rounds = j.at("num_rounds").get<int>();
    raw.endowment = Money::from_cents(j.at("endowment_cents").get<std::int64_t>());
    raw.allowed_contributions = from_cents(j.at("allowed_cents").get<std::vector<std::int64_t>>());
    raw.multiplier = Rational::parse(j.at("multiplier").get<std::string>());
    return validate_config(raw);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad game config: ") + e.what());
  }
}

/// Throws NotRepresentable unless every amount the game can produce is a whole
/// number of cents (inputs) or milli-euros (pool, share, payoffs, totals).
inline void require_wire_representable(const GameConfig& cfg) {
  cfg.endowment().to_cents();
  for (const Money& a : cfg.allowed_contributions()) a.to_cents();

  std::set<Money> pools = {Money()};
  for (int p = 0; p < cfg.num_players(); ++p) {
    std::set<Money> next;
    for (const Money& pool : pools) {
      for (const Money& a : cfg.allowed_contributions()) next.insert(pool + a);
    }
    pools = std::move(next);
  }
  for (const Money& pool : pools) {
    Money multiplied = pool * cfg.multiplier();
    Money share = multiplied / cfg.num_players();
    if (!multiplied.exact_milli() || !share.exact_milli()) {
      throw Error(ErrorCode::NotRepresentable,
                  "multiplier " + cfg.multiplier().to_string() + " gives share " +
                      share.value().to_string() + " EUR for pool " + pool.to_string() +
                      " EUR, which is not a whole number of milli-euros");
    }
  }
}

}  // namespace pgg
