#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgg/config.hpp"
#include "pgg/error.hpp"
#include "pgg/game.hpp"
#include "pgg/money.hpp"
#include "pgg/rng.hpp"

namespace pgg {

enum class StrategyKind { AlwaysCooperate, AlwaysFreeRide, TitForTat };

/// How tit-for-tat folds the co-players' previous amounts into one target.
enum class TftAggregation { Mean, Min, Max };

constexpr std::string_view token(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::AlwaysCooperate: return "ac";
    case StrategyKind::AlwaysFreeRide: return "afr";
    case StrategyKind::TitForTat: return "tft";
  }
  return "?";
}

struct StrategyState {
  StrategyKind kind = StrategyKind::AlwaysCooperate;
  std::uint64_t rng_seed = 0;  // unused by the shipped kinds
  TftAggregation aggregation = TftAggregation::Mean;

  friend bool operator==(const StrategyState&, const StrategyState&) = default;
};

inline StrategyState make_strategy(std::string_view kind_token, std::uint64_t seed) {
  std::string lower(kind_token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto kind : {StrategyKind::AlwaysCooperate, StrategyKind::AlwaysFreeRide, StrategyKind::TitForTat}) {
    if (lower == token(kind)) return StrategyState{kind, seed, TftAggregation::Mean};
  }
  throw Error(ErrorCode::UnknownStrategyToken, "unknown strategy '" + std::string(kind_token) +
                                                   "' (expected ac, afr or tft)");
}

/// Nearest allowed amount to `target`; an exact midpoint goes to the larger one.
inline Money snap_to_allowed(const Rational& target, std::span<const Money> allowed) {
  if (allowed.empty()) throw Error(ErrorCode::EmptyAllowedSet, "no allowed contributions");
  auto distance = [&](const Money& m) {
    Rational d = m.value() - target;
    return d.is_negative() ? -d : d;
  };
  Money best = allowed.front();
  Rational best_d = distance(best);
  for (const Money& m : allowed.subspan(1)) {
    Rational d = distance(m);
    if (d < best_d || (d == best_d && m > best)) {
      best = m;
      best_d = d;
    }
  }
  return best;
}

/// Contribution the bot in seat `self` makes for the next round of `history`.
inline Money decide(const StrategyState& state, const GameHistory& history, PlayerId self) {
  const GameConfig& cfg = history.config();
  if (self.index < 0 || self.index >= cfg.num_players()) {
    throw Error(ErrorCode::InvalidArgument, to_string(self) + " is not seated");
  }
  const auto allowed = cfg.allowed_contributions();
  if (allowed.empty()) throw Error(ErrorCode::EmptyAllowedSet, "no allowed contributions");

  switch (state.kind) {
    case StrategyKind::AlwaysCooperate:
      return cfg.endowment();
    case StrategyKind::AlwaysFreeRide:
      return Money();
    case StrategyKind::TitForTat: {
      if (history.rounds().empty()) return cfg.endowment();
      const RoundResult& last = history.rounds().back();
      std::vector<Rational> others;
      for (int i = 0; i < cfg.num_players(); ++i) {
        if (i != self.index) others.push_back(last.contributions[static_cast<std::size_t>(i)].value());
      }
      Rational target;
      switch (state.aggregation) {
        case TftAggregation::Mean: {
          Rational sum;
          for (const Rational& r : others) sum += r;
          target = sum / Rational(static_cast<std::int64_t>(others.size()));
          break;
        }
        case TftAggregation::Min:
          target = *std::min_element(others.begin(), others.end());
          break;
        case TftAggregation::Max:
          target = *std::max_element(others.begin(), others.end());
          break;
      }
      return snap_to_allowed(target, allowed);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled strategy kind");
}

// Persona behavior

struct PersonaAction {
  std::string action_id;
  friend bool operator==(const PersonaAction&, const PersonaAction&) = default;
};

/// Inclusive delay range in milliseconds.
struct DelayWindow {
  std::int64_t min_ms = 2000;
  std::int64_t max_ms = 8000;
  friend bool operator==(const DelayWindow&, const DelayWindow&) = default;
};

struct TimedAction {
  PersonaAction action;
  std::int64_t delay_ms = 0;
  friend bool operator==(const TimedAction&, const TimedAction&) = default;
};

/// Draws 0..max_actions idle actions, uniformly with replacement, each with a
/// delay uniform over `window`. Returned in draw order.
inline std::vector<TimedAction> pick_idle_actions(Rng& rng, std::span<const PersonaAction> action_set,
                                                  int max_actions, DelayWindow window) {
  if (action_set.empty()) throw Error(ErrorCode::EmptyActionSet, "persona action set is empty");
  if (max_actions < 0) throw Error(ErrorCode::InvalidArgument, "max_actions must be >= 0");
  const auto count = rng.uniform(0, max_actions);
  std::vector<TimedAction> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    const auto pick = rng.uniform(0, static_cast<std::int64_t>(action_set.size()) - 1);
    const auto delay = rng.uniform(window.min_ms, window.max_ms);
    out.push_back({action_set[static_cast<std::size_t>(pick)], delay});
  }
  return out;
}

}  // namespace pgg
