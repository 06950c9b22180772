#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "pgg/error.hpp"
#include "pgg/money.hpp"

namespace pgg {

/// Unvalidated game parameters, as read from a file or the command line.
struct RawConfig {
  int num_players = 4;
  int num_rounds = 10;
  Money endowment = Money::euros(1);
  std::vector<Money> allowed_contributions = {Money::from_cents(0), Money::from_cents(50),
                                              Money::from_cents(100)};
  Rational multiplier = Rational(8, 5);
};

class GameConfig;
GameConfig validate_config(const RawConfig& raw);

/// Validated, immutable game parameters. Only `validate_config` builds one.
class GameConfig {
 public:
  int num_players() const noexcept { return num_players_; }
  int num_rounds() const noexcept { return num_rounds_; }
  const Money& endowment() const noexcept { return endowment_; }
  std::span<const Money> allowed_contributions() const noexcept { return allowed_; }
  const Rational& multiplier() const noexcept { return multiplier_; }

  bool is_allowed(const Money& amount) const {
    return std::binary_search(allowed_.begin(), allowed_.end(), amount);
  }

  /// Marginal per-capita return r/N of one contributed unit.
  Rational marginal_return() const { return multiplier_ / Rational(num_players_); }

  RawConfig to_raw() const {
    return RawConfig{num_players_, num_rounds_, endowment_, allowed_, multiplier_};
  }

  friend bool operator==(const GameConfig&, const GameConfig&) = default;

 private:
  friend GameConfig validate_config(const RawConfig& raw);
  GameConfig() = default;

  int num_players_ = 0;
  int num_rounds_ = 0;
  Money endowment_;
  std::vector<Money> allowed_;
  Rational multiplier_;
};

/// Checks every constraint and returns the normalized config (allowed amounts
/// sorted ascending, duplicates removed). Throws pgg::Error naming the first
/// violated constraint.
inline GameConfig validate_config(const RawConfig& raw) {
  if (raw.num_players < 3) {
    throw Error(ErrorCode::TooFewPlayers,
                "need at least 3 players, got " + std::to_string(raw.num_players));
  }
  if (raw.num_rounds < 1) {
    throw Error(ErrorCode::ZeroRounds, "need at least 1 round, got " + std::to_string(raw.num_rounds));
  }
  if (raw.multiplier <= Rational(1)) {
    throw Error(ErrorCode::NonPositiveMultiplierOrLEQ1,
                "multiplier must be greater than 1, got " + raw.multiplier.to_string());
  }
  if (raw.endowment <= Money()) {
    throw Error(ErrorCode::NonPositiveEndowment,
                "endowment must be positive, got " + raw.endowment.to_string());
  }

  std::vector<Money> allowed = raw.allowed_contributions;
  std::sort(allowed.begin(), allowed.end());
  allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
  for (const Money& a : allowed) {
    if (a.is_negative() || a > raw.endowment) {
      throw Error(ErrorCode::ContributionOutOfRange,
                  "contribution " + a.to_string() + " outside [0, " + raw.endowment.to_string() + "]");
    }
  }
  if (allowed.empty() || !allowed.front().is_zero() || allowed.back() != raw.endowment) {
    throw Error(ErrorCode::MissingZeroOrFullContribution,
                "allowed contributions must include 0 and the endowment");
  }

  GameConfig cfg;
  cfg.num_players_ = raw.num_players;
  cfg.num_rounds_ = raw.num_rounds;
  cfg.endowment_ = raw.endowment;
  cfg.allowed_ = std::move(allowed);
  cfg.multiplier_ = raw.multiplier;
  return cfg;
}

/// Four players, ten rounds, 1 EUR endowment, {0, 0.50, 1} EUR, multiplier 1.6.
inline const GameConfig& default_config() {
  static const GameConfig cfg = validate_config(RawConfig{});
  return cfg;
}

}  // namespace pgg
