#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pgg/config.hpp"
#include "pgg/error.hpp"
#include "pgg/money.hpp"

namespace pgg {

struct PlayerId {
  int index = 0;
  friend auto operator<=>(const PlayerId&, const PlayerId&) = default;
};

inline std::string to_string(PlayerId p) { return "player " + std::to_string(p.index); }

using ContributionMap = std::map<PlayerId, Money>;

/// Outcome of one resolved round. Vectors are indexed by PlayerId::index.
struct RoundResult {
  int round_index = 0;
  std::vector<Money> contributions;
  Money pool;
  Money multiplied_pool;
  Money share;
  std::vector<Money> payoffs;

  friend bool operator==(const RoundResult&, const RoundResult&) = default;
};

/// Single-round payoff of a player contributing `own` when the pool totals `pool`.
inline Money round_payoff(const GameConfig& config, const Money& own, const Money& pool) {
  return (config.endowment() - own) + pool * config.multiplier() / config.num_players();
}

/// Resolves one round. `contributions` holds one amount per player in seat order.
inline RoundResult resolve_round(std::span<const Money> contributions, const GameConfig& config,
                                 int round_index) {
  const auto n = static_cast<std::size_t>(config.num_players());
  if (contributions.size() < n) {
    throw Error(ErrorCode::MissingContribution,
                to_string(PlayerId{static_cast<int>(contributions.size())}) + " has no contribution");
  }
  if (contributions.size() > n) {
    throw Error(ErrorCode::InvalidArgument, "more contributions than players");
  }

  RoundResult r;
  r.round_index = round_index;
  r.contributions.assign(contributions.begin(), contributions.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (!config.is_allowed(contributions[i])) {
      throw Error(ErrorCode::IllegalAmount, to_string(PlayerId{static_cast<int>(i)}) + " played " +
                                                contributions[i].to_string() + " EUR");
    }
    r.pool += contributions[i];
  }
  r.multiplied_pool = r.pool * config.multiplier();
  r.share = r.multiplied_pool / config.num_players();
  r.payoffs.reserve(n);
  for (const Money& c : contributions) r.payoffs.push_back(config.endowment() - c + r.share);
  return r;
}

inline RoundResult resolve_round(const ContributionMap& contributions, const GameConfig& config,
                                 int round_index) {
  std::vector<Money> seated;
  seated.reserve(static_cast<std::size_t>(config.num_players()));
  for (int i = 0; i < config.num_players(); ++i) {
    auto it = contributions.find(PlayerId{i});
    if (it == contributions.end()) {
      throw Error(ErrorCode::MissingContribution, to_string(PlayerId{i}) + " has no contribution");
    }
    seated.push_back(it->second);
  }
  if (contributions.size() != seated.size()) {
    throw Error(ErrorCode::InvalidArgument, "contribution for a player outside the game");
  }
  return resolve_round(std::span<const Money>(seated), config, round_index);
}

/// Rounds played so far plus running totals. Value type: apply_round returns a copy.
class GameHistory {
 public:
  explicit GameHistory(GameConfig config)
      : config_(std::move(config)),
        cumulative_(static_cast<std::size_t>(config_.num_players())) {}

  const GameConfig& config() const noexcept { return config_; }
  const std::vector<RoundResult>& rounds() const noexcept { return rounds_; }
  const std::vector<Money>& cumulative_scores() const noexcept { return cumulative_; }
  bool complete() const noexcept {
    return static_cast<int>(rounds_.size()) == config_.num_rounds();
  }

  friend GameHistory apply_round(GameHistory history, const RoundResult& result);

  friend bool operator==(const GameHistory&, const GameHistory&) = default;

 private:
  GameConfig config_;
  std::vector<RoundResult> rounds_;
  std::vector<Money> cumulative_;
};

inline GameHistory apply_round(GameHistory history, const RoundResult& result) {
  if (history.complete()) {
    throw Error(ErrorCode::GameAlreadyComplete,
                "all " + std::to_string(history.config_.num_rounds()) + " rounds already played");
  }
  if (result.round_index != static_cast<int>(history.rounds_.size())) {
    throw Error(ErrorCode::RoundIndexMismatch,
                "expected round " + std::to_string(history.rounds_.size()) + ", got " +
                    std::to_string(result.round_index));
  }
  if (result.payoffs.size() != history.cumulative_.size()) {
    throw Error(ErrorCode::InvalidArgument, "round result has the wrong number of players");
  }
  for (std::size_t i = 0; i < result.payoffs.size(); ++i) history.cumulative_[i] += result.payoffs[i];
  history.rounds_.push_back(result);
  return history;
}

inline const std::vector<Money>& final_scores(const GameHistory& history) {
  if (!history.complete()) {
    throw Error(ErrorCode::GameNotComplete, std::to_string(history.rounds().size()) + " of " +
                                                std::to_string(history.config().num_rounds()) +
                                                " rounds played");
  }
  return history.cumulative_scores();
}

/// The allowed contribution maximizing the decider's single-round payoff
/// given everyone else's amounts. Ties go to the smaller contribution.
inline Money best_response(std::span<const Money> others, const GameConfig& config) {
  if (static_cast<int>(others.size()) != config.num_players() - 1) {
    throw Error(ErrorCode::InvalidArgument, "best_response needs num_players - 1 co-player amounts");
  }
  Money others_total;
  for (const Money& m : others) {
    if (!config.is_allowed(m)) throw Error(ErrorCode::IllegalAmount, m.to_string() + " EUR");
    others_total += m;
  }
  const auto allowed = config.allowed_contributions();
  Money best = allowed.front();
  Money best_payoff = round_payoff(config, best, others_total + best);
  for (const Money& c : allowed.subspan(1)) {
    Money p = round_payoff(config, c, others_total + c);
    if (p > best_payoff) {
      best = c;
      best_payoff = p;
    }
  }
  return best;
}

}  // namespace pgg
