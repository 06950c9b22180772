#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "pgg/analysis.hpp"
#include "pgg/config.hpp"
#include "pgg/error.hpp"
#include "pgg/host.hpp"
#include "pgg/log.hpp"
#include "pgg/session.hpp"
#include "pgg/strategy.hpp"

namespace pgg {

struct TournamentSpec {
  GameConfig config = default_config();
  std::vector<std::string> seat_strategies;  // one token per seat
  int games = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency; results do not depend on it
};

struct SimulatedGame {
  std::vector<std::string> log_lines;
  std::vector<Money> final_scores;
  std::vector<TrialRecord> records;
};

struct SimulationResult {
  std::vector<SimulatedGame> games;
  DistributionReport distribution;                 // all seats, bots included
  std::map<std::string, Money> mean_final_scores;  // strategy token -> mean over its seats and games
};

inline std::string simulated_session_id(int game) {
  std::string n = std::to_string(game);
  return "sim-" + std::string(n.size() < 5 ? 5 - n.size() : 0, '0') + n;
}

/// Plays one all-bot game through the session state machine on virtual time.
inline SimulatedGame simulate_game(const TournamentSpec& spec, int game) {
  SessionSettings settings;
  settings.game = spec.config;
  for (const auto& tok : spec.seat_strategies) settings.seats.push_back({true, tok, ""});

  const std::string id = simulated_session_id(game);
  MemoryLogSink sink;
  LocalRunner runner(Session(id, settings, Rng::derive(spec.seed, static_cast<std::uint64_t>(game))), sink);
  runner.start();
  runner.run_until_idle();
  if (!runner.session().closed() || !runner.session().history().complete()) {
    throw Error(ErrorCode::InvalidArgument, "simulated game " + std::to_string(game) + " did not finish");
  }

  SimulatedGame out;
  out.log_lines = sink.lines();
  out.final_scores = final_scores(runner.session().history());
  for (const RoundResult& r : runner.session().history().rounds()) {
    for (std::size_t i = 0; i < r.contributions.size(); ++i) {
      out.records.push_back({id, PlayerId{static_cast<int>(i)}, true, r.round_index,
                             r.contributions[i].to_cents(), false});
    }
  }
  return out;
}

/// Runs `spec.games` independent games. Game g uses seed derive(spec.seed, g),
/// so serial and parallel execution give identical results.
inline SimulationResult simulate(const TournamentSpec& spec) {
  if (static_cast<int>(spec.seat_strategies.size()) != spec.config.num_players()) {
    throw Error(ErrorCode::InvalidArgument, "need one strategy per seat (" +
                                                std::to_string(spec.config.num_players()) + ")");
  }
  for (const auto& tok : spec.seat_strategies) make_strategy(tok, 0);
  if (spec.games < 1) throw Error(ErrorCode::InvalidArgument, "games must be >= 1");
  require_wire_representable(spec.config);

  SimulationResult result;
  result.games.resize(static_cast<std::size_t>(spec.games));

  unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(spec.games));
  if (workers <= 1) {
    for (int g = 0; g < spec.games; ++g) result.games[static_cast<std::size_t>(g)] = simulate_game(spec, g);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int g = next++; g < spec.games && !failed; g = next++) {
          try {
            result.games[static_cast<std::size_t>(g)] = simulate_game(spec, g);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<TrialRecord> all;
  std::map<std::string, std::pair<Money, std::int64_t>> totals;
  for (const SimulatedGame& g : result.games) {
    all.insert(all.end(), g.records.begin(), g.records.end());
    for (std::size_t i = 0; i < g.final_scores.size(); ++i) {
      auto token_key = std::string(token(make_strategy(spec.seat_strategies[i], 0).kind));
      auto& [sum, count] = totals[token_key];
      sum += g.final_scores[i];
      ++count;
    }
  }
  result.distribution = contribution_distribution(all, true, spec.config);
  for (const auto& [tok, sc] : totals) result.mean_final_scores.emplace(tok, sc.first / sc.second);
  return result;
}

}  // namespace pgg
