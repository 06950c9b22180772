#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pgg/config.hpp"
#include "pgg/error.hpp"
#include "pgg/events.hpp"
#include "pgg/log.hpp"
#include "pgg/money.hpp"
#include "pgg/questionnaire.hpp"

namespace pgg {

/// One contribution decision by one player in one round.
struct TrialRecord {
  std::string session_id;
  PlayerId player;
  bool is_bot = false;
  int round = 0;
  std::int64_t amount_cents = 0;
  bool timed_out = false;
  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline std::vector<TrialRecord> trial_records(const LoadedLog& log) {
  std::vector<TrialRecord> out;
  std::set<int> bots;
  if (log.header) {
    for (const SeatInfo& s : log.header->seats) {
      if (s.bot) bots.insert(s.player.index);
    }
  }
  for (const SessionEvent& ev : log.events) {
    if (const auto* c = ev.as<event::ContributionSubmitted>()) {
      out.push_back({ev.session_id, c->player, bots.contains(c->player.index), c->round, c->amount_cents,
                     c->timed_out});
    }
  }
  return out;
}

/// round(100 * count / total, 1) as an integer number of tenths, half up.
inline std::int64_t percent_tenths(std::int64_t count, std::int64_t total) {
  return (2000 * count + total) / (2 * total);
}

inline std::string render_tenths(std::int64_t tenths) {
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

struct DistributionReport {
  struct Bucket {
    std::int64_t amount_cents = 0;
    std::int64_t count = 0;
    std::int64_t percent_tenths = 0;
    std::string percent() const { return render_tenths(percent_tenths); }
    friend bool operator==(const Bucket&, const Bucket&) = default;
  };
  std::vector<Bucket> buckets;
  std::int64_t total_trials = 0;
  bool include_bots = false;

  friend bool operator==(const DistributionReport&, const DistributionReport&) = default;
};

/// Counts per allowed amount. Amounts outside `allowed_cents` get their own
/// bucket rather than being dropped.
inline DistributionReport contribution_distribution(std::span<const TrialRecord> records, bool include_bots,
                                                    std::span<const std::int64_t> allowed_cents) {
  std::map<std::int64_t, std::int64_t> counts;
  for (auto a : allowed_cents) counts[a] = 0;
  DistributionReport report;
  report.include_bots = include_bots;
  for (const TrialRecord& r : records) {
    if (r.is_bot && !include_bots) continue;
    ++counts[r.amount_cents];
    ++report.total_trials;
  }
  if (report.total_trials == 0) throw Error(ErrorCode::NoTrials, "no trials after filtering");
  for (const auto& [amount, count] : counts) {
    report.buckets.push_back({amount, count, percent_tenths(count, report.total_trials)});
  }
  return report;
}

inline DistributionReport contribution_distribution(std::span<const TrialRecord> records, bool include_bots,
                                                    const GameConfig& config) {
  std::vector<std::int64_t> allowed;
  for (const Money& m : config.allowed_contributions()) allowed.push_back(m.to_cents());
  return contribution_distribution(records, include_bots, allowed);
}

struct RoundMean {
  int round = 0;
  Rational mean_cents;
  std::int64_t trials = 0;
  std::string rendered() const { return render_decimal(mean_cents, 2).text; }
  friend bool operator==(const RoundMean&, const RoundMean&) = default;
};

/// Mean contribution per round over the filtered records.
inline std::vector<RoundMean> per_round_series(std::span<const TrialRecord> records, bool include_bots) {
  std::map<int, std::pair<std::int64_t, std::int64_t>> sums;  // round -> (sum, count)
  for (const TrialRecord& r : records) {
    if (r.is_bot && !include_bots) continue;
    auto& [sum, count] = sums[r.round];
    sum += r.amount_cents;
    ++count;
  }
  if (sums.empty()) throw Error(ErrorCode::NoTrials, "no trials after filtering");
  const int first = sums.begin()->first;
  const int last = sums.rbegin()->first;
  if (last - first + 1 != static_cast<int>(sums.size())) {
    throw Error(ErrorCode::InvalidArgument, "records do not cover a contiguous range of rounds");
  }
  std::vector<RoundMean> out;
  for (const auto& [round, sc] : sums) out.push_back({round, Rational(sc.first, sc.second), sc.second});
  return out;
}

struct QuestionnaireSummary {
  struct RoleShare {
    Role role;
    std::int64_t count = 0;
    std::int64_t percent_tenths = 0;
    std::string percent() const { return render_tenths(percent_tenths); }
  };
  Rational generosity_mean;
  double generosity_sd = 0.0;
  bool sd_is_sample = true;  // n - 1 denominator
  bool sd_defined = true;    // false when n == 1 (reported as 0.0)
  std::vector<RoleShare> roles;  // all six roles, in canonical order
  std::int64_t n = 0;
};

inline QuestionnaireSummary questionnaire_summary(std::span<const QuestionnaireResponse> responses) {
  if (responses.empty()) throw Error(ErrorCode::NoResponses, "no questionnaire responses");
  QuestionnaireSummary s;
  s.n = static_cast<std::int64_t>(responses.size());

  Rational sum;
  for (const auto& r : responses) sum += Rational(r.generosity);
  s.generosity_mean = sum / Rational(s.n);

  if (s.n > 1) {
    Rational squares;
    for (const auto& r : responses) {
      Rational d = Rational(r.generosity) - s.generosity_mean;
      squares += d * d;
    }
    s.generosity_sd = std::sqrt((squares / Rational(s.n - 1)).to_double());
  } else {
    s.sd_defined = false;
  }

  for (Role role : kAllRoles) {
    const auto count = std::count_if(responses.begin(), responses.end(),
                                     [&](const QuestionnaireResponse& r) { return r.perceived_role == role; });
    s.roles.push_back({role, count, percent_tenths(count, s.n)});
  }
  return s;
}

inline std::vector<QuestionnaireResponse> questionnaire_responses(const LoadedLog& log) {
  std::vector<QuestionnaireResponse> out;
  for (const SessionEvent& ev : log.events) {
    if (const auto* q = ev.as<event::QuestionnaireSubmitted>()) out.push_back(q->answers);
  }
  return out;
}

}  // namespace pgg
