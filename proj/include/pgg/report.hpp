#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pgg/analysis.hpp"
#include "pgg/money.hpp"
#include "pgg/simulate.hpp"

// Plain-text and JSON renderings of the analysis reports.

namespace pgg::report {

namespace detail {

/// Left-aligned columns padded to the widest cell.
inline std::string table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
    }
    out << line << '\n';
  }
  return out.str();
}

inline std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace detail

inline std::string text(const DistributionReport& r) {
  std::vector<std::vector<std::string>> rows{{"amount_eur", "count", "percent"}};
  for (const auto& b : r.buckets) {
    rows.push_back({Money::from_cents(b.amount_cents).render().text, std::to_string(b.count), b.percent()});
  }
  return detail::table(rows) + "total_trials " + std::to_string(r.total_trials) +
         (r.include_bots ? " (bots included)\n" : " (humans only)\n");
}

inline nlohmann::json json(const DistributionReport& r) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : r.buckets) {
    buckets.push_back({{"amount_cents", b.amount_cents}, {"count", b.count}, {"percent", b.percent()}});
  }
  return {{"report", "dist"}, {"total_trials", r.total_trials}, {"include_bots", r.include_bots}, {"buckets", buckets}};
}

inline std::string text(const std::vector<RoundMean>& series) {
  std::vector<std::vector<std::string>> rows{{"round", "mean_cents", "trials"}};
  for (const auto& m : series) rows.push_back({std::to_string(m.round), m.rendered(), std::to_string(m.trials)});
  return detail::table(rows);
}

inline nlohmann::json json(const std::vector<RoundMean>& series, bool include_bots) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& m : series) {
    rounds.push_back({{"round", m.round},
                      {"mean_cents", m.rendered()},
                      {"mean_cents_exact", m.mean_cents.to_string()},
                      {"trials", m.trials}});
  }
  return {{"report", "rounds"}, {"include_bots", include_bots}, {"rounds", rounds}};
}

inline std::string text(const QuestionnaireSummary& s) {
  std::ostringstream out;
  out << "n " << s.n << '\n';
  out << "generosity_mean " << render_decimal(s.generosity_mean, 3).text << '\n';
  out << "generosity_sd " << detail::fixed(s.generosity_sd, 3) << " (sample, n-1)"
      << (s.sd_defined ? "" : " undefined for n=1") << '\n';
  std::vector<std::vector<std::string>> rows{{"role", "count", "percent"}};
  for (const auto& r : s.roles) rows.push_back({std::string(to_string(r.role)), std::to_string(r.count), r.percent()});
  out << detail::table(rows);
  return out.str();
}

inline nlohmann::json json(const QuestionnaireSummary& s) {
  nlohmann::json roles = nlohmann::json::object();
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& r : s.roles) {
    roles[std::string(to_string(r.role))] = r.percent();
    counts[std::string(to_string(r.role))] = r.count;
  }
  return {{"report", "questionnaire"},
          {"n", s.n},
          {"generosity_mean", render_decimal(s.generosity_mean, 3).text},
          {"generosity_sd", detail::fixed(s.generosity_sd, 3)},
          {"sd_kind", s.sd_is_sample ? "sample" : "population"},
          {"sd_defined", s.sd_defined},
          {"role_percentages", roles},
          {"role_counts", counts}};
}

inline std::string text(const SimulationResult& r) {
  std::vector<std::vector<std::string>> rows{{"strategy", "mean_final_eur"}};
  for (const auto& [tok, score] : r.mean_final_scores) {
    auto rendered = score.render(3);
    rows.push_back({tok, rendered.text + (rendered.exact ? "" : " (rounded)")});
  }
  return "games " + std::to_string(r.games.size()) + "\n" + detail::table(rows) + text(r.distribution);
}

inline nlohmann::json json(const SimulationResult& r) {
  nlohmann::json means = nlohmann::json::object();
  for (const auto& [tok, score] : r.mean_final_scores) {
    means[tok] = {{"rendered", score.render(3).text}, {"exact", score.value().to_string()}};
  }
  return {{"report", "simulate"},
          {"games", r.games.size()},
          {"mean_final_scores_eur", means},
          {"distribution", json(r.distribution)}};
}

}  // namespace pgg::report
