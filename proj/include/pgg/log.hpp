#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pgg/error.hpp"
#include "pgg/events.hpp"
#include "pgg/game.hpp"

namespace pgg {

/// Destination for newline-delimited session events.
class LogSink {
 public:
  virtual ~LogSink() = default;
  /// Writes one line and flushes it. Throws SinkUnavailable on failure.
  virtual void write_line(std::string_view line) = 0;
};

class MemoryLogSink final : public LogSink {
 public:
  void write_line(std::string_view line) override { lines_.emplace_back(line); }
  const std::vector<std::string>& lines() const noexcept { return lines_; }

 private:
  std::vector<std::string> lines_;
};

/// Append-only file sink. Refuses to open a file that already exists so a
/// previous session's data is never mixed in or truncated.
class FileLogSink final : public LogSink {
 public:
  explicit FileLogSink(std::filesystem::path path) : path_(std::move(path)) {
    std::error_code ec;
    if (std::filesystem::exists(path_, ec)) {
      throw Error(ErrorCode::SinkUnavailable, path_.string() + " already exists");
    }
    out_.open(path_, std::ios::out | std::ios::app | std::ios::binary);
    if (!out_) throw Error(ErrorCode::SinkUnavailable, "cannot open " + path_.string());
  }

  void write_line(std::string_view line) override {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw Error(ErrorCode::SinkUnavailable, "write to " + path_.string() + " failed");
  }

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct LogAck {
  std::size_t bytes = 0;
};

inline LogAck append_log(LogSink& sink, const SessionEvent& event) {
  std::string line = to_json(event).dump();
  sink.write_line(line);
  return {line.size() + 1};
}

struct LoadedLog {
  std::optional<event::SessionStarted> header;
  std::vector<SessionEvent> events;

  const GameConfig* config() const { return header ? &header->config : nullptr; }
};

/// Strict parse of a session log. Every non-empty line must be a complete
/// event; the first failure throws MalformedLine with its 1-based line number.
inline LoadedLog load_log(std::istream& in) {
  LoadedLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      SessionEvent ev = event_from_json(nlohmann::json::parse(line));
      if (const auto* started = ev.as<event::SessionStarted>()) {
        if (log.header) {
          throw Error(ErrorCode::InvalidArgument, "second session_started record");
        }
        log.header = *started;
      }
      log.events.push_back(std::move(ev));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SchemaVersionMismatch) throw;
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": " + e.detail());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

inline LoadedLog load_log_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path.string());
  return load_log(in);
}

/// Rebuilds the game contribution by contribution through the rules engine
/// and checks every logged reveal against the recomputation.
inline GameHistory replay(const LoadedLog& log) {
  if (!log.header) throw Error(ErrorCode::ReplayMismatch, "log has no session_started record");
  const GameConfig& cfg = log.header->config;
  GameHistory history(cfg);
  std::vector<std::optional<Money>> pending(static_cast<std::size_t>(cfg.num_players()));

  for (const SessionEvent& ev : log.events) {
    if (const auto* c = ev.as<event::ContributionSubmitted>()) {
      if (c->round != static_cast<int>(history.rounds().size())) {
        throw Error(ErrorCode::ReplayMismatch, "contribution for round " + std::to_string(c->round) +
                                                   " while replaying round " +
                                                   std::to_string(history.rounds().size()));
      }
      auto& slot = pending.at(static_cast<std::size_t>(c->player.index));
      if (slot) throw Error(ErrorCode::ReplayMismatch, "two contributions from " + to_string(c->player));
      slot = Money::from_cents(c->amount_cents);
    } else if (const auto* r = ev.as<event::RoundRevealed>()) {
      std::vector<Money> amounts;
      for (auto& p : pending) {
        if (!p) throw Error(ErrorCode::ReplayMismatch, "reveal before every contribution was logged");
        amounts.push_back(*p);
        p.reset();
      }
      RoundResult recomputed = resolve_round(amounts, cfg, static_cast<int>(history.rounds().size()));
      history = apply_round(std::move(history), recomputed);
      if (!(recomputed == r->result) || history.cumulative_scores() != r->cumulative) {
        throw Error(ErrorCode::ReplayMismatch,
                    "logged reveal of round " + std::to_string(r->result.round_index) +
                        " disagrees with recomputation");
      }
    } else if (const auto* g = ev.as<event::GameOver>()) {
      if (g->final_scores != final_scores(history)) {
        throw Error(ErrorCode::ReplayMismatch, "logged final scores disagree with recomputation");
      }
    }
  }
  return history;
}

}  // namespace pgg
