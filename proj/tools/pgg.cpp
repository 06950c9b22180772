#include <algorithm>
#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pgg/analysis.hpp"
#include "pgg/log.hpp"
#include "pgg/net/client.hpp"
#include "pgg/net/server.hpp"
#include "pgg/report.hpp"
#include "pgg/server_config.hpp"
#include "pgg/simulate.hpp"

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

void write_json(const std::string& target, const nlohmann::json& doc) {
  if (target.empty()) return;
  if (target == "-") {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(target);
  if (!out) throw pgg::Error(pgg::ErrorCode::InvalidArgument, "cannot write " + target);
  out << doc.dump(2) << '\n';
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(tok);
  return out;
}

/// A single log file, or every *.ndjson file in a directory (sorted by name).
std::vector<fs::path> log_files(const fs::path& where) {
  if (!fs::is_directory(where)) return {where};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(where)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ndjson") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw pgg::Error(pgg::ErrorCode::NoTrials, "no .ndjson logs in " + where.string());
  return files;
}

struct ServeArgs {
  std::string config;
  std::string listen;
  std::string log_dir;
  std::uint64_t seed = 0;
  unsigned threads = 2;
};

int serve(const ServeArgs& a) {
  pgg::ServerConfig cfg = a.config.empty() ? pgg::ServerConfig{} : pgg::load_server_config(a.config);
  if (!a.listen.empty()) cfg.listen = a.listen;
  if (!a.log_dir.empty()) cfg.log_dir = a.log_dir;

  pgg::net::Server server(cfg, a.seed, a.threads);
  server.start();
  const auto ep = pgg::net::parse_endpoint(cfg.listen);
  std::cout << "listening on " << ep.host << ":" << server.port() << std::endl;
  for (const auto& s : cfg.sessions) std::cout << "session " << s << " -> " << (fs::path(cfg.log_dir) / (s + ".ndjson")).string() << std::endl;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!server.wait_all_closed(std::chrono::milliseconds(200))) {
    if (g_interrupted) {
      std::cout << "interrupted" << std::endl;
      server.stop();
      return 130;
    }
  }
  for (const auto& o : server.outcomes()) {
    std::cout << "session " << o.session_id << (o.completed ? " completed" : " closed early");
    for (const auto& m : o.final_scores) std::cout << ' ' << m.render(3).text;
    std::cout << std::endl;
  }
  server.stop();
  return 0;
}

struct SimulateArgs {
  std::string players;
  int rounds = 10;
  std::string multiplier = "1.6";
  std::string endowment = "1.00";
  int games = 1;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 0;
  std::string json_out;
};

int simulate(const SimulateArgs& a) {
  pgg::RawConfig raw;
  raw.num_rounds = a.rounds;
  raw.multiplier = pgg::Rational::parse(a.multiplier);
  raw.endowment = pgg::Money::parse(a.endowment);
  raw.allowed_contributions = {pgg::Money(), raw.endowment / 2, raw.endowment};

  pgg::TournamentSpec spec;
  spec.seat_strategies = split_tokens(a.players);
  raw.num_players = static_cast<int>(spec.seat_strategies.size());
  spec.config = pgg::validate_config(raw);
  spec.games = a.games;
  spec.seed = a.seed;
  spec.threads = a.threads;

  pgg::SimulationResult result = pgg::simulate(spec);
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    for (std::size_t g = 0; g < result.games.size(); ++g) {
      pgg::FileLogSink sink(fs::path(a.out) / (pgg::simulated_session_id(static_cast<int>(g)) + ".ndjson"));
      for (const auto& line : result.games[g].log_lines) sink.write_line(line);
    }
  }
  std::cout << pgg::report::text(result);
  write_json(a.json_out, pgg::report::json(result));
  return 0;
}

struct AnalyzeArgs {
  std::string log;
  std::string report = "dist";
  bool include_bots = false;
  std::string json_out;
};

int analyze(const AnalyzeArgs& a) {
  std::vector<pgg::TrialRecord> records;
  std::vector<pgg::QuestionnaireResponse> responses;
  std::vector<std::int64_t> allowed;
  for (const auto& path : log_files(a.log)) {
    pgg::LoadedLog log = pgg::load_log_file(path);
    auto r = pgg::trial_records(log);
    records.insert(records.end(), r.begin(), r.end());
    auto q = pgg::questionnaire_responses(log);
    responses.insert(responses.end(), q.begin(), q.end());
    if (const pgg::GameConfig* cfg = log.config()) {
      for (const auto& m : cfg->allowed_contributions()) allowed.push_back(m.to_cents());
    }
  }
  std::sort(allowed.begin(), allowed.end());
  allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());

  if (a.report == "dist") {
    auto report = pgg::contribution_distribution(records, a.include_bots, allowed);
    std::cout << pgg::report::text(report);
    write_json(a.json_out, pgg::report::json(report));
  } else if (a.report == "rounds") {
    auto series = pgg::per_round_series(records, a.include_bots);
    std::cout << pgg::report::text(series);
    write_json(a.json_out, pgg::report::json(series, a.include_bots));
  } else {
    auto summary = pgg::questionnaire_summary(responses);
    std::cout << pgg::report::text(summary);
    write_json(a.json_out, pgg::report::json(summary));
  }
  return 0;
}

struct BotArgs {
  std::string connect;
  std::string session;
  std::string strategy;
  std::uint64_t seed = 0;
  std::string name = "bot";
  std::vector<std::int64_t> think_ms;
};

int bot(const BotArgs& a) {
  pgg::make_strategy(a.strategy, a.seed);
  pgg::net::WsClient client(pgg::net::parse_endpoint(a.connect));
  pgg::net::BotOptions opts;
  opts.name = a.name;
  if (a.think_ms.size() == 2) opts.think = {a.think_ms[0], a.think_ms[1]};
  pgg::net::BotReport report = pgg::net::run_bot_client(client, a.session, a.strategy, a.seed, opts);
  std::cout << "seat " << report.player.index << (report.finished ? " finished" : " disconnected");
  for (const auto& m : report.final_scores) std::cout << ' ' << m.render(3).text;
  std::cout << std::endl;
  for (const auto& e : report.errors) std::cerr << "server error " << e.code << ": " << e.message << '\n';
  return report.finished ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Public goods game: experiment server, bots, simulation and log analysis"};
  app.require_subcommand(1);

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the WebSocket game server");
  serve_cmd->add_option("--config", serve_args.config, "Server configuration (JSON)")->check(CLI::ExistingFile);
  serve_cmd->add_option("--listen", serve_args.listen, "host:port, overrides the config");
  serve_cmd->add_option("--log-dir", serve_args.log_dir, "Directory for session logs, overrides the config");
  serve_cmd->add_option("--seed", serve_args.seed, "Seed for bot seats and persona actions");
  serve_cmd->add_option("--threads", serve_args.threads, "I/O threads")->check(CLI::PositiveNumber);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Play all-bot games without the network");
  sim_cmd->add_option("--players", sim_args.players, "Comma-separated strategy tokens, one per seat (ac, afr, tft)")
      ->required();
  sim_cmd->add_option("--rounds", sim_args.rounds, "Rounds per game");
  sim_cmd->add_option("--multiplier", sim_args.multiplier, "Pool multiplier, decimal or fraction");
  sim_cmd->add_option("--endowment", sim_args.endowment, "Per-round endowment in EUR");
  sim_cmd->add_option("--games", sim_args.games, "Number of games");
  sim_cmd->add_option("--seed", sim_args.seed, "Tournament seed");
  sim_cmd->add_option("--threads", sim_args.threads, "Worker threads (0 = all cores)");
  sim_cmd->add_option("--out", sim_args.out, "Write one log per game into this directory");
  sim_cmd->add_option("--json-out", sim_args.json_out, "Also write the report as JSON (- for stdout)");

  AnalyzeArgs an_args;
  auto* an_cmd = app.add_subcommand("analyze", "Summarize session logs");
  an_cmd->add_option("--log", an_args.log, "Log file or directory of logs")->required()->check(CLI::ExistingPath);
  an_cmd->add_option("--report", an_args.report, "dist, rounds or questionnaire")
      ->check(CLI::IsMember({"dist", "rounds", "questionnaire"}));
  an_cmd->add_flag("--include-bots", an_args.include_bots, "Count bot seats too");
  an_cmd->add_option("--json-out", an_args.json_out, "Also write the report as JSON (- for stdout)");

  BotArgs bot_args;
  auto* bot_cmd = app.add_subcommand("bot", "Headless network player");
  bot_cmd->add_option("--connect", bot_args.connect, "Server host:port")->required();
  bot_cmd->add_option("--session", bot_args.session, "Session id")->required();
  bot_cmd->add_option("--strategy", bot_args.strategy, "ac, afr or tft")->required();
  bot_cmd->add_option("--seed", bot_args.seed, "Bot seed");
  bot_cmd->add_option("--name", bot_args.name, "Display name");
  bot_cmd->add_option("--think-ms", bot_args.think_ms, "Delay window min,max before each contribution")
      ->expected(2)
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(serve_args);
    if (*sim_cmd) return simulate(sim_args);
    if (*an_cmd) return analyze(an_args);
    if (*bot_cmd) return bot(bot_args);
  } catch (const pgg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
