#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "harness.hpp"
#include "pgg/log.hpp"
#include "pgg/simulate.hpp"

namespace pgg {
namespace {

std::vector<std::string> played_game(std::uint64_t seed, std::vector<std::string> strategies = {"tft", "ac", "afr", "tft"}) {
  TournamentSpec spec;
  spec.seat_strategies = std::move(strategies);
  spec.seed = seed;
  return simulate_game(spec, 0).log_lines;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pgg_log_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

void expect_code(const std::function<void()>& fn, ErrorCode code, const std::string& detail_part = "") {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
    if (!detail_part.empty()) {
      EXPECT_NE(e.detail().find(detail_part), std::string::npos) << e.detail();
    }
  }
}

TEST(LogTest, EveryEventRoundTrips) {
  auto lines = played_game(3);
  LoadedLog log = testing::parse_lines(lines);
  ASSERT_EQ(log.events.size(), lines.size());
  ASSERT_TRUE(log.header);
  EXPECT_EQ(log.header->config, default_config());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    EXPECT_EQ(to_json(log.events[i]).dump(), lines[i]);
    EXPECT_EQ(event_from_json(nlohmann::json::parse(lines[i])), log.events[i]);
  }
}

TEST(LogTest, AppendReportsBytesWritten) {
  MemoryLogSink sink;
  SessionEvent ev{17, "s", event::RoundStarted{3}};
  LogAck ack = append_log(sink, ev);
  ASSERT_EQ(sink.lines().size(), 1u);
  EXPECT_EQ(ack.bytes, sink.lines()[0].size() + 1);
  auto j = nlohmann::json::parse(sink.lines()[0]);
  EXPECT_EQ(j["type"], "round_started");
  EXPECT_EQ(j["ts"], 17);
  EXPECT_EQ(j["round"], 3);
}

TEST(LogTest, EmptyInputGivesEmptyLog) {
  std::istringstream in("");
  LoadedLog log = load_log(in);
  EXPECT_TRUE(log.events.empty());
  EXPECT_FALSE(log.header);
  EXPECT_EQ(log.config(), nullptr);
}

TEST(LogTest, TruncatedLineIsReportedByNumber) {
  auto lines = played_game(4);
  std::string text;
  for (std::size_t i = 0; i < 5; ++i) text += lines[i] + "\n";
  text += lines[5].substr(0, lines[5].size() / 2) + "\n";
  std::istringstream in(text);
  expect_code([&] { load_log(in); }, ErrorCode::MalformedLine, "line 6");
}

TEST(LogTest, UnknownTypeIsMalformed) {
  std::istringstream in(R"({"ts":1,"session":"s","type":"teleport"})" "\n");
  expect_code([&] { load_log(in); }, ErrorCode::MalformedLine, "line 1");
}

TEST(LogTest, SchemaMismatchIsDistinct) {
  auto lines = played_game(5);
  auto header = nlohmann::json::parse(lines[0]);
  header["schema"] = kLogSchemaVersion + 1;
  std::istringstream in(header.dump() + "\n");
  expect_code([&] { load_log(in); }, ErrorCode::SchemaVersionMismatch);
}

TEST(LogTest, EqualTimestampsKeepFileOrder) {
  std::vector<std::string> lines;
  for (int r = 0; r < 5; ++r) lines.push_back(to_json(SessionEvent{100, "s", event::RoundStarted{4 - r}}).dump());
  LoadedLog log = testing::parse_lines(lines);
  ASSERT_EQ(log.events.size(), 5u);
  for (int r = 0; r < 5; ++r) EXPECT_EQ(log.events[static_cast<std::size_t>(r)].as<event::RoundStarted>()->round, 4 - r);
}

TEST(LogTest, FileSinkRefusesExistingFile) {
  auto path = scratch("existing.ndjson");
  { std::ofstream(path) << "old\n"; }
  expect_code([&] { FileLogSink sink(path); }, ErrorCode::SinkUnavailable);
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(content, "old\n");
}

TEST(LogTest, FileSinkWritesLoadableLog) {
  auto path = scratch("fresh.ndjson");
  auto lines = played_game(6);
  {
    FileLogSink sink(path);
    for (const auto& l : lines) sink.write_line(l);
  }
  LoadedLog log = load_log_file(path);
  EXPECT_EQ(log.events.size(), lines.size());
  expect_code([&] { load_log_file(path.string() + ".missing"); }, ErrorCode::InvalidArgument);
}

TEST(ReplayTest, RecomputesLiveScores) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TournamentSpec spec;
    spec.seat_strategies = {"tft", "ac", "afr", "tft"};
    spec.seed = seed;
    SimulatedGame g = simulate_game(spec, 0);
    GameHistory h = replay(testing::parse_lines(g.log_lines));
    EXPECT_EQ(final_scores(h), g.final_scores);
  }
}

TEST(ReplayTest, TamperedRevealIsCaught) {
  auto lines = played_game(7);
  for (auto& l : lines) {
    auto j = nlohmann::json::parse(l);
    if (j["type"] == "round_revealed" && j["round"] == 2) {
      j["payoffs_milli"][0] = j["payoffs_milli"][0].get<std::int64_t>() + 10;
      l = j.dump();
      break;
    }
  }
  expect_code([&] { replay(testing::parse_lines(lines)); }, ErrorCode::ReplayMismatch);
}

TEST(ReplayTest, MissingContributionIsCaught) {
  auto lines = played_game(8);
  for (auto it = lines.begin(); it != lines.end(); ++it) {
    if (nlohmann::json::parse(*it)["type"] == "contribution_submitted") {
      lines.erase(it);
      break;
    }
  }
  expect_code([&] { replay(testing::parse_lines(lines)); }, ErrorCode::ReplayMismatch);
}

TEST(ReplayTest, HeaderlessLogIsRejected) {
  auto lines = played_game(9);
  lines.erase(lines.begin());
  expect_code([&] { replay(testing::parse_lines(lines)); }, ErrorCode::ReplayMismatch);
}

}  // namespace
}  // namespace pgg
