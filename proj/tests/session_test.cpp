#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "harness.hpp"
#include "pgg/host.hpp"
#include "pgg/log.hpp"
#include "pgg/session.hpp"

namespace pgg {
namespace {

using testing::Harness;
using testing::contributor;

SessionSettings one_bot_three_humans() {
  SessionSettings s;
  s.seats = {{true, "ac", "iCub"}, {false, "", ""}, {false, "", ""}, {false, "", ""}};
  s.bot_delay = {100, 500};
  return s;
}

SessionSettings four_humans() {
  SessionSettings s;
  s.seats.assign(4, SeatSpec{});
  return s;
}

template <class T>
std::vector<T> of_type(const std::vector<msg::ServerMessage>& ms) {
  std::vector<T> out;
  for (const auto& m : ms) {
    if (const auto* t = std::get_if<T>(&m)) out.push_back(*t);
  }
  return out;
}

std::vector<SessionEvent> events_of(const MemoryLogSink& sink) { return testing::parse_lines(sink.lines()).events; }

template <class T>
std::size_t count_events(const std::vector<SessionEvent>& evs) {
  return static_cast<std::size_t>(std::count_if(evs.begin(), evs.end(), [](const auto& e) { return e.template as<T>() != nullptr; }));
}

TEST(SessionTest, LobbyFillsThenRoundZeroStarts) {
  MemoryLogSink sink;
  LocalRunner runner(Session("s1", one_bot_three_humans(), 1), sink);
  runner.start();
  EXPECT_EQ(runner.session().phase().kind, PhaseKind::Lobby);
  std::vector<ConnectionId> humans;
  for (int i = 0; i < 3; ++i) {
    humans.push_back(runner.connect());
    runner.send(humans.back(), msg::Join{"s1", "p" + std::to_string(i)});
  }
  runner.run_until(0);
  EXPECT_EQ(runner.session().phase(), SessionPhase::decision(0));
  for (std::size_t i = 0; i < humans.size(); ++i) {
    auto inbox = runner.inbox(humans[i]);
    auto welcome = of_type<msg::Welcome>(inbox);
    ASSERT_EQ(welcome.size(), 1u);
    EXPECT_EQ(welcome[0].player.index, static_cast<int>(i) + 1);
    EXPECT_EQ(welcome[0].seats.size(), 4u);
    EXPECT_TRUE(welcome[0].seats[0].bot);
    EXPECT_TRUE(welcome[0].seats[0].strategy.empty());
    EXPECT_EQ(of_type<msg::RoundStart>(inbox), (std::vector<msg::RoundStart>{{0, 10}}));
  }
}

TEST(SessionTest, JoinErrors) {
  MemoryLogSink sink;
  LocalRunner runner(Session("s1", one_bot_three_humans(), 1), sink);
  runner.start();
  auto a = runner.connect();
  runner.send(a, msg::Join{"nope", "x"});
  runner.send(a, msg::Contribute{0, 100});
  runner.send(a, msg::Join{"s1", "x"});
  runner.send(a, msg::Join{"s1", "x"});
  runner.send_text(a, "{not json");
  runner.send_text(a, R"({"type":"dance"})");
  runner.run_until(0);
  auto errors = of_type<msg::ErrorMsg>(runner.inbox(a));
  ASSERT_EQ(errors.size(), 5u);
  EXPECT_EQ(errors[0].code, "UnknownSession");
  EXPECT_EQ(errors[1].code, "NotJoined");
  EXPECT_EQ(errors[2].code, "AlreadyJoined");
  EXPECT_EQ(errors[3].code, "MalformedMessage");
  EXPECT_EQ(errors[4].code, "MalformedMessage");

  auto b = runner.connect();
  auto c = runner.connect();
  auto d = runner.connect();
  runner.send(b, msg::Join{"s1", "b"});
  runner.send(c, msg::Join{"s1", "c"});
  runner.send(d, msg::Join{"s1", "d"});
  runner.run_until(0);
  EXPECT_EQ(of_type<msg::ErrorMsg>(runner.inbox(d)).at(0).code, "OutOfPhaseMessage");
}

TEST(SessionTest, FullSessionFillsEveryHumanSeatThenRejects) {
  SessionSettings s = four_humans();
  MemoryLogSink sink;
  LocalRunner runner(Session("s", s, 1), sink);
  runner.start();
  std::vector<ConnectionId> conns;
  for (int i = 0; i < 4; ++i) {
    conns.push_back(runner.connect());
    runner.send(conns.back(), msg::Join{"s", ""});
  }
  runner.run_until(0);
  // Names default to 1-based seat labels.
  EXPECT_EQ(runner.session().seats()[0].display_name, "Player 1");
  EXPECT_EQ(runner.session().phase(), SessionPhase::decision(0));
}

/// Drives the 1 bot + 3 humans layout to Decision(k) with everyone contributing 100.
struct DrivenSession {
  MemoryLogSink sink;
  LocalRunner runner;
  std::vector<ConnectionId> humans;

  explicit DrivenSession(SessionSettings s = one_bot_three_humans(), std::uint64_t seed = 3)
      : runner(Session("s", std::move(s), seed), sink) {
    runner.start();
    for (int i = 0; i < 3; ++i) {
      humans.push_back(runner.connect());
      runner.send(humans.back(), msg::Join{"s", ""});
    }
    runner.run_until(0);
  }

  void finish_round_with_humans(int k) {
    for (auto h : humans) runner.send(h, msg::Contribute{k, 100});
    while (runner.session().phase() == SessionPhase::decision(k)) ASSERT_TRUE(runner.run_one());
  }
};

TEST(SessionTest, OwnContributionAckedPrivately) {
  DrivenSession ds;
  for (int k = 0; k < 3; ++k) ds.finish_round_with_humans(k);
  ASSERT_EQ(ds.runner.session().phase(), SessionPhase::decision(3));

  const auto before = ds.runner.trace().size();
  ds.runner.send(ds.humans[1], msg::Contribute{3, 50});  // seat 2
  ds.runner.run_until(ds.runner.now());
  const auto& trace = ds.runner.trace();
  ASSERT_EQ(trace.size(), before + 1);
  EXPECT_EQ(trace.back().to, ds.humans[1]);
  EXPECT_EQ(std::get<msg::ContributionAck>(trace.back().message).round, 3);
}

TEST(SessionTest, LastContributionRevealsToEveryone) {
  DrivenSession ds;
  for (int k = 0; k < 3; ++k) ds.finish_round_with_humans(k);
  ds.runner.send(ds.humans[0], msg::Contribute{3, 100});
  ds.runner.send(ds.humans[1], msg::Contribute{3, 50});
  ds.runner.send(ds.humans[2], msg::Contribute{3, 0});
  while (ds.runner.session().phase() == SessionPhase::decision(3)) ASSERT_TRUE(ds.runner.run_one());

  for (auto h : ds.humans) {
    auto results = of_type<msg::RoundResultMsg>(ds.runner.inbox(h));
    ASSERT_EQ(results.size(), 4u);
    const auto& r = results.back();
    EXPECT_EQ(r.result.round_index, 3);
    EXPECT_EQ(r.result.contributions, (std::vector<Money>{Money::from_cents(100), Money::from_cents(100),
                                                          Money::from_cents(50), Money()}));
    EXPECT_EQ(r.result.pool, Money::parse("2.5"));
    EXPECT_EQ(r.result.share, Money::parse("1"));
    // three all-cooperate rounds (1.6 each) plus this round's payoff
    EXPECT_EQ(r.cumulative[3], Money::parse("4.8") + Money::parse("2"));
  }
  EXPECT_EQ(ds.runner.session().phase(), SessionPhase::decision(4));
}

TEST(SessionTest, ContributionDuringRevealIsOutOfPhase) {
  SessionSettings s = one_bot_three_humans();
  s.reveal_pause_ms = 1000;
  DrivenSession ds(s);
  ds.finish_round_with_humans(0);
  ASSERT_EQ(ds.runner.session().phase(), SessionPhase::reveal(0));
  const auto events_before = ds.sink.lines().size();
  ds.runner.send(ds.humans[0], msg::Contribute{0, 100});
  ds.runner.send(ds.humans[0], msg::Contribute{1, 100});
  ds.runner.run_until(ds.runner.now());
  auto errors = of_type<msg::ErrorMsg>(ds.runner.inbox(ds.humans[0]));
  ASSERT_EQ(errors.size(), 2u);
  EXPECT_EQ(errors[0].code, "OutOfPhaseMessage");
  EXPECT_EQ(errors[1].code, "OutOfPhaseMessage");
  EXPECT_EQ(ds.runner.session().phase(), SessionPhase::reveal(0));
  // only the two error records were logged
  EXPECT_EQ(ds.sink.lines().size(), events_before + 2);
  ds.runner.run_until(ds.runner.now() + 1000);
  EXPECT_EQ(ds.runner.session().phase(), SessionPhase::decision(1));
}

TEST(SessionTest, DuplicateRejectedFirstStands) {
  DrivenSession ds;
  ds.runner.send(ds.humans[0], msg::Contribute{0, 50});
  ds.runner.send(ds.humans[0], msg::Contribute{0, 100});
  ds.runner.send(ds.humans[1], msg::Contribute{0, 25});
  ds.runner.run_until(0);
  auto inbox0 = ds.runner.inbox(ds.humans[0]);
  EXPECT_EQ(of_type<msg::ContributionAck>(inbox0).size(), 1u);
  EXPECT_EQ(of_type<msg::ErrorMsg>(inbox0).at(0).code, "DuplicateContribution");
  EXPECT_EQ(of_type<msg::ErrorMsg>(ds.runner.inbox(ds.humans[1])).at(0).code, "IllegalAmount");

  ds.runner.send(ds.humans[1], msg::Contribute{0, 0});
  ds.runner.send(ds.humans[2], msg::Contribute{0, 0});
  while (ds.runner.session().phase() == SessionPhase::decision(0)) ASSERT_TRUE(ds.runner.run_one());
  EXPECT_EQ(ds.runner.session().history().rounds()[0].contributions[1], Money::from_cents(50));
}

TEST(SessionTest, TimeoutFillsMissingWithFlaggedZero) {
  SessionSettings s = four_humans();
  s.decision_timeout_ms = 1000;
  MemoryLogSink sink;
  LocalRunner runner(Session("t", s, 1), sink);
  runner.start();
  std::vector<ConnectionId> c;
  for (int i = 0; i < 4; ++i) {
    c.push_back(runner.connect());
    runner.send(c.back(), msg::Join{"t", ""});
  }
  runner.run_until(0);
  runner.send(c[0], msg::Contribute{0, 100});
  runner.send(c[1], msg::Contribute{0, 50});
  runner.run_until(999);
  EXPECT_EQ(runner.session().phase(), SessionPhase::decision(0));
  runner.run_until(1000);
  EXPECT_EQ(runner.session().phase(), SessionPhase::decision(1));

  std::vector<event::ContributionSubmitted> subs;
  for (const auto& e : events_of(sink)) {
    if (const auto* cs = e.as<event::ContributionSubmitted>()) subs.push_back(*cs);
  }
  ASSERT_EQ(subs.size(), 4u);
  EXPECT_FALSE(subs[0].timed_out);
  EXPECT_FALSE(subs[1].timed_out);
  EXPECT_EQ(subs[2], (event::ContributionSubmitted{PlayerId{2}, 0, 0, true}));
  EXPECT_EQ(subs[3], (event::ContributionSubmitted{PlayerId{3}, 0, 0, true}));
}

TEST(SessionTest, TimeoutAfterFullRoundIsNoOp) {
  SessionSettings s = four_humans();
  Session session("t", s, 1);
  session.start(0);
  for (ConnectionId c = 1; c <= 4; ++c) session.handle_message(c, msg::Join{"t", ""}, 0);
  for (ConnectionId c = 1; c <= 4; ++c) session.handle_message(c, msg::Contribute{0, 0}, 0);
  ASSERT_EQ(session.phase(), SessionPhase::decision(1));
  Step stale = session.on_decision_timeout(0, 5);
  EXPECT_TRUE(stale.events.empty());
  EXPECT_TRUE(stale.outbound.empty());
  EXPECT_EQ(session.phase(), SessionPhase::decision(1));
}

TEST(SessionTest, DisabledTimeoutIsNeverScheduled) {
  Session session("t", four_humans(), 1);
  std::vector<TimerRequest> timers;
  session.start(0);
  for (ConnectionId c = 1; c <= 4; ++c) {
    auto step = session.handle_message(c, msg::Join{"t", ""}, 0);
    timers.insert(timers.end(), step.timers.begin(), step.timers.end());
  }
  EXPECT_EQ(session.phase(), SessionPhase::decision(0));
  EXPECT_TRUE(timers.empty());
}

TEST(ScheduleBotTurnTest, AlwaysCooperateSubmitsFullEndowment) {
  SessionSettings s;
  s.seats.assign(4, SeatSpec{true, "ac", ""});
  Session session("b", s, 11);
  Step step = session.start(0);
  ASSERT_EQ(session.phase(), SessionPhase::decision(0));
  ASSERT_EQ(step.timers.size(), 4u);
  for (const auto& t : step.timers) {
    EXPECT_EQ(t.kind, TimerKind::BotContribution);
    EXPECT_EQ(t.amount_cents, 100);
    EXPECT_GE(t.delay_ms, 2000);
    EXPECT_LE(t.delay_ms, 8000);
  }
}

TEST(ScheduleBotTurnTest, SeededSequenceRepeats) {
  SessionSettings s = one_bot_three_humans();
  s.bot_delay = {2000, 8000};
  s.persona_actions = {{"think_aloud"}, {"focused_face"}, {"clear_throat"}};
  s.max_persona_actions = 2;
  auto draw = [&] {
    Session session("b", s, 7);
    session.start(0);
    for (ConnectionId c = 1; c <= 3; ++c) session.handle_message(c, msg::Join{"b", ""}, 0);
    std::vector<TimerRequest> all;
    for (int i = 0; i < 5; ++i) {
      auto t = session.schedule_bot_turn(0, PlayerId{0});
      all.insert(all.end(), t.begin(), t.end());
    }
    return all;
  };
  auto first = draw();
  EXPECT_EQ(first, draw());
  // persona actions always precede the submission
  std::int64_t submit = -1;
  for (auto it = first.rbegin(); it != first.rend(); ++it) {
    if (it->kind == TimerKind::BotContribution) submit = it->delay_ms;
    else EXPECT_LE(it->delay_ms, submit);
  }
}

TEST(ScheduleBotTurnTest, EmptyPersonaSetSubmitsOnly) {
  SessionSettings s = one_bot_three_humans();
  s.max_persona_actions = 3;
  Session session("b", s, 7);
  session.start(0);
  for (ConnectionId c = 1; c <= 3; ++c) session.handle_message(c, msg::Join{"b", ""}, 0);
  auto timers = session.schedule_bot_turn(0, PlayerId{0});
  ASSERT_EQ(timers.size(), 1u);
  EXPECT_EQ(timers[0].kind, TimerKind::BotContribution);
  EXPECT_THROW(session.schedule_bot_turn(0, PlayerId{1}), Error);
}

TEST(SessionTest, PersonaEventsBroadcastBeforeBotSubmits) {
  SessionSettings s = one_bot_three_humans();
  s.persona_actions = {{"think_aloud"}};
  s.max_persona_actions = 3;
  DrivenSession ds(s, 99);
  for (int k = 0; k < 10; ++k) ds.finish_round_with_humans(k);
  const auto evs = events_of(ds.sink);
  std::size_t persona = 0;
  int bot_submitted_round = -1;
  for (const auto& e : evs) {
    if (const auto* c = e.as<event::ContributionSubmitted>(); c && c->player.index == 0) {
      bot_submitted_round = c->round;
    }
    if (const auto* rs = e.as<event::RoundStarted>()) {
      bot_submitted_round = -1 - rs->round;
    }
    if (const auto* p = e.as<event::PersonaEvent>()) {
      ++persona;
      EXPECT_EQ(p->action_id, "think_aloud");
      EXPECT_LT(bot_submitted_round, 0) << "persona after the bot already submitted";
    }
  }
  EXPECT_GT(persona, 0u);
  EXPECT_EQ(of_type<msg::PersonaEvent>(ds.runner.inbox(ds.humans[0])).size(), persona);
}

TEST(SessionTest, DisconnectedHumanFallsBackToFlaggedZero) {
  SessionSettings s = one_bot_three_humans();
  MemoryLogSink sink;
  LocalRunner runner(Session("d", s, 5), sink);
  Harness h(runner);
  runner.start();
  auto a = h.add_client(contributor([](int) { return 100; }));
  auto b = h.add_client(contributor([](int) { return 50; }));
  auto c = h.add_client([](LocalRunner& r, ConnectionId self, const msg::ServerMessage& m) {
    const auto* rs = std::get_if<msg::RoundStart>(&m);
    if (!rs) return;
    if (rs->round == 2) {
      r.disconnect(self, 1);
    } else {
      r.send(self, msg::Contribute{rs->round, 100}, 5);
    }
  });
  for (auto conn : {a, b, c}) runner.send(conn, msg::Join{"d", ""});
  h.run();

  ASSERT_TRUE(runner.session().closed());
  EXPECT_TRUE(runner.session().seats()[3].fallback_active);
  const auto& rounds = runner.session().history().rounds();
  ASSERT_EQ(rounds.size(), 10u);
  EXPECT_EQ(rounds[1].contributions[3], Money::from_cents(100));
  for (int k = 2; k < 10; ++k) EXPECT_EQ(rounds[static_cast<std::size_t>(k)].contributions[3], Money());
  std::size_t flagged = 0;
  for (const auto& e : events_of(sink)) {
    if (const auto* cs = e.as<event::ContributionSubmitted>(); cs && cs->timed_out) {
      EXPECT_EQ(cs->player.index, 3);
      ++flagged;
    }
  }
  EXPECT_EQ(flagged, 8u);
}

GameConfig short_game(int rounds) {
  RawConfig raw;
  raw.num_rounds = rounds;
  return validate_config(raw);
}

nlohmann::json answers(int generosity, const char* role) {
  return {{"age", 12}, {"gender", "f"}, {"seen_robot_before", false}, {"generosity", generosity},
          {"perceived_role", role}};
}

TEST(SessionTest, QuestionnaireCollectedThenClosed) {
  SessionSettings s = one_bot_three_humans();
  s.game = short_game(2);
  s.questionnaire = true;
  DrivenSession ds(s);
  ds.runner.send(ds.humans[0], msg::Questionnaire{answers(5, "friend")});
  ds.finish_round_with_humans(0);
  ds.finish_round_with_humans(1);
  ASSERT_EQ(ds.runner.session().phase().kind, PhaseKind::Questionnaire);
  EXPECT_EQ(of_type<msg::ErrorMsg>(ds.runner.inbox(ds.humans[0])).at(0).code, "OutOfPhaseMessage");
  EXPECT_EQ(of_type<msg::GameOver>(ds.runner.inbox(ds.humans[0])).size(), 1u);

  ds.runner.send(ds.humans[0], msg::Questionnaire{answers(5, "friend")});
  ds.runner.send(ds.humans[0], msg::Questionnaire{answers(4, "friend")});
  ds.runner.send(ds.humans[1], msg::Questionnaire{answers(6, "friend")});
  ds.runner.send(ds.humans[1], msg::Questionnaire{answers(3, "pirate")});
  ds.runner.send(ds.humans[1], msg::Questionnaire{answers(3, "neighbor")});
  ds.runner.run_until(ds.runner.now());
  auto e0 = of_type<msg::ErrorMsg>(ds.runner.inbox(ds.humans[0]));
  EXPECT_EQ(e0.back().code, "DuplicateQuestionnaire");
  auto e1 = of_type<msg::ErrorMsg>(ds.runner.inbox(ds.humans[1]));
  ASSERT_EQ(e1.size(), 2u);
  EXPECT_EQ(e1[0].code, "InvalidQuestionnaire");
  EXPECT_EQ(e1[1].code, "InvalidQuestionnaire");
  EXPECT_EQ(ds.runner.session().phase().kind, PhaseKind::Questionnaire);

  ds.runner.disconnect(ds.humans[2]);  // leaving excuses the last participant
  ds.runner.run_until(ds.runner.now());
  EXPECT_TRUE(ds.runner.session().closed());

  std::vector<event::QuestionnaireSubmitted> submitted;
  for (const auto& e : events_of(ds.sink)) {
    if (const auto* q = e.as<event::QuestionnaireSubmitted>()) submitted.push_back(*q);
  }
  ASSERT_EQ(submitted.size(), 2u);
  EXPECT_EQ(submitted[0].player.index, 1);
  EXPECT_EQ(submitted[0].answers.generosity, 5);
  EXPECT_EQ(submitted[1].answers.perceived_role, Role::Neighbor);
}

TEST(SessionTest, UnwritableSinkClosesWithError) {
  struct BrokenSink : LogSink {
    int budget = 3;
    void write_line(std::string_view) override {
      if (budget-- <= 0) throw Error(ErrorCode::SinkUnavailable, "disk full");
    }
  } sink;
  LocalRunner runner(Session("x", one_bot_three_humans(), 1), sink);
  runner.start();  // session_started + bot joined
  auto a = runner.connect();
  auto b = runner.connect();
  runner.send(a, msg::Join{"x", ""});  // third line
  runner.send(b, msg::Join{"x", ""});  // fourth line fails
  runner.run_until_idle();
  EXPECT_TRUE(runner.session().closed());
  EXPECT_TRUE(runner.host().sink_failed());
  auto errors = of_type<msg::ErrorMsg>(runner.inbox(a));
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].code, "SinkUnavailable");
  // the welcome for b was never sent: data first, then messages
  EXPECT_TRUE(of_type<msg::Welcome>(runner.inbox(b)).empty());
}

/// Random human behavior: arbitrary delays, stale or future rounds,
/// duplicates, illegal amounts, sometimes disconnecting.
Harness::Handler chaotic(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng](LocalRunner& r, ConnectionId self, const msg::ServerMessage& m) {
    auto roll = [&](int n) { return static_cast<int>((*rng)() % static_cast<std::uint64_t>(n)); };
    if (const auto* rs = std::get_if<msg::RoundStart>(&m)) {
      static const std::int64_t amounts[] = {0, 50, 100};
      r.send(self, msg::Contribute{rs->round, amounts[roll(3)]}, roll(300));
      if (roll(3) == 0) r.send(self, msg::Contribute{rs->round, 50}, roll(300));
      if (roll(3) == 0) r.send(self, msg::Contribute{rs->round, 25}, roll(300));
      if (roll(4) == 0) r.send(self, msg::Contribute{rs->round + roll(3) - 1, 100}, roll(300));
      if (roll(40) == 0) r.disconnect(self, roll(300));
    }
  };
}

TEST(SessionPropertyTest, AdversarialOrdersKeepProtocolInvariants) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    SessionSettings s = one_bot_three_humans();
    s.bot_delay = {0, 250};
    s.persona_actions = {{"think_aloud"}, {"clear_throat"}};
    s.max_persona_actions = 2;
    if (seed % 3 == 0) s.decision_timeout_ms = 200;
    if (seed % 4 == 1) s.seats[0].strategy = "tft";
    MemoryLogSink sink;
    LocalRunner runner(Session("p", s, seed), sink);
    Harness h(runner);
    runner.start();
    std::vector<ConnectionId> conns;
    for (int i = 0; i < 3; ++i) {
      conns.push_back(h.add_client(chaotic(seed * 10 + static_cast<std::uint64_t>(i))));
      runner.send(conns.back(), msg::Join{"p", ""}, i * 3);
    }
    h.run();
    ASSERT_TRUE(runner.session().closed()) << "seed " << seed << " phase " << to_string(runner.session().phase());

    // Privacy: a round-k result reaches a client only once the log holds all
    // four round-k contributions; no other message type carries amounts.
    const auto log = testing::parse_lines(sink.lines());
    std::map<int, std::size_t> contributions_logged;
    std::size_t reveals = 0;
    for (const auto& ev : log.events) {
      if (const auto* c = ev.as<event::ContributionSubmitted>()) {
        EXPECT_EQ(c->round, static_cast<int>(reveals)) << "contribution after its reveal";
        ++contributions_logged[c->round];
      }
      if (const auto* r = ev.as<event::RoundRevealed>()) {
        EXPECT_EQ(contributions_logged[r->result.round_index], 4u);
        ++reveals;
      }
    }
    EXPECT_EQ(reveals, 10u);
    for (const auto& [round, n] : contributions_logged) EXPECT_EQ(n, 4u);

    int current_round = -1;
    std::map<ConnectionId, int> revealed_to;
    for (const auto& d : runner.trace()) {
      if (const auto* rs = std::get_if<msg::RoundStart>(&d.message)) current_round = rs->round;
      if (const auto* rr = std::get_if<msg::RoundResultMsg>(&d.message)) {
        EXPECT_EQ(rr->result.round_index, current_round);
        revealed_to[d.to] = rr->result.round_index;
      }
    }

    // Phase monotonicity along the canonical chain.
    const auto& phases = runner.session().phase_trace();
    ASSERT_GE(phases.size(), 2u);
    EXPECT_EQ(phases.front().kind, PhaseKind::Lobby);
    for (std::size_t i = 1; i < phases.size(); ++i) {
      const auto& prev = phases[i - 1];
      const auto& cur = phases[i];
      switch (prev.kind) {
        case PhaseKind::Lobby:
          EXPECT_EQ(cur, SessionPhase::decision(0));
          break;
        case PhaseKind::Decision:
          EXPECT_EQ(cur, SessionPhase::reveal(prev.round));
          break;
        case PhaseKind::Reveal:
          if (prev.round < 9) {
            EXPECT_EQ(cur, SessionPhase::decision(prev.round + 1));
          } else {
            EXPECT_TRUE(cur.kind == PhaseKind::Questionnaire || cur.kind == PhaseKind::Closed);
          }
          break;
        default:
          EXPECT_EQ(cur.kind, PhaseKind::Closed);
      }
    }

    // Timestamps never decrease; the log replays to the live history.
    for (std::size_t i = 1; i < log.events.size(); ++i) {
      EXPECT_LE(log.events[i - 1].timestamp_ms, log.events[i].timestamp_ms);
    }
    EXPECT_EQ(replay(log), runner.session().history());
  }
}

TEST(SessionPropertyTest, ReplayDeterminism) {
  auto run_once = [](std::uint64_t seed) {
    SessionSettings s = one_bot_three_humans();
    s.seats[0].strategy = "tft";
    s.persona_actions = {{"think_aloud"}, {"focused_face"}};
    s.max_persona_actions = 2;
    MemoryLogSink sink;
    LocalRunner runner(Session("r", s, seed), sink);
    Harness h(runner);
    runner.start();
    for (int i = 0; i < 3; ++i) {
      auto c = h.add_client(chaotic(1000 + static_cast<std::uint64_t>(i)));
      runner.send(c, msg::Join{"r", ""});
    }
    h.run();
    return testing::strip_timestamps(sink.lines());
  };
  EXPECT_EQ(run_once(21), run_once(21));
  EXPECT_NE(run_once(21), run_once(22));
}

}  // namespace
}  // namespace pgg
