#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pgg/config.hpp"
#include "pgg/error.hpp"
#include "pgg/events.hpp"
#include "pgg/game.hpp"
#include "pgg/protocol.hpp"
#include "pgg/questionnaire.hpp"
#include "pgg/rng.hpp"
#include "pgg/strategy.hpp"
#include "pgg/wire.hpp"

namespace pgg {

enum class PhaseKind { Lobby, Decision, Reveal, Questionnaire, Closed };

struct SessionPhase {
  PhaseKind kind = PhaseKind::Lobby;
  int round = -1;  // meaningful for Decision and Reveal only

  static SessionPhase decision(int k) { return {PhaseKind::Decision, k}; }
  static SessionPhase reveal(int k) { return {PhaseKind::Reveal, k}; }

  friend bool operator==(const SessionPhase&, const SessionPhase&) = default;
};

inline std::string to_string(const SessionPhase& p) {
  switch (p.kind) {
    case PhaseKind::Lobby: return "Lobby";
    case PhaseKind::Decision: return "Decision(" + std::to_string(p.round) + ")";
    case PhaseKind::Reveal: return "Reveal(" + std::to_string(p.round) + ")";
    case PhaseKind::Questionnaire: return "Questionnaire";
    case PhaseKind::Closed: return "Closed";
  }
  return "?";
}

using ConnectionId = std::uint64_t;

struct SeatSpec {
  bool bot = false;
  std::string strategy;  // bot seats only
  std::string name;
};

struct SessionSettings {
  GameConfig game = default_config();
  std::vector<SeatSpec> seats;
  std::int64_t decision_timeout_ms = 0;  // 0 disables the timeout
  DelayWindow bot_delay{2000, 8000};
  std::int64_t reveal_pause_ms = 0;
  std::vector<PersonaAction> persona_actions;
  int max_persona_actions = 0;
  bool questionnaire = false;
};

/// Lab setup: seat 0 is an always-cooperate bot named iCub, seats 1..3 are human.
inline SessionSettings default_settings() {
  SessionSettings s;
  s.seats = {{true, "ac", "iCub"}, {false, "", ""}, {false, "", ""}, {false, "", ""}};
  s.persona_actions = {{"think_aloud"}, {"focused_face"}, {"clear_throat"}};
  s.max_persona_actions = 1;
  s.questionnaire = true;
  return s;
}

inline void validate_settings(const SessionSettings& s) {
  if (static_cast<int>(s.seats.size()) != s.game.num_players()) {
    throw Error(ErrorCode::InvalidArgument, "seat layout has " + std::to_string(s.seats.size()) +
                                                " seats for " + std::to_string(s.game.num_players()) +
                                                " players");
  }
  for (const SeatSpec& seat : s.seats) {
    if (seat.bot) make_strategy(seat.strategy, 0);
  }
  if (s.decision_timeout_ms < 0 || s.reveal_pause_ms < 0) {
    throw Error(ErrorCode::InvalidArgument, "timeouts must be >= 0");
  }
  if (s.bot_delay.min_ms < 0 || s.bot_delay.max_ms < s.bot_delay.min_ms) {
    throw Error(ErrorCode::InvalidArgument, "bot delay window must satisfy 0 <= min <= max");
  }
  if (s.max_persona_actions < 0) throw Error(ErrorCode::InvalidArgument, "max_persona_actions < 0");
  require_wire_representable(s.game);
}

struct HumanOccupant {
  std::optional<ConnectionId> connection;
};

struct BotOccupant {
  StrategyState strategy;
};

struct Seat {
  PlayerId player;
  std::variant<HumanOccupant, BotOccupant> occupant;
  std::string display_name;
  bool connected = false;
  bool fallback_active = false;

  bool is_bot() const { return std::holds_alternative<BotOccupant>(occupant); }
  std::optional<ConnectionId> connection() const {
    if (auto* h = std::get_if<HumanOccupant>(&occupant)) return h->connection;
    return std::nullopt;
  }
};

enum class TimerKind { BotPersona, BotContribution, DecisionTimeout, RevealDone };

/// A deferred input the driver must feed back through Session::on_timer
/// after `delay_ms`. Timers that no longer match the phase are ignored.
struct TimerRequest {
  std::int64_t delay_ms = 0;
  TimerKind kind = TimerKind::DecisionTimeout;
  int round = 0;
  PlayerId player;
  std::int64_t amount_cents = 0;
  std::string action_id;
  friend bool operator==(const TimerRequest&, const TimerRequest&) = default;
};

struct Outbound {
  ConnectionId to = 0;
  msg::ServerMessage message;
};

/// Everything one input produced: messages to send, events to log, timers to arm.
struct Step {
  std::vector<Outbound> outbound;
  std::vector<SessionEvent> events;
  std::vector<TimerRequest> timers;
};

/// One game session as a deterministic state machine. It performs no I/O:
/// each input returns a Step, and the caller delivers, logs and schedules.
/// Time comes in as `now_ms`; randomness comes from the seeded session Rng.
class Session {
 public:
  Session(std::string id, SessionSettings settings, std::uint64_t seed)
      : id_(std::move(id)), settings_(std::move(settings)), seed_(seed), rng_(seed),
        history_(settings_.game) {
    validate_settings(settings_);
    for (int i = 0; i < num_players(); ++i) {
      const SeatSpec& spec = settings_.seats[static_cast<std::size_t>(i)];
      Seat seat;
      seat.player = PlayerId{i};
      if (spec.bot) {
        seat.occupant = BotOccupant{make_strategy(spec.strategy, Rng::derive(seed, static_cast<std::uint64_t>(i)))};
        seat.display_name = spec.name.empty() ? "Bot " + std::to_string(i + 1) : spec.name;
        seat.connected = true;
      } else {
        seat.occupant = HumanOccupant{};
        seat.display_name = spec.name;
      }
      seats_.push_back(std::move(seat));
    }
    phase_trace_.push_back(phase_);
  }

  const std::string& id() const noexcept { return id_; }
  const SessionSettings& settings() const noexcept { return settings_; }
  const SessionPhase& phase() const noexcept { return phase_; }
  const std::vector<SessionPhase>& phase_trace() const noexcept { return phase_trace_; }
  const GameHistory& history() const noexcept { return history_; }
  const std::vector<Seat>& seats() const noexcept { return seats_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool closed() const noexcept { return phase_.kind == PhaseKind::Closed; }

  /// Opens the lobby. Bot seats join immediately; a session without human
  /// seats goes straight to round 0.
  Step start(std::int64_t now_ms) {
    Step step;
    if (started_) return step;
    started_ = true;
    emit(step, now_ms, event::SessionStarted{settings_.game, seat_infos(true), seed_, kLogSchemaVersion});
    for (const Seat& s : seats_) {
      if (s.is_bot()) emit(step, now_ms, event::Joined{s.player, s.display_name, true});
    }
    if (all_seats_filled()) begin_round(step, 0, now_ms);
    return step;
  }

  /// Raw frame from a connection; malformed frames are answered with an error.
  Step handle_text(ConnectionId from, std::string_view text, std::int64_t now_ms) {
    msg::ClientMessage decoded;
    try {
      decoded = msg::decode_client(text);
    } catch (const Error& e) {
      Step step;
      reject(step, from, e, now_ms);
      return step;
    }
    return handle_message(from, decoded, now_ms);
  }

  Step handle_message(ConnectionId from, const msg::ClientMessage& message, std::int64_t now_ms) {
    Step step;
    try {
      std::visit([&](const auto& m) { on(step, from, m, now_ms); }, message);
    } catch (const Error& e) {
      reject(step, from, e, now_ms);
    }
    return step;
  }

  Step on_disconnect(ConnectionId conn, std::int64_t now_ms) {
    Step step;
    auto idx = seat_of(conn);
    if (!idx) return step;
    Seat& seat = seats_[*idx];
    std::get<HumanOccupant>(seat.occupant).connection.reset();
    seat.connected = false;
    switch (phase_.kind) {
      case PhaseKind::Lobby:
        seat.display_name = settings_.seats[*idx].name;
        emit(step, now_ms, event::Disconnected{seat.player});
        break;
      case PhaseKind::Decision:
      case PhaseKind::Reveal:
        seat.fallback_active = true;
        emit(step, now_ms, event::Disconnected{seat.player});
        if (phase_.kind == PhaseKind::Decision && !current_[*idx]) {
          record(step, seat.player, Money(), true, now_ms);
          maybe_reveal(step, now_ms);
        }
        break;
      case PhaseKind::Questionnaire:
        emit(step, now_ms, event::Disconnected{seat.player});
        questionnaire_pending_.erase(seat.player.index);
        if (questionnaire_pending_.empty()) close(step, "completed", now_ms);
        break;
      case PhaseKind::Closed:
        break;
    }
    return step;
  }

  /// Records 0 (flagged timed_out) for every missing contribution of `round`
  /// and reveals. No-op unless the session is in Decision(round).
  Step on_decision_timeout(int round, std::int64_t now_ms) {
    Step step;
    if (phase_ != SessionPhase::decision(round)) return step;
    for (const Seat& s : seats_) {
      if (!current_[static_cast<std::size_t>(s.player.index)]) record(step, s.player, Money(), true, now_ms);
    }
    maybe_reveal(step, now_ms);
    return step;
  }

  Step on_timer(const TimerRequest& t, std::int64_t now_ms) {
    Step step;
    const auto i = static_cast<std::size_t>(t.player.index);
    switch (t.kind) {
      case TimerKind::BotPersona:
        if (phase_ == SessionPhase::decision(t.round) && !current_[i]) {
          emit(step, now_ms, event::PersonaEvent{t.player, t.action_id});
          broadcast(step, msg::PersonaEvent{t.player, t.action_id});
        }
        break;
      case TimerKind::BotContribution:
        if (phase_ == SessionPhase::decision(t.round) && !current_[i]) {
          record(step, t.player, Money::from_cents(t.amount_cents), false, now_ms);
          maybe_reveal(step, now_ms);
        }
        break;
      case TimerKind::DecisionTimeout:
        return on_decision_timeout(t.round, now_ms);
      case TimerKind::RevealDone:
        if (phase_ == SessionPhase::reveal(t.round)) advance(step, now_ms);
        break;
    }
    return step;
  }

  /// Timers for one bot's turn: its contribution after a delay drawn from
  /// the bot delay window, preceded by 0..max persona actions.
  std::vector<TimerRequest> schedule_bot_turn(int round, PlayerId player) {
    const Seat& seat = seats_.at(static_cast<std::size_t>(player.index));
    const auto* bot = std::get_if<BotOccupant>(&seat.occupant);
    if (!bot) throw Error(ErrorCode::InvalidArgument, to_string(player) + " is not a bot seat");
    if (phase_ != SessionPhase::decision(round)) {
      throw Error(ErrorCode::OutOfPhaseMessage, "bot turn outside " + to_string(SessionPhase::decision(round)));
    }

    const Money amount = decide(bot->strategy, history_, player);
    const std::int64_t submit_at = rng_.uniform(settings_.bot_delay.min_ms, settings_.bot_delay.max_ms);
    std::vector<TimerRequest> timers;
    if (!settings_.persona_actions.empty() && settings_.max_persona_actions > 0) {
      auto actions = pick_idle_actions(rng_, settings_.persona_actions, settings_.max_persona_actions,
                                       DelayWindow{0, submit_at});
      for (const TimedAction& a : actions) {
        timers.push_back({a.delay_ms, TimerKind::BotPersona, round, player, 0, a.action.action_id});
      }
    }
    timers.push_back({submit_at, TimerKind::BotContribution, round, player, amount.to_cents(), ""});
    return timers;
  }

  /// Ends the session with an error broadcast (e.g. the log became unwritable).
  Step abort(ErrorCode code, const std::string& message, std::int64_t now_ms) {
    Step step;
    if (closed()) return step;
    emit(step, now_ms, event::Failure{std::string(to_string(code)), message});
    broadcast(step, msg::ErrorMsg{std::string(to_string(code)), message});
    close(step, "aborted", now_ms);
    return step;
  }

  /// Seat layout as clients see it (`with_strategy` false) or as logged.
  std::vector<SeatInfo> seat_infos(bool with_strategy) const {
    std::vector<SeatInfo> out;
    for (std::size_t i = 0; i < seats_.size(); ++i) {
      const Seat& s = seats_[i];
      out.push_back({s.player, s.display_name, s.is_bot(),
                     with_strategy && s.is_bot() ? settings_.seats[i].strategy : std::string()});
    }
    return out;
  }

 private:
  int num_players() const { return settings_.game.num_players(); }

  std::optional<std::size_t> seat_of(ConnectionId conn) const {
    for (std::size_t i = 0; i < seats_.size(); ++i) {
      if (seats_[i].connection() == conn) return i;
    }
    return std::nullopt;
  }

  bool all_seats_filled() const {
    return std::all_of(seats_.begin(), seats_.end(), [](const Seat& s) { return s.is_bot() || s.connection(); });
  }

  void emit(Step& step, std::int64_t now_ms, EventBody body) {
    last_ts_ = std::max(last_ts_, now_ms);
    step.events.push_back(SessionEvent{last_ts_, id_, std::move(body)});
  }

  void send(Step& step, ConnectionId to, msg::ServerMessage m) { step.outbound.push_back({to, std::move(m)}); }

  void broadcast(Step& step, const msg::ServerMessage& m) {
    for (const Seat& s : seats_) {
      if (auto c = s.connection()) send(step, *c, m);
    }
  }

  void set_phase(SessionPhase p) {
    phase_ = p;
    phase_trace_.push_back(p);
  }

  void reject(Step& step, ConnectionId from, const Error& e, std::int64_t now_ms) {
    send(step, from, msg::error_from(e));
    if (closed()) return;
    std::string who = "connection " + std::to_string(from);
    if (auto idx = seat_of(from)) who = to_string(seats_[*idx].player);
    emit(step, now_ms, event::Failure{std::string(to_string(e.code())), who + ": " + e.detail()});
  }

  void on(Step& step, ConnectionId from, const msg::Join& m, std::int64_t now_ms) {
    if (m.session != id_) throw Error(ErrorCode::UnknownSession, "no session '" + m.session + "'");
    if (seat_of(from)) throw Error(ErrorCode::AlreadyJoined, "connection already holds a seat");
    if (phase_.kind != PhaseKind::Lobby || !started_) {
      throw Error(ErrorCode::OutOfPhaseMessage, "join during " + to_string(phase_));
    }
    auto free_seat = std::find_if(seats_.begin(), seats_.end(),
                                  [](const Seat& s) { return !s.is_bot() && !s.connection(); });
    if (free_seat == seats_.end()) throw Error(ErrorCode::SessionFull, "all human seats are taken");

    std::get<HumanOccupant>(free_seat->occupant).connection = from;
    free_seat->connected = true;
    free_seat->display_name = m.name.empty() ? "Player " + std::to_string(free_seat->player.index + 1) : m.name;
    emit(step, now_ms, event::Joined{free_seat->player, free_seat->display_name, false});
    send(step, from, msg::Welcome{free_seat->player, settings_.game, seat_infos(false), settings_.questionnaire});
    if (all_seats_filled()) begin_round(step, 0, now_ms);
  }

  void on(Step& step, ConnectionId from, const msg::Contribute& m, std::int64_t now_ms) {
    auto idx = seat_of(from);
    if (!idx) throw Error(ErrorCode::NotJoined, "join a session before contributing");
    if (phase_ != SessionPhase::decision(m.round)) {
      throw Error(ErrorCode::OutOfPhaseMessage,
                  "contribution for round " + std::to_string(m.round) + " during " + to_string(phase_));
    }
    if (current_[*idx]) {
      throw Error(ErrorCode::DuplicateContribution,
                  "round " + std::to_string(m.round) + " contribution already recorded");
    }
    const Money amount = Money::from_cents(m.amount_cents);
    if (!settings_.game.is_allowed(amount)) {
      throw Error(ErrorCode::IllegalAmount, std::to_string(m.amount_cents) + " cents is not an allowed amount");
    }
    record(step, seats_[*idx].player, amount, false, now_ms);
    send(step, from, msg::ContributionAck{m.round});
    maybe_reveal(step, now_ms);
  }

  void on(Step& step, ConnectionId from, const msg::Questionnaire& m, std::int64_t now_ms) {
    auto idx = seat_of(from);
    if (!idx) throw Error(ErrorCode::NotJoined, "join a session before answering");
    const PlayerId player = seats_[*idx].player;
    if (phase_.kind != PhaseKind::Questionnaire) {
      throw Error(ErrorCode::OutOfPhaseMessage, "questionnaire during " + to_string(phase_));
    }
    if (!questionnaire_pending_.contains(player.index)) {
      throw Error(ErrorCode::DuplicateQuestionnaire, "questionnaire already submitted");
    }
    QuestionnaireResponse answers = questionnaire_from_json(m.answers);
    questionnaire_pending_.erase(player.index);
    emit(step, now_ms, event::QuestionnaireSubmitted{player, answers});
    if (questionnaire_pending_.empty()) close(step, "completed", now_ms);
  }

  void begin_round(Step& step, int k, std::int64_t now_ms) {
    set_phase(SessionPhase::decision(k));
    current_.assign(static_cast<std::size_t>(num_players()), std::nullopt);
    emit(step, now_ms, event::RoundStarted{k});
    broadcast(step, msg::RoundStart{k, settings_.game.num_rounds()});
    if (settings_.decision_timeout_ms > 0) {
      step.timers.push_back({settings_.decision_timeout_ms, TimerKind::DecisionTimeout, k, PlayerId{}, 0, ""});
    }
    for (const Seat& s : seats_) {
      if (s.is_bot()) {
        auto timers = schedule_bot_turn(k, s.player);
        step.timers.insert(step.timers.end(), timers.begin(), timers.end());
      }
    }
    for (const Seat& s : seats_) {
      if (s.fallback_active) record(step, s.player, Money(), true, now_ms);
    }
    maybe_reveal(step, now_ms);
  }

  void record(Step& step, PlayerId player, const Money& amount, bool timed_out, std::int64_t now_ms) {
    current_[static_cast<std::size_t>(player.index)] = amount;
    emit(step, now_ms, event::ContributionSubmitted{player, phase_.round, amount.to_cents(), timed_out});
  }

  void maybe_reveal(Step& step, std::int64_t now_ms) {
    if (phase_.kind != PhaseKind::Decision) return;
    if (!std::all_of(current_.begin(), current_.end(), [](const auto& c) { return c.has_value(); })) return;

    std::vector<Money> amounts;
    for (const auto& c : current_) amounts.push_back(*c);
    const int k = phase_.round;
    RoundResult result = resolve_round(amounts, settings_.game, k);
    history_ = apply_round(std::move(history_), result);
    set_phase(SessionPhase::reveal(k));
    emit(step, now_ms, event::RoundRevealed{result, history_.cumulative_scores()});
    broadcast(step, msg::RoundResultMsg{result, history_.cumulative_scores()});
    if (settings_.reveal_pause_ms > 0) {
      step.timers.push_back({settings_.reveal_pause_ms, TimerKind::RevealDone, k, PlayerId{}, 0, ""});
    } else {
      advance(step, now_ms);
    }
  }

  void advance(Step& step, std::int64_t now_ms) {
    if (!history_.complete()) {
      begin_round(step, phase_.round + 1, now_ms);
      return;
    }
    const auto& scores = final_scores(history_);
    emit(step, now_ms, event::GameOver{scores});
    broadcast(step, msg::GameOver{scores});
    questionnaire_pending_.clear();
    if (settings_.questionnaire) {
      for (const Seat& s : seats_) {
        if (!s.is_bot() && s.connection()) questionnaire_pending_.insert(s.player.index);
      }
    }
    if (questionnaire_pending_.empty()) {
      close(step, "completed", now_ms);
    } else {
      set_phase({PhaseKind::Questionnaire, -1});
    }
  }

  void close(Step& step, const std::string& reason, std::int64_t now_ms) {
    set_phase({PhaseKind::Closed, -1});
    emit(step, now_ms, event::SessionClosed{reason});
  }

  std::string id_;
  SessionSettings settings_;
  std::uint64_t seed_;
  Rng rng_;
  GameHistory history_;
  std::vector<Seat> seats_;
  SessionPhase phase_;
  std::vector<SessionPhase> phase_trace_;
  std::vector<std::optional<Money>> current_;
  std::set<int> questionnaire_pending_;
  std::int64_t last_ts_ = 0;
  bool started_ = false;
};

}  // namespace pgg
