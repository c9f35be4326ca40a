// Copyright 2026 The Policy Arena Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// A live game session. Commands validate first and then commit events; the
// state only ever changes by folding committed events through apply_event,
// which is also what replay uses. A rejected command leaves the state
// untouched.

#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "policy_arena/config.hpp"
#include "policy_arena/event.hpp"
#include "policy_arena/rng.hpp"
#include "policy_arena/rules.hpp"
#include "policy_arena/scenario.hpp"

namespace policy_arena {

inline constexpr const char* kEngineVersion = "1.0.0";

struct Player {
  PlayerId id;
  std::string name;
  std::optional<Role> role;  // set once roles are assigned

  bool operator==(const Player&) const = default;
};

struct TranscriptEntry {
  std::size_t round_index = 0;
  PlayerId speaker;  // member id or kFacilitatorId
  std::string text;

  bool operator==(const TranscriptEntry&) const = default;
};

struct GameState {
  SessionConfig config;
  Scenario scenario;
  Phase phase = Phase::Lobby;
  std::size_t round_index = 0;
  std::vector<Player> players;  // join order
  std::vector<CongressCard> congress;
  std::vector<VoterCard> voters;
  std::vector<PlayerId> evil;
  std::vector<BribeCard> deck;  // current round
  BribeAllocation allocation;   // current round
  std::set<PlayerId> forced;    // current round
  std::set<PlayerId> spoken;    // current round
  std::vector<TranscriptEntry> transcript;
  std::vector<std::vector<VoteRecord>> votes;  // per round
  std::vector<RecallRecord> recalls;           // per round
  std::map<PlayerId, RecallTarget> pending_recall;
  std::vector<DocketResult> docket_results;
  std::optional<Outcome> outcome;
  std::vector<GameEvent> log;
  Rng rng;

  bool operator==(const GameState&) const = default;

  const Regulation& current_regulation() const { return scenario.docket.at(round_index); }

  std::optional<Role> role_of(std::string_view id) const {
    if (id == kFacilitatorId) return Role::Facilitator;
    for (const auto& p : players)
      if (p.id == id) return p.role;
    return std::nullopt;
  }

  bool is_player(std::string_view id) const {
    return std::any_of(players.begin(), players.end(), [&](const Player& p) { return p.id == id; });
  }

  const CongressCard* member(std::string_view id) const {
    for (const auto& c : congress)
      if (c.member_id == id) return &c;
    return nullptr;
  }

  const VoterCard* voter(std::string_view id) const {
    for (const auto& v : voters)
      if (v.voter_id == id) return &v;
    return nullptr;
  }

  std::vector<PlayerId> in_office() const {
    std::vector<PlayerId> out;
    for (const auto& c : congress)
      if (c.in_office) out.push_back(c.member_id);
    return out;
  }

  TransitionContext transition_context() const {
    return {round_index, scenario.docket.size(), members_in_office(congress)};
  }

  const std::vector<VoteRecord>& current_votes() const {
    static const std::vector<VoteRecord> empty;
    return votes.empty() ? empty : votes.back();
  }
};

// Outcome of a finished session.
inline Outcome evaluate_outcome(const GameState& s) {
  return evaluate_outcome(s.phase, s.scenario, s.docket_results, s.congress);
}

// Fresh per-round deck; card ids are "r<round>-c<index>".
inline std::vector<BribeCard> deal_deck(const SessionConfig& c, std::size_t round_index) {
  std::vector<BribeCard> deck;
  for (std::size_t i = 0; i < c.bribe_deck.size(); ++i)
    deck.push_back({"r" + std::to_string(round_index + 1) + "-c" + std::to_string(i + 1), c.bribe_deck[i]});
  return deck;
}

// Seeded role draw: shuffle the joined players, seat the first
// congress_seats in Congress, the next evil_players in Evil Inc., the rest
// are Voters. Then thresholds and voter cards are dealt.
inline events::RolesAssigned deal_roles(const std::vector<Player>& players, const SessionConfig& c,
                                        Rng& rng) {
  std::vector<PlayerId> order;
  for (const auto& p : players) order.push_back(p.id);
  rng.shuffle(std::span<PlayerId>(order));

  events::RolesAssigned out;
  const auto seats = static_cast<std::size_t>(c.congress_seats);
  const auto evil = static_cast<std::size_t>(c.evil_players);
  for (std::size_t i = 0; i < order.size(); ++i) {
    Role r = i < seats ? Role::Congress : i < seats + evil ? Role::EvilInc : Role::Voter;
    out.roles[order[i]] = r;
  }
  for (std::size_t i = 0; i < seats; ++i) {
    Money threshold;
    if (!c.thresholds.explicit_values.empty()) {
      threshold = c.thresholds.explicit_values[i];
    } else {
      const auto steps = static_cast<std::uint64_t>((c.thresholds.max.units - c.thresholds.min.units) /
                                                    c.thresholds.step.units);
      threshold = Money{c.thresholds.min.units +
                        static_cast<std::int64_t>(rng.uniform_index(steps + 1)) * c.thresholds.step.units};
    }
    out.congress.push_back({order[i], threshold, true});
  }
  const auto& vc = c.voter_cards;
  int weight_total = 0;
  for (int w : vc.strictness_weights) weight_total += w;
  for (std::size_t i = seats + evil; i < order.size(); ++i) {
    double engagement = vc.engagement_min + (vc.engagement_max - vc.engagement_min) * rng.uniform_unit();
    auto pick = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(weight_total)));
    int strictness = 1;
    for (int w : vc.strictness_weights) {
      if (pick < w) break;
      pick -= w;
      ++strictness;
    }
    out.voters.push_back({order[i], engagement, strictness});
  }
  std::sort(out.voters.begin(), out.voters.end(),
            [](const VoterCard& a, const VoterCard& b) { return a.voter_id < b.voter_id; });
  return out;
}

namespace detail {

[[noreturn]] inline void corrupt(const std::string& why) { fail(Errc::CorruptLog, why); }

struct EventApplier {
  GameState& s;
  const GameEvent& ev;

  void operator()(const events::PlayerJoined& e) {
    if (s.phase != Phase::Lobby) corrupt("join outside the lobby");
    if (s.is_player(e.player_id) || e.player_id == kFacilitatorId) corrupt("duplicate player " + e.player_id);
    s.players.push_back({e.player_id, e.name, std::nullopt});
  }

  void operator()(const events::RolesAssigned& e) {
    if (s.phase != Phase::Lobby || !s.congress.empty()) corrupt("roles assigned twice");
    Rng probe = s.rng;
    if (deal_roles(s.players, s.config, probe) != e) corrupt("role assignment does not match the seed");
    s.rng = probe;
    for (auto& p : s.players) p.role = e.roles.at(p.id);
    s.congress = e.congress;
    s.voters = e.voters;
    for (const auto& p : s.players)
      if (p.role == Role::EvilInc) s.evil.push_back(p.id);
  }

  void operator()(const events::PhaseAdvanced& e) {
    if (e.from != s.phase) corrupt("phase advance from a phase the session is not in");
    if (!legal_phase_transition(e.from, e.to, s.transition_context()))
      corrupt(std::string("illegal phase transition ") + std::string(to_string(e.from)) + " -> " +
              std::string(to_string(e.to)));
    if (e.to == Phase::BribeAllocationPhase) {
      const std::size_t next = e.from == Phase::Lobby ? 0 : s.round_index + 1;
      if (e.round_index != next) corrupt("round index out of sequence");
      s.round_index = next;
      s.deck = deal_deck(s.config, next);
      s.allocation = {};
      s.forced.clear();
      s.spoken.clear();
      s.pending_recall.clear();
      s.votes.emplace_back();
    } else if (e.round_index != s.round_index) {
      corrupt("round index out of sequence");
    }
    s.phase = e.to;
  }

  void operator()(const events::BribesAllocated& e) {
    if (s.phase != Phase::BribeAllocationPhase) corrupt("bribes outside the allocation phase");
    if (e.round_index != s.round_index) corrupt("bribes for the wrong round");
    if (apply_bribes(e.allocation, s.deck, s.congress) != e.forced) corrupt("forced set mismatch");
    s.allocation = e.allocation;
    s.forced = e.forced;
  }

  void operator()(const events::StatementMade& e) {
    if (s.phase != Phase::Hearing) corrupt("statement outside the hearing");
    const CongressCard* m = s.member(e.member_id);
    if (m == nullptr || !m->in_office) corrupt("statement from a non-member");
    if (!s.spoken.insert(e.member_id).second) corrupt("second statement in a round");
    s.transcript.push_back({s.round_index, e.member_id, e.text});
  }

  void operator()(const events::CeoReplied& e) {
    if (s.phase != Phase::Hearing) corrupt("reply outside the hearing");
    s.transcript.push_back({s.round_index, kFacilitatorId, e.text});
  }

  void operator()(const events::VoteCast& e) {
    if (s.phase != Phase::CongressVote) corrupt("vote outside the vote phase");
    const auto& r = e.record;
    const CongressCard* m = s.member(r.member_id);
    if (m == nullptr || !m->in_office) corrupt("vote from a non-member");
    if (r.forced != s.forced.contains(r.member_id)) corrupt("forced flag mismatch");
    if (r.forced && r.vote != Vote::Against) corrupt("forced vote is not Against");
    auto& round = s.votes.back();
    for (const auto& v : round)
      if (v.member_id == r.member_id) corrupt("duplicate vote");
    round.push_back(r);
  }

  void operator()(const events::VoteResolved& e) {
    if (s.phase != Phase::CongressVote) corrupt("vote resolved outside the vote phase");
    if (e.regulation_id != s.current_regulation().id) corrupt("vote resolved for the wrong regulation");
    if (e.votes != s.votes.back()) corrupt("resolved ballots differ from cast ballots");
    if (resolve_vote(s.votes.back(), s.congress) != e.adopted) corrupt("vote result mismatch");
    s.docket_results.push_back({e.regulation_id, e.adopted});
  }

  void operator()(const events::RecallBallotCast& e) {
    if (s.phase != Phase::VoterRecall) corrupt("recall ballot outside the recall phase");
    if (s.voter(e.voter_id) == nullptr) corrupt("recall ballot from a non-voter");
    if (e.target) {
      const CongressCard* m = s.member(*e.target);
      if (m == nullptr || !m->in_office) corrupt("recall target not in office");
    }
    if (!s.pending_recall.emplace(e.voter_id, e.target).second) corrupt("duplicate recall ballot");
  }

  void operator()(const events::RecallResolved& e) {
    if (s.phase != Phase::VoterRecall) corrupt("recall resolved outside the recall phase");
    if (resolve_recall(s.pending_recall, s.congress, s.voters, s.config.recall_quorum) != e.record)
      corrupt("recall result mismatch");
    if (e.record.removed) {
      for (auto& c : s.congress)
        if (c.member_id == *e.record.removed) c.in_office = false;
    }
    s.recalls.push_back(e.record);
    s.pending_recall.clear();
  }

  void operator()(const events::GameEnded& e) {
    if (s.phase != Phase::GameEnd || s.outcome) corrupt("game ended twice or before GameEnd");
    std::size_t next = s.docket_results.size();
    for (const auto& id : e.auto_failed) {
      if (next >= s.scenario.docket.size() || s.scenario.docket[next].id != id)
        corrupt("auto-failed regulation out of docket order");
      s.docket_results.push_back({id, false});
      ++next;
    }
    if (s.docket_results.size() != s.scenario.docket.size()) corrupt("docket incomplete at game end");
    Outcome expected = evaluate_outcome(s);
    if (expected != e.outcome) corrupt("outcome mismatch");
    s.outcome = expected;
  }
};

}  // namespace detail

// Folds one event into the state. Throws CorruptLog if the event could not
// have been produced from this state.
inline void apply_event(GameState& s, const GameEvent& ev) {
  if (ev.seq != s.log.size() + 1) fail(Errc::CorruptLog, "sequence gap at " + std::to_string(ev.seq));
  try {
    std::visit(detail::EventApplier{s, ev}, ev.payload);
  } catch (const Error& e) {
    if (e.code() == Errc::CorruptLog) throw;
    fail(Errc::CorruptLog, "event " + std::to_string(ev.seq) + ": " + e.what());
  }
  s.log.push_back(ev);
}

using Clock = std::function<std::int64_t()>;

inline std::int64_t wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

class Session {
 public:
  using Observer = std::function<void(const GameEvent&)>;

  Session(Scenario scenario, SessionConfig config, Clock clock = wall_clock_ms)
      : clock_(std::move(clock)) {
    validate(config);
    validate(scenario);
    state_.config = std::move(config);
    state_.scenario = std::move(scenario);
    state_.rng = Rng(state_.config.rng_seed);
  }

  const GameState& state() const { return state_; }
  const std::vector<GameEvent>& log() const { return state_.log; }

  void set_observer(Observer obs) { observer_ = std::move(obs); }

  // Lobby only. Player ids are assigned in join order: P1, P2, ...
  PlayerId join(const std::string& name) {
    if (state_.phase != Phase::Lobby) fail(Errc::WrongPhase, "players can only join in the lobby");
    if (name.empty()) fail(Errc::MalformedPayload, "player name must be non-empty");
    PlayerId id = "P" + std::to_string(state_.players.size() + 1);
    commit(id, events::PlayerJoined{id, name});
    return id;
  }

  void assign_roles(const PlayerId& actor = kFacilitatorId) {
    require_facilitator(actor);
    require_phase(Phase::Lobby);
    if (static_cast<int>(state_.players.size()) < state_.config.min_players())
      fail(Errc::NotEnoughPlayers, std::to_string(state_.players.size()) + " joined, " +
                                       std::to_string(state_.config.min_players()) + " required");
    Rng probe = state_.rng;
    commit(kFacilitatorId, deal_roles(state_.players, state_.config, probe));
    advance(Phase::BribeAllocationPhase, 0);
  }

  void submit_bribe_allocation(const PlayerId& actor, const BribeAllocation& allocation) {
    if (state_.role_of(actor) != Role::EvilInc) fail(Errc::NotEvilInc, actor);
    require_phase(Phase::BribeAllocationPhase);
    finish_allocation(actor, allocation);
  }

  void submit_statement(const PlayerId& member, const std::string& text) {
    if (state_.role_of(member) != Role::Congress) fail(Errc::NotCongress, member);
    require_phase(Phase::Hearing);
    const CongressCard* m = state_.member(member);
    if (!m->in_office) fail(Errc::NotInOffice, member);
    if (state_.spoken.contains(member)) fail(Errc::AlreadySpoke, member);
    commit(member, events::StatementMade{member, text});
  }

  void ceo_reply(const PlayerId& actor, const std::string& text) {
    require_facilitator(actor);
    require_phase(Phase::Hearing);
    commit(kFacilitatorId, events::CeoReplied{text});
  }

  void cast_vote(const PlayerId& member, Vote choice) {
    if (state_.role_of(member) != Role::Congress) fail(Errc::NotCongress, member);
    require_phase(Phase::CongressVote);
    if (!state_.member(member)->in_office) fail(Errc::NotInOffice, member);
    if (state_.forced.contains(member)) fail(Errc::ForcedMemberManualVote, member);
    for (const auto& v : state_.current_votes())
      if (v.member_id == member) fail(Errc::DuplicateBallot, member);
    commit(member, events::VoteCast{{member, choice, false}});
    maybe_resolve_vote();
  }

  void cast_recall_ballot(const PlayerId& voter, const RecallTarget& target) {
    if (state_.voter(voter) == nullptr) fail(Errc::UnknownVoter, voter);
    require_phase(Phase::VoterRecall);
    if (target) {
      const CongressCard* m = state_.member(*target);
      if (m == nullptr || !m->in_office) fail(Errc::TargetNotInOffice, *target);
    }
    if (state_.pending_recall.contains(voter)) fail(Errc::DuplicateBallot, voter);
    commit(voter, events::RecallBallotCast{voter, target});
    if (state_.pending_recall.size() == state_.voters.size()) resolve_recall_phase();
  }

  // Facilitator pacing control.
  //   Lobby: deal roles and start. BribeAllocationPhase: no allocation this
  //   round. Hearing: open the vote. VoterRecall: resolve with the ballots in.
  void close_phase(const PlayerId& actor = kFacilitatorId) {
    require_facilitator(actor);
    switch (state_.phase) {
      case Phase::Lobby: assign_roles(actor); return;
      case Phase::BribeAllocationPhase: finish_allocation(actor, {}); return;
      case Phase::Hearing: open_vote(); return;
      case Phase::VoterRecall: resolve_recall_phase(); return;
      case Phase::CongressVote:
        for (const auto& id : state_.in_office()) {
          bool cast = std::any_of(state_.current_votes().begin(), state_.current_votes().end(),
                                  [&](const VoteRecord& v) { return v.member_id == id; });
          if (!cast) fail(Errc::MissingBallot, id);
        }
        return;
      default: fail(Errc::WrongPhase, std::string(to_string(state_.phase)));
    }
  }

  Outcome outcome() const { return evaluate_outcome(state_); }

 private:
  void require_phase(Phase p) const {
    if (state_.phase != p)
      fail(Errc::WrongPhase, "expected " + std::string(to_string(p)) + ", session is in " +
                                 std::string(to_string(state_.phase)));
  }

  void require_facilitator(const PlayerId& actor) const {
    if (actor != kFacilitatorId) fail(Errc::NotFacilitator, actor);
  }

  void commit(const PlayerId& actor, EventPayload payload) {
    GameEvent ev{state_.log.size() + 1, clock_(), actor, std::move(payload)};
    apply_event(state_, ev);
    if (observer_) observer_(state_.log.back());
  }

  void advance(Phase to, std::size_t round) {
    commit(kSystemActor, events::PhaseAdvanced{state_.phase, to, round});
  }

  void finish_allocation(const PlayerId& actor, const BribeAllocation& allocation) {
    auto forced = apply_bribes(allocation, state_.deck, state_.congress);
    commit(actor, events::BribesAllocated{state_.round_index, allocation, forced});
    advance(Phase::Hearing, state_.round_index);
  }

  void open_vote() {
    advance(Phase::CongressVote, state_.round_index);
    for (const auto& id : state_.in_office())
      if (state_.forced.contains(id)) commit(kSystemActor, events::VoteCast{{id, Vote::Against, true}});
    maybe_resolve_vote();
  }

  void maybe_resolve_vote() {
    if (state_.current_votes().size() < members_in_office(state_.congress)) return;
    bool adopted = resolve_vote(state_.current_votes(), state_.congress);
    commit(kSystemActor,
           events::VoteResolved{state_.current_regulation().id, state_.current_votes(), adopted});
    advance(Phase::VoterRecall, state_.round_index);
  }

  void resolve_recall_phase() {
    RecallRecord record =
        resolve_recall(state_.pending_recall, state_.congress, state_.voters, state_.config.recall_quorum);
    commit(kSystemActor, events::RecallResolved{record});
    advance(Phase::RoundEnd, state_.round_index);
    const auto ctx = state_.transition_context();
    if (legal_phase_transition(Phase::RoundEnd, Phase::BribeAllocationPhase, ctx)) {
      advance(Phase::BribeAllocationPhase, state_.round_index + 1);
      return;
    }
    advance(Phase::GameEnd, state_.round_index);
    events::GameEnded ended;
    GameState preview = state_;
    for (std::size_t i = preview.docket_results.size(); i < preview.scenario.docket.size(); ++i) {
      ended.auto_failed.push_back(preview.scenario.docket[i].id);
      preview.docket_results.push_back({preview.scenario.docket[i].id, false});
    }
    ended.outcome = evaluate_outcome(preview);
    commit(kSystemActor, ended);
  }

  GameState state_;
  Clock clock_;
  Observer observer_;
};

// --- hashing and replay ----------------------------------------------------

inline Json state_to_json(const GameState& s, bool normalize_timestamps = true) {
  Json players = Json::array();
  for (const auto& p : s.players)
    players.push_back({{"id", p.id}, {"name", p.name}, {"role", p.role ? Json(*p.role) : Json(nullptr)}});
  Json transcript = Json::array();
  for (const auto& t : s.transcript)
    transcript.push_back({{"round_index", t.round_index}, {"speaker", t.speaker}, {"text", t.text}});
  Json log = Json::array();
  for (auto e : s.log) {
    if (normalize_timestamps) e.timestamp_ms = 0;
    log.push_back(event_to_json(e));
  }
  Json recalls = Json::array();
  for (const auto& r : s.recalls) recalls.push_back(r);
  ScenarioFile sf;
  sf.scenario = s.scenario;
  return {{"config", s.config},
          {"scenario", scenario_to_json(sf)},
          {"phase", s.phase},
          {"round_index", s.round_index},
          {"players", players},
          {"congress", s.congress},
          {"voters", s.voters},
          {"evil", s.evil},
          {"deck", s.deck},
          {"allocation", s.allocation},
          {"forced", s.forced},
          {"spoken", s.spoken},
          {"transcript", transcript},
          {"votes", s.votes},
          {"recalls", recalls},
          {"pending_recall", recall_ballots_to_json(s.pending_recall)},
          {"docket_results", s.docket_results},
          {"outcome", s.outcome ? Json(*s.outcome) : Json(nullptr)},
          {"log", log},
          {"rng", s.rng.state_string()}};
}

// FNV-1a over the canonical JSON of the state, timestamps excluded.
inline std::uint64_t state_hash(const GameState& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : state_to_json(s).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct ReplayResult {
  GameState state;
  bool finished = false;
};

// Folds a log from a fresh session. A log that stops early yields the state
// at that point with finished = false.
inline ReplayResult replay(std::span<const GameEvent> log, const Scenario& scenario,
                           const SessionConfig& config) {
  Session fresh(scenario, config, [] { return std::int64_t{0}; });
  GameState s = fresh.state();
  for (const auto& ev : log) apply_event(s, ev);
  const bool finished = s.phase == Phase::GameEnd && s.outcome.has_value();
  return {std::move(s), finished};
}

}  // namespace policy_arena
