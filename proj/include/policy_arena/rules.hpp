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

// Pure game rules for Congress vs. Evil Inc.: bribe forcing, Congress vote
// resolution, voter recall, phase automaton and win conditions. Nothing in
// this header touches I/O, clocks or randomness.

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "policy_arena/error.hpp"

namespace policy_arena {

using PlayerId = std::string;

// Integer money units (e.g. thousands of dollars).
struct Money {
  std::int64_t units = 0;

  constexpr Money() = default;
  constexpr explicit Money(std::int64_t u) : units(u) {}
  auto operator<=>(const Money&) const = default;
};

enum class Role { Voter, Congress, EvilInc, Facilitator };

enum class Phase {
  Lobby,
  BribeAllocationPhase,
  Hearing,
  CongressVote,
  VoterRecall,
  RoundEnd,
  GameEnd,
};

enum class Vote { For, Against };

constexpr std::string_view to_string(Role r) {
  switch (r) {
    case Role::Voter: return "Voter";
    case Role::Congress: return "Congress";
    case Role::EvilInc: return "EvilInc";
    case Role::Facilitator: return "Facilitator";
  }
  return "?";
}

constexpr std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Lobby: return "Lobby";
    case Phase::BribeAllocationPhase: return "BribeAllocationPhase";
    case Phase::Hearing: return "Hearing";
    case Phase::CongressVote: return "CongressVote";
    case Phase::VoterRecall: return "VoterRecall";
    case Phase::RoundEnd: return "RoundEnd";
    case Phase::GameEnd: return "GameEnd";
  }
  return "?";
}

constexpr std::string_view to_string(Vote v) {
  return v == Vote::For ? "For" : "Against";
}

inline std::optional<Role> parse_role(std::string_view s) {
  for (Role r : {Role::Voter, Role::Congress, Role::EvilInc, Role::Facilitator})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

inline std::optional<Phase> parse_phase(std::string_view s) {
  for (int i = 0; i <= static_cast<int>(Phase::GameEnd); ++i) {
    auto p = static_cast<Phase>(i);
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

inline std::optional<Vote> parse_vote(std::string_view s) {
  if (s == "For") return Vote::For;
  if (s == "Against") return Vote::Against;
  return std::nullopt;
}

struct Regulation {
  std::string id;
  std::string title;
  std::string summary;
  bool is_key = false;

  bool operator==(const Regulation&) const = default;
};

struct Scenario {
  std::string id;
  std::string topic;
  std::string key_issue;
  std::vector<Regulation> docket;  // play order
  std::string secret_brief;

  bool operator==(const Scenario&) const = default;

  const Regulation& key_regulation() const {
    auto it = std::find_if(docket.begin(), docket.end(),
                           [](const Regulation& r) { return r.is_key; });
    if (it == docket.end()) fail(Errc::ValidationError, "scenario has no key regulation");
    return *it;
  }
};

struct CongressCard {
  PlayerId member_id;
  Money bribe_threshold;
  bool in_office = true;

  bool operator==(const CongressCard&) const = default;
};

struct VoterCard {
  PlayerId voter_id;
  double engagement = 1.0;  // probability of taking part in a recall
  int strictness = 3;       // 1 (lax) .. 5 (wants strict regulation)

  bool operator==(const VoterCard&) const = default;
};

struct BribeCard {
  std::string card_id;
  Money amount;

  bool operator==(const BribeCard&) const = default;
};

struct BribeAllocation {
  std::map<PlayerId, std::string> assignments;  // member -> card_id

  bool operator==(const BribeAllocation&) const = default;
};

struct VoteRecord {
  PlayerId member_id;
  Vote vote = Vote::Against;
  bool forced = false;

  bool operator==(const VoteRecord&) const = default;
};

// nullopt is an abstention.
using RecallTarget = std::optional<PlayerId>;

struct RecallRecord {
  std::map<PlayerId, RecallTarget> ballots;
  std::optional<PlayerId> removed;

  bool operator==(const RecallRecord&) const = default;
};

struct DocketResult {
  std::string regulation_id;
  bool adopted = false;

  bool operator==(const DocketResult&) const = default;
};

struct Outcome {
  bool voters_win = false;
  bool evil_wins = false;
  std::vector<PlayerId> surviving_members;
  std::vector<DocketResult> docket_results;

  bool operator==(const Outcome&) const = default;
};

namespace detail {

inline const CongressCard* find_member(std::span<const CongressCard> congress,
                                       std::string_view id) {
  for (const auto& c : congress)
    if (c.member_id == id) return &c;
  return nullptr;
}

}  // namespace detail

inline std::size_t members_in_office(std::span<const CongressCard> congress) {
  return static_cast<std::size_t>(std::count_if(
      congress.begin(), congress.end(),
      [](const CongressCard& c) { return c.in_office; }));
}

// Returns the members whose vote is coerced to Against this round: those
// holding a card whose amount strictly exceeds their threshold. Any invalid
// assignment rejects the whole allocation.
inline std::set<PlayerId> apply_bribes(const BribeAllocation& allocation,
                                       std::span<const BribeCard> cards,
                                       std::span<const CongressCard> congress) {
  std::map<std::string_view, const BribeCard*> deck;
  for (const auto& card : cards) {
    if (card.amount.units <= 0)
      fail(Errc::ValidationError, "bribe card " + card.card_id + " has non-positive amount");
    if (!deck.emplace(card.card_id, &card).second)
      fail(Errc::CardReuse, "card id " + card.card_id + " appears twice in the deck");
  }

  std::set<std::string_view> used;
  std::set<PlayerId> forced;
  for (const auto& [member, card_id] : allocation.assignments) {
    const CongressCard* c = detail::find_member(congress, member);
    if (c == nullptr) fail(Errc::UnknownMember, member);
    if (!c->in_office) fail(Errc::MemberNotInOffice, member);
    auto it = deck.find(card_id);
    if (it == deck.end()) fail(Errc::UnknownCard, card_id);
    if (!used.insert(it->first).second) fail(Errc::CardReuse, card_id);
    if (it->second->amount > c->bribe_threshold) forced.insert(member);
  }
  return forced;
}

// Strict majority of in-office seats. Every in-office member must have
// exactly one ballot; forced members must already be recorded as Against.
inline bool resolve_vote(std::span<const VoteRecord> votes,
                         std::span<const CongressCard> congress) {
  std::set<std::string_view> seen;
  std::size_t for_count = 0;
  for (const auto& v : votes) {
    const CongressCard* c = detail::find_member(congress, v.member_id);
    if (c == nullptr) fail(Errc::UnknownMember, v.member_id);
    if (!c->in_office) fail(Errc::BallotFromRemovedMember, v.member_id);
    if (!seen.insert(v.member_id).second) fail(Errc::DuplicateBallot, v.member_id);
    if (v.forced && v.vote == Vote::For) fail(Errc::ForcedMemberManualVote, v.member_id);
    if (v.vote == Vote::For) ++for_count;
  }
  for (const auto& c : congress)
    if (c.in_office && !seen.contains(c.member_id)) fail(Errc::MissingBallot, c.member_id);
  return 2 * for_count > members_in_office(congress);
}

// Removes the unique plurality target if it reaches `quorum` ballots. Ties
// and all-abstain remove nobody.
inline RecallRecord resolve_recall(const std::map<PlayerId, RecallTarget>& ballots,
                                   std::span<const CongressCard> congress,
                                   std::span<const VoterCard> voters,
                                   int quorum = 1) {
  std::map<PlayerId, int> tally;
  for (const auto& [voter, target] : ballots) {
    bool registered = std::any_of(voters.begin(), voters.end(),
                                  [&](const VoterCard& v) { return v.voter_id == voter; });
    if (!registered) fail(Errc::UnknownVoter, voter);
    if (!target) continue;
    const CongressCard* c = detail::find_member(congress, *target);
    if (c == nullptr || !c->in_office) fail(Errc::TargetNotInOffice, *target);
    ++tally[*target];
  }

  RecallRecord record{ballots, std::nullopt};
  int best = 0;
  bool unique = false;
  for (const auto& [member, n] : tally) {
    if (n > best) {
      best = n;
      unique = true;
      record.removed = member;
    } else if (n == best) {
      unique = false;
    }
  }
  if (!unique || best < std::max(quorum, 1)) record.removed.reset();
  return record;
}

// Voters win iff the key regulation was adopted; Evil Inc. wins otherwise.
// Every member still in office wins individually.
inline Outcome evaluate_outcome(Phase phase, const Scenario& scenario,
                                std::span<const DocketResult> results,
                                std::span<const CongressCard> congress) {
  if (phase != Phase::GameEnd) fail(Errc::GameNotFinished, std::string(to_string(phase)));
  const std::string& key = scenario.key_regulation().id;
  Outcome out;
  out.docket_results.assign(results.begin(), results.end());
  out.voters_win = std::any_of(results.begin(), results.end(), [&](const DocketResult& r) {
    return r.regulation_id == key && r.adopted;
  });
  out.evil_wins = !out.voters_win;
  for (const auto& c : congress)
    if (c.in_office) out.surviving_members.push_back(c.member_id);
  return out;
}

struct TransitionContext {
  std::size_t round_index = 0;  // round in progress (or just finished, at RoundEnd)
  std::size_t docket_size = 0;
  std::size_t members_in_office = 0;
};

// Lobby -> (BribeAllocationPhase -> Hearing -> CongressVote -> VoterRecall ->
// RoundEnd) x docket -> GameEnd. RoundEnd ends the game early once Congress
// is empty.
inline bool legal_phase_transition(Phase from, Phase to, const TransitionContext& ctx) {
  const bool more_rounds = ctx.round_index + 1 < ctx.docket_size;
  const bool congress_left = ctx.members_in_office > 0;
  switch (from) {
    case Phase::Lobby:
      return to == Phase::BribeAllocationPhase && ctx.docket_size > 0 && congress_left;
    case Phase::BribeAllocationPhase: return to == Phase::Hearing;
    case Phase::Hearing: return to == Phase::CongressVote;
    case Phase::CongressVote: return to == Phase::VoterRecall;
    case Phase::VoterRecall: return to == Phase::RoundEnd;
    case Phase::RoundEnd:
      if (to == Phase::BribeAllocationPhase) return more_rounds && congress_left;
      if (to == Phase::GameEnd) return !more_rounds || !congress_left;
      return false;
    case Phase::GameEnd: return false;
  }
  return false;
}

}  // namespace policy_arena
