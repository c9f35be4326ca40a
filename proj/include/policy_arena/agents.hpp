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

// Bot policies for every seat at the table, and a headless driver that plays
// a complete game through Session.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "policy_arena/session.hpp"

namespace policy_arena {

enum class PolicyKind {
  EvilGreedy,
  EvilRandom,
  CongressSincere,
  CongressPublicitySeeking,
  VoterCardDriven,
  VoterRandom,
};

inline constexpr std::array<std::string_view, 6> kPolicyKindNames = {
    "EvilGreedy", "EvilRandom", "CongressSincere", "CongressPublicitySeeking", "VoterCardDriven", "VoterRandom"};

inline std::string_view to_string(PolicyKind k) { return kPolicyKindNames[static_cast<std::size_t>(k)]; }

inline PolicyKind parse_policy_kind(std::string_view s) {
  for (std::size_t i = 0; i < kPolicyKindNames.size(); ++i)
    if (kPolicyKindNames[i] == s) return static_cast<PolicyKind>(i);
  fail(Errc::InvalidConfig, "unknown policy '" + std::string(s) + "'");
}

inline Role role_of(PolicyKind k) {
  switch (k) {
    case PolicyKind::EvilGreedy:
    case PolicyKind::EvilRandom: return Role::EvilInc;
    case PolicyKind::CongressSincere:
    case PolicyKind::CongressPublicitySeeking: return Role::Congress;
    default: return Role::Voter;
  }
}

struct AgentPolicy {
  PolicyKind kind = PolicyKind::VoterCardDriven;
  // EvilGreedy: share of playable cards actually played.
  // EvilRandom: chance each card is played.
  double aggressiveness = 1.0;
  // CongressSincere: chance of voting For.
  double p_for = 0.6;
  // VoterRandom: chance of casting a non-abstain recall ballot.
  double participation = 0.5;

  Role role() const { return role_of(kind); }
  bool operator==(const AgentPolicy&) const = default;
};

struct PolicySet {
  AgentPolicy evil{PolicyKind::EvilGreedy};
  AgentPolicy congress{PolicyKind::CongressSincere};
  AgentPolicy voter{PolicyKind::VoterCardDriven};
  bool operator==(const PolicySet&) const = default;
};

inline void validate(const PolicySet& p) {
  auto check = [](const AgentPolicy& a, Role want, const char* slot) {
    if (a.role() != want)
      fail(Errc::InvalidConfig, std::string(slot) + " policy " + std::string(to_string(a.kind)) + " plays the wrong role");
    for (double x : {a.aggressiveness, a.p_for, a.participation})
      if (!(x >= 0.0 && x <= 1.0)) fail(Errc::InvalidConfig, std::string(slot) + " policy parameters must be in [0,1]");
  };
  check(p.evil, Role::EvilInc, "evil");
  check(p.congress, Role::Congress, "congress");
  check(p.voter, Role::Voter, "voter");
}

inline Json policy_to_json(const AgentPolicy& a) {
  Json j = {{"kind", to_string(a.kind)}};
  switch (a.kind) {
    case PolicyKind::EvilGreedy:
    case PolicyKind::EvilRandom: j["aggressiveness"] = a.aggressiveness; break;
    case PolicyKind::CongressSincere: j["p_for"] = a.p_for; break;
    case PolicyKind::VoterRandom: j["participation"] = a.participation; break;
    default: break;
  }
  return j;
}

inline AgentPolicy policy_from_json(const Json& j) {
  jsonutil::expect_keys(j, {"kind", "aggressiveness", "p_for", "participation"}, "policy", Errc::InvalidConfig);
  AgentPolicy a;
  try {
    a.kind = parse_policy_kind(j.at("kind").get<std::string>());
    a.aggressiveness = j.value("aggressiveness", a.aggressiveness);
    a.p_for = j.value("p_for", a.p_for);
    a.participation = j.value("participation", a.participation);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::InvalidConfig, std::string("policy: ") + e.what());
  }
  return a;
}

inline Json policies_to_json(const PolicySet& p) {
  return {{"evil", policy_to_json(p.evil)}, {"congress", policy_to_json(p.congress)}, {"voter", policy_to_json(p.voter)}};
}

// Missing slots keep their defaults.
inline PolicySet policies_from_json(const Json& j) {
  jsonutil::expect_keys(j, {"evil", "congress", "voter"}, "policies", Errc::InvalidConfig);
  PolicySet p;
  if (j.contains("evil")) p.evil = policy_from_json(j.at("evil"));
  if (j.contains("congress")) p.congress = policy_from_json(j.at("congress"));
  if (j.contains("voter")) p.voter = policy_from_json(j.at("voter"));
  validate(p);
  return p;
}

// What a bot in seat `self` is allowed to know. Built from the full state but
// holding only what the role projection would show that player.
struct PolicyView {
  PlayerId self;
  Role role = Role::Voter;
  std::size_t round_index = 0;
  const Regulation* regulation = nullptr;
  std::vector<PlayerId> in_office;                     // seat order
  std::vector<std::vector<VoteRecord>> public_votes;   // forced flags cleared
  std::vector<RecallRecord> recalls;
  std::optional<CongressCard> own_member;
  bool forced = false;
  std::optional<VoterCard> own_voter;
  std::vector<BribeCard> deck;                // Evil Inc. only
  std::vector<CongressCard> thresholds;       // Evil Inc., when the config reveals them
};

inline PolicyView make_view(const GameState& s, const PlayerId& self) {
  PolicyView v;
  v.self = self;
  v.role = s.role_of(self).value_or(Role::Voter);
  v.round_index = s.round_index;
  if (s.round_index < s.scenario.docket.size()) v.regulation = &s.scenario.docket[s.round_index];
  v.in_office = s.in_office();
  v.public_votes = s.votes;
  for (auto& round : v.public_votes)
    for (auto& r : round) r.forced = false;
  v.recalls = s.recalls;
  if (const CongressCard* c = s.member(self)) v.own_member = *c;
  v.forced = s.forced.contains(self);
  if (const VoterCard* vc = s.voter(self)) v.own_voter = *vc;
  if (v.role == Role::EvilInc) {
    v.deck = s.deck;
    if (s.config.thresholds_visible_to_evil) v.thresholds = s.congress;
  }
  return v;
}

namespace agents {

inline std::pair<int, int> public_record(const PolicyView& v, const PlayerId& member) {
  int for_votes = 0, against = 0;
  for (const auto& round : v.public_votes)
    for (const auto& r : round)
      if (r.member_id == member) (r.vote == Vote::For ? for_votes : against) += 1;
  return {for_votes, against};
}

inline BribeAllocation evil_greedy(const PolicyView& v, const AgentPolicy& p, Rng& rng) {
  // Largest cards go to the members most likely to pass regulation: the
  // lowest known thresholds when visible, else the strongest For records.
  std::vector<PlayerId> targets = v.in_office;
  rng.shuffle(std::span<PlayerId>(targets));
  auto threshold = [&](const PlayerId& id) {
    for (const auto& c : v.thresholds)
      if (c.member_id == id) return c.bribe_threshold.units;
    return std::int64_t{0};
  };
  std::stable_sort(targets.begin(), targets.end(), [&](const PlayerId& a, const PlayerId& b) {
    if (!v.thresholds.empty()) return threshold(a) < threshold(b);
    return public_record(v, a).first > public_record(v, b).first;
  });
  std::vector<BribeCard> cards = v.deck;
  std::stable_sort(cards.begin(), cards.end(),
                   [](const BribeCard& a, const BribeCard& b) { return a.amount.units > b.amount.units; });
  const std::size_t playable = std::min(cards.size(), targets.size());
  const auto n = static_cast<std::size_t>(std::ceil(p.aggressiveness * static_cast<double>(playable)));
  BribeAllocation out;
  for (std::size_t i = 0; i < n; ++i) out.assignments[targets[i]] = cards[i].card_id;
  return out;
}

inline BribeAllocation evil_random(const PolicyView& v, const AgentPolicy& p, Rng& rng) {
  std::vector<PlayerId> targets = v.in_office;
  rng.shuffle(std::span<PlayerId>(targets));
  BribeAllocation out;
  std::size_t next = 0;
  for (const auto& card : v.deck) {
    if (next == targets.size()) break;
    if (rng.bernoulli(p.aggressiveness)) out.assignments[targets[next++]] = card.card_id;
  }
  return out;
}

inline Vote congress_sincere(const AgentPolicy& p, Rng& rng) {
  return rng.bernoulli(p.p_for) ? Vote::For : Vote::Against;
}

// Votes the way the electorate has punished least: if removed members mostly
// voted For, vote Against, otherwise For.
inline Vote congress_publicity(const PolicyView& v) {
  int punished_for = 0, punished_against = 0;
  for (const auto& r : v.recalls) {
    if (!r.removed) continue;
    auto [f, a] = public_record(v, *r.removed);
    punished_for += f;
    punished_against += a;
  }
  return punished_for > punished_against ? Vote::Against : Vote::For;
}

// Participates with probability = engagement. Strict voters (4-5) target the
// member with the most Against votes, lenient voters (1-2) the most For
// votes, neutral voters (3) abstain. Ties go to the earliest seat; a member
// with no contrary votes is never targeted.
inline RecallTarget voter_card_driven(const PolicyView& v, Rng& rng) {
  const VoterCard& card = *v.own_voter;
  if (!rng.bernoulli(card.engagement)) return std::nullopt;
  if (card.strictness == 3) return std::nullopt;
  const bool strict = card.strictness >= 4;
  RecallTarget best;
  int best_count = 0;
  for (const auto& id : v.in_office) {
    auto [f, a] = public_record(v, id);
    const int contrary = strict ? a : f;
    if (contrary > best_count) {
      best = id;
      best_count = contrary;
    }
  }
  return best;
}

inline RecallTarget voter_random(const PolicyView& v, const AgentPolicy& p, Rng& rng) {
  if (v.in_office.empty() || !rng.bernoulli(p.participation)) return std::nullopt;
  return v.in_office[rng.uniform_index(v.in_office.size())];
}

inline std::string statement_text(const PolicyView& v, PolicyKind kind) {
  const std::string title = v.regulation ? v.regulation->title : "this regulation";
  if (kind == PolicyKind::CongressPublicitySeeking)
    return v.self + ": My constituents demand answers on \"" + title + "\".";
  return v.self + ": How would \"" + title + "\" affect your products?";
}

inline const char* kCeoReply = "Evil Inc. is committed to responsible innovation.";

}  // namespace agents

inline BribeAllocation choose_allocation(const PolicyView& v, const AgentPolicy& p, Rng& rng) {
  return p.kind == PolicyKind::EvilRandom ? agents::evil_random(v, p, rng) : agents::evil_greedy(v, p, rng);
}

inline Vote choose_vote(const PolicyView& v, const AgentPolicy& p, Rng& rng) {
  return p.kind == PolicyKind::CongressPublicitySeeking ? agents::congress_publicity(v) : agents::congress_sincere(p, rng);
}

inline RecallTarget choose_recall(const PolicyView& v, const AgentPolicy& p, Rng& rng) {
  return p.kind == PolicyKind::VoterRandom ? agents::voter_random(v, p, rng) : agents::voter_card_driven(v, rng);
}

// Per-game numbers the batch runner aggregates.
struct GameRecord {
  Outcome outcome;
  int seated = 0;
  int removed = 0;
  int forced_total = 0;
  int allocation_rounds = 0;
  std::vector<GameEvent> log;
};

// The game's engine seed is `seed`; bot decisions draw from a separate
// stream seeded with derive_seed(seed, 0).
inline GameRecord play_game(const Scenario& scenario, SessionConfig config, const PolicySet& policies,
                            std::uint64_t seed, bool keep_log = false) {
  validate(policies);
  config.rng_seed = seed;
  Session session(scenario, config, [] { return std::int64_t{0}; });
  Rng rng(derive_seed(seed, 0));
  GameRecord rec;
  try {
    for (int i = 0; i < config.simulated_players; ++i) session.join("bot" + std::to_string(i + 1));
    session.assign_roles();
    const GameState& s = session.state();
    rec.seated = static_cast<int>(s.congress.size());
    while (s.phase != Phase::GameEnd) {
      switch (s.phase) {
        case Phase::BribeAllocationPhase: {
          const PlayerId& lead = s.evil.at(0);
          session.submit_bribe_allocation(lead, choose_allocation(make_view(s, lead), policies.evil, rng));
          rec.forced_total += static_cast<int>(s.forced.size());
          rec.allocation_rounds += 1;
          break;
        }
        case Phase::Hearing: {
          for (const auto& id : s.in_office())
            session.submit_statement(id, agents::statement_text(make_view(s, id), policies.congress.kind));
          if (!s.spoken.empty()) session.ceo_reply(kFacilitatorId, agents::kCeoReply);
          session.close_phase();
          break;
        }
        case Phase::CongressVote: {
          for (const auto& id : s.in_office()) {
            if (s.phase != Phase::CongressVote) break;
            if (s.forced.contains(id)) continue;
            session.cast_vote(id, choose_vote(make_view(s, id), policies.congress, rng));
          }
          break;
        }
        case Phase::VoterRecall: {
          std::vector<PlayerId> voters;
          for (const auto& v : s.voters) voters.push_back(v.voter_id);
          for (const auto& id : voters) {
            if (s.phase != Phase::VoterRecall) break;
            session.cast_recall_ballot(id, choose_recall(make_view(s, id), policies.voter, rng));
          }
          if (s.phase == Phase::VoterRecall) session.close_phase();
          break;
        }
        default: fail(Errc::PolicyIllegalAction, "driver stuck in phase " + std::string(to_string(s.phase)));
      }
    }
    rec.outcome = session.outcome();
    rec.removed = rec.seated - static_cast<int>(rec.outcome.surviving_members.size());
  } catch (const Error& e) {
    if (e.code() == Errc::PolicyIllegalAction) throw;
    fail(Errc::PolicyIllegalAction, std::string(to_string(e.code())) + ": " + e.detail());
  }
  if (keep_log) rec.log = session.log();
  return rec;
}

inline Outcome run_game(const Scenario& scenario, const SessionConfig& config, const PolicySet& policies,
                        std::uint64_t seed) {
  return play_game(scenario, config, policies, seed).outcome;
}

}  // namespace policy_arena
