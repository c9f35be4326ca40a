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

// Helpers for driving a Session by hand in tests.

#pragma once

#include <string>
#include <vector>

#include "policy_arena/builtin_scenarios.hpp"
#include "policy_arena/session.hpp"

namespace policy_arena::testing_util {

inline Clock FixedClock() {
  return [] { return std::int64_t{1700000000000}; };
}

inline Clock CountingClock() {
  auto t = std::make_shared<std::int64_t>(0);
  return [t] { return ++*t; };
}

// Three seats, one Evil player, two voters, thresholds dealt in seat order.
inline SessionConfig SmallConfig(std::uint64_t seed = 42) {
  SessionConfig c;
  c.congress_seats = 3;
  c.evil_players = 1;
  c.min_voters = 2;
  c.simulated_players = 6;
  c.thresholds.explicit_values = {Money{500}, Money{300}, Money{100}};
  c.rng_seed = seed;
  return c;
}

inline Scenario ScenarioN(int n) { return builtin_scenarios().at(static_cast<std::size_t>(n - 1)).scenario; }

struct Table {
  Session session;

  Table(Scenario scenario, SessionConfig config, int players, Clock clock = FixedClock())
      : session(std::move(scenario), std::move(config), std::move(clock)) {
    for (int i = 0; i < players; ++i) session.join("student" + std::to_string(i + 1));
    session.assign_roles();
  }

  const GameState& s() const { return session.state(); }

  // Members in seat order (seat i holds thresholds.explicit_values[i]).
  std::vector<PlayerId> members() const {
    std::vector<PlayerId> out;
    for (const auto& c : s().congress) out.push_back(c.member_id);
    return out;
  }
  std::vector<PlayerId> voters() const {
    std::vector<PlayerId> out;
    for (const auto& v : s().voters) out.push_back(v.voter_id);
    return out;
  }
  PlayerId evil() const { return s().evil.at(0); }

  std::string card(std::size_t i) const { return s().deck.at(i).card_id; }

  void no_bribes() { session.submit_bribe_allocation(evil(), {}); }

  void vote_all(Vote v) {
    for (const auto& id : s().in_office())
      if (!s().forced.contains(id) && s().phase == Phase::CongressVote) session.cast_vote(id, v);
  }

  void recall_all(const RecallTarget& target) {
    for (const auto& v : voters())
      if (s().phase == Phase::VoterRecall) session.cast_recall_ballot(v, target);
  }

  // Plays one round with no bribes, no statements and a uniform vote.
  void plain_round(Vote v, const RecallTarget& target = std::nullopt) {
    no_bribes();
    session.close_phase();
    vote_all(v);
    recall_all(target);
  }
};

}  // namespace policy_arena::testing_util
