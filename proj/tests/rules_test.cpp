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

#include "policy_arena/rules.hpp"

#include <gtest/gtest.h>

#include "policy_arena/rng.hpp"
#include "test_util.hpp"

namespace policy_arena {
namespace {

using testing_util::ExpectErrc;

std::vector<CongressCard> Members(std::initializer_list<std::pair<const char*, int>> m) {
  std::vector<CongressCard> out;
  for (auto [id, t] : m) out.push_back({id, Money{t}, true});
  return out;
}

TEST(ApplyBribes, AmountAboveThresholdForces) {
  auto congress = Members({{"A", 400}});
  std::vector<BribeCard> deck{{"c1", Money{500}}};
  EXPECT_EQ(apply_bribes({{{"A", "c1"}}}, deck, congress), std::set<PlayerId>{"A"});
}

TEST(ApplyBribes, EqualAmountDoesNotForce) {
  auto congress = Members({{"A", 400}});
  std::vector<BribeCard> deck{{"c1", Money{400}}};
  EXPECT_TRUE(apply_bribes({{{"A", "c1"}}}, deck, congress).empty());
}

TEST(ApplyBribes, MixedDeckMatchesHandCheck) {
  auto congress = Members({{"A", 500}, {"B", 100}, {"C", 100}});
  std::vector<BribeCard> deck{{"c600", Money{600}}, {"c200a", Money{200}}, {"c200b", Money{200}}};
  BribeAllocation alloc{{{"A", "c600"}, {"B", "c200a"}}};

  // Hand check: 600 > 500 and 200 > 100; C holds no card.
  std::set<PlayerId> expected;
  for (const auto& [member, card] : alloc.assignments) {
    Money amount = card == "c600" ? Money{600} : Money{200};
    Money threshold = member == "A" ? Money{500} : Money{100};
    if (amount > threshold) expected.insert(member);
  }
  ASSERT_EQ(expected, (std::set<PlayerId>{"A", "B"}));
  EXPECT_EQ(apply_bribes(alloc, deck, congress), expected);
}

TEST(ApplyBribes, EmptyAllocationForcesNobody) {
  auto congress = Members({{"A", 0}});
  std::vector<BribeCard> deck{{"c1", Money{900}}};
  EXPECT_TRUE(apply_bribes({}, deck, congress).empty());
}

TEST(ApplyBribes, RejectsWholeAllocation) {
  auto congress = Members({{"A", 100}, {"B", 100}});
  congress[1].in_office = false;
  std::vector<BribeCard> deck{{"c1", Money{500}}, {"c2", Money{500}}};
  ExpectErrc(Errc::UnknownMember, [&] { apply_bribes({{{"Z", "c1"}}}, deck, congress); });
  ExpectErrc(Errc::MemberNotInOffice, [&] { apply_bribes({{{"B", "c1"}}}, deck, congress); });
  ExpectErrc(Errc::UnknownCard, [&] { apply_bribes({{{"A", "c9"}}}, deck, congress); });

  auto three = Members({{"A", 100}, {"B", 100}, {"C", 100}});
  ExpectErrc(Errc::CardReuse, [&] { apply_bribes({{{"A", "c1"}, {"C", "c1"}}}, deck, three); });

  std::vector<BribeCard> dup{{"c1", Money{5}}, {"c1", Money{6}}};
  ExpectErrc(Errc::CardReuse, [&] { apply_bribes({}, dup, three); });
}

TEST(ApplyBribes, MonotoneInAmountAndThreshold) {
  Rng rng(1234);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(9);
    std::vector<CongressCard> congress;
    std::vector<BribeCard> deck;
    BribeAllocation alloc;
    for (std::size_t i = 0; i < n; ++i) {
      congress.push_back({"m" + std::to_string(i), Money{static_cast<int64_t>(rng.uniform_index(1000))}, true});
      deck.push_back({"c" + std::to_string(i), Money{1 + static_cast<int64_t>(rng.uniform_index(1000))}});
      if (rng.bernoulli(0.7)) alloc.assignments[congress[i].member_id] = deck[i].card_id;
    }
    const auto base = apply_bribes(alloc, deck, congress);

    auto richer = deck;
    const auto i = rng.uniform_index(n);
    richer[i].amount.units += 1 + static_cast<int64_t>(rng.uniform_index(500));
    const auto after_raise = apply_bribes(alloc, richer, congress);
    EXPECT_TRUE(std::includes(after_raise.begin(), after_raise.end(), base.begin(), base.end()));

    auto tougher = congress;
    tougher[i].bribe_threshold.units += 1 + static_cast<int64_t>(rng.uniform_index(500));
    const auto after_toughen = apply_bribes(alloc, deck, tougher);
    EXPECT_TRUE(std::includes(base.begin(), base.end(), after_toughen.begin(), after_toughen.end()));
  }
}

std::vector<VoteRecord> Ballots(const std::vector<CongressCard>& congress, int for_count) {
  std::vector<VoteRecord> out;
  for (std::size_t i = 0; i < congress.size(); ++i)
    out.push_back({congress[i].member_id, static_cast<int>(i) < for_count ? Vote::For : Vote::Against, false});
  return out;
}

std::vector<CongressCard> Seats(int n) {
  std::vector<CongressCard> out;
  for (int i = 0; i < n; ++i) out.push_back({"m" + std::to_string(i), Money{100}, true});
  return out;
}

TEST(ResolveVote, StrictMajority) {
  auto five = Seats(5);
  EXPECT_TRUE(resolve_vote(Ballots(five, 3), five));
  auto four = Seats(4);
  EXPECT_FALSE(resolve_vote(Ballots(four, 2), four));
}

TEST(ResolveVote, ForcedBallotsCountAgainst) {
  auto seven = Seats(7);
  std::vector<VoteRecord> votes;
  for (int i = 0; i < 7; ++i) {
    bool forced = i < 2;
    votes.push_back({seven[i].member_id, forced ? Vote::Against : Vote::For, forced});
  }
  // 5 For against a half-size of 3.5.
  EXPECT_TRUE(resolve_vote(votes, seven));
}

TEST(ResolveVote, ExhaustiveAgainstMajorityPredicate) {
  for (int n = 1; n <= 9; ++n) {
    auto congress = Seats(n);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<VoteRecord> votes;
      int for_count = 0;
      for (int i = 0; i < n; ++i) {
        bool yes = (mask >> i) & 1u;
        for_count += yes;
        votes.push_back({congress[i].member_id, yes ? Vote::For : Vote::Against, false});
      }
      ASSERT_EQ(resolve_vote(votes, congress), for_count * 2 > n) << n << " " << mask;
    }
  }
}

TEST(ResolveVote, RemovedMembersDoNotCount) {
  auto congress = Seats(5);
  congress[4].in_office = false;
  congress[3].in_office = false;
  std::vector<VoteRecord> votes{{"m0", Vote::For, false}, {"m1", Vote::For, false}, {"m2", Vote::Against, false}};
  EXPECT_TRUE(resolve_vote(votes, congress));  // 2 of 3 in office
}

TEST(ResolveVote, BallotErrors) {
  auto congress = Seats(3);
  auto votes = Ballots(congress, 1);
  auto missing = votes;
  missing.pop_back();
  ExpectErrc(Errc::MissingBallot, [&] { resolve_vote(missing, congress); });
  auto dup = votes;
  dup.push_back(votes[0]);
  ExpectErrc(Errc::DuplicateBallot, [&] { resolve_vote(dup, congress); });
  auto removed = congress;
  removed[2].in_office = false;
  ExpectErrc(Errc::BallotFromRemovedMember, [&] { resolve_vote(votes, removed); });
  auto coerced = votes;
  coerced[0].forced = true;  // For + forced
  ExpectErrc(Errc::ForcedMemberManualVote, [&] { resolve_vote(coerced, congress); });
}

TEST(ResolveVote, EmptyCongressAdoptsNothing) {
  auto congress = Seats(3);
  for (auto& c : congress) c.in_office = false;
  EXPECT_FALSE(resolve_vote({}, congress));
}

std::vector<VoterCard> Voters(int n) {
  std::vector<VoterCard> out;
  for (int i = 1; i <= n; ++i) out.push_back({"v" + std::to_string(i), 1.0, 3});
  return out;
}

TEST(ResolveRecall, UniquePluralityRemoved) {
  auto congress = Members({{"A", 1}, {"B", 1}});
  auto r = resolve_recall({{"v1", "A"}, {"v2", "A"}, {"v3", std::nullopt}}, congress, Voters(3));
  EXPECT_EQ(r.removed, "A");
  EXPECT_EQ(r.ballots.size(), 3u);
}

TEST(ResolveRecall, TieRemovesNobody) {
  auto congress = Members({{"A", 1}, {"B", 1}});
  EXPECT_FALSE(resolve_recall({{"v1", "A"}, {"v2", "B"}}, congress, Voters(2)).removed);
}

TEST(ResolveRecall, AllAbstainRemovesNobody) {
  auto congress = Members({{"A", 1}});
  EXPECT_FALSE(resolve_recall({{"v1", std::nullopt}, {"v2", std::nullopt}}, congress, Voters(2)).removed);
  EXPECT_FALSE(resolve_recall({}, congress, Voters(2)).removed);
}

TEST(ResolveRecall, QuorumGatesRemoval) {
  auto congress = Members({{"A", 1}, {"B", 1}});
  std::map<PlayerId, RecallTarget> ballots{{"v1", "A"}, {"v2", "A"}, {"v3", "B"}};
  EXPECT_EQ(resolve_recall(ballots, congress, Voters(3), 2).removed, "A");
  EXPECT_FALSE(resolve_recall(ballots, congress, Voters(3), 3).removed);
}

TEST(ResolveRecall, Errors) {
  auto congress = Members({{"A", 1}, {"B", 1}});
  congress[1].in_office = false;
  ExpectErrc(Errc::UnknownVoter, [&] { resolve_recall({{"ghost", "A"}}, congress, Voters(1)); });
  ExpectErrc(Errc::TargetNotInOffice, [&] { resolve_recall({{"v1", "B"}}, congress, Voters(1)); });
  ExpectErrc(Errc::TargetNotInOffice, [&] { resolve_recall({{"v1", "Z"}}, congress, Voters(1)); });
}

TEST(ResolveRecall, NeverRemovesMoreThanOne) {
  Rng rng(99);
  auto congress = Seats(7);
  auto voters = Voters(15);
  for (int trial = 0; trial < 500; ++trial) {
    std::map<PlayerId, RecallTarget> ballots;
    for (const auto& v : voters) {
      auto pick = rng.uniform_index(8);
      ballots[v.voter_id] = pick == 7 ? RecallTarget{} : RecallTarget{congress[pick].member_id};
    }
    auto r = resolve_recall(ballots, congress, voters);
    if (r.removed) {
      std::map<PlayerId, int> tally;
      for (const auto& [_, t] : ballots) {
        if (t) ++tally[*t];
      }
      for (const auto& [m, n] : tally) {
        if (m != *r.removed) {
          EXPECT_LT(n, tally[*r.removed]);
        }
      }
    }
  }
}

Scenario FourRegs(int key_index) {
  Scenario s{"s", "topic", "issue", {}, "brief"};
  for (int i = 0; i < 4; ++i) s.docket.push_back({"r" + std::to_string(i), "Reg", "", i == key_index});
  return s;
}

TEST(EvaluateOutcome, KeyAdoptedMeansVotersWin) {
  auto s = FourRegs(1);
  std::vector<DocketResult> results{{"r0", false}, {"r1", true}, {"r2", false}, {"r3", false}};
  auto o = evaluate_outcome(Phase::GameEnd, s, results, Seats(3));
  EXPECT_TRUE(o.voters_win);
  EXPECT_FALSE(o.evil_wins);
  EXPECT_EQ(o.surviving_members.size(), 3u);
}

TEST(EvaluateOutcome, NothingAdoptedMeansEvilWins) {
  auto s = FourRegs(1);
  std::vector<DocketResult> results{{"r0", false}, {"r1", false}, {"r2", false}, {"r3", false}};
  auto o = evaluate_outcome(Phase::GameEnd, s, results, Seats(3));
  EXPECT_TRUE(o.evil_wins);
  EXPECT_FALSE(o.voters_win);
}

TEST(EvaluateOutcome, NonKeyAdoptionDoesNotHelpVoters) {
  auto s = FourRegs(3);
  std::vector<DocketResult> results{{"r0", true}, {"r1", true}, {"r2", true}, {"r3", false}};
  EXPECT_TRUE(evaluate_outcome(Phase::GameEnd, s, results, Seats(3)).evil_wins);
}

TEST(EvaluateOutcome, RemovedMemberDoesNotSurvive) {
  auto s = FourRegs(0);
  auto congress = Seats(3);
  congress[0].in_office = false;
  std::vector<DocketResult> results{{"r0", true}, {"r1", false}, {"r2", false}, {"r3", false}};
  auto o = evaluate_outcome(Phase::GameEnd, s, results, congress);
  EXPECT_TRUE(o.voters_win);
  EXPECT_EQ(o.surviving_members, (std::vector<PlayerId>{"m1", "m2"}));
}

TEST(EvaluateOutcome, RequiresGameEnd) {
  ExpectErrc(Errc::GameNotFinished, [] { evaluate_outcome(Phase::VoterRecall, FourRegs(0), {}, {}); });
}

TEST(PhaseTransition, AutomatonEdges) {
  TransitionContext mid{1, 4, 5};
  EXPECT_TRUE(legal_phase_transition(Phase::Hearing, Phase::CongressVote, mid));
  EXPECT_FALSE(legal_phase_transition(Phase::CongressVote, Phase::BribeAllocationPhase, mid));
  EXPECT_TRUE(legal_phase_transition(Phase::RoundEnd, Phase::BribeAllocationPhase, mid));
  EXPECT_FALSE(legal_phase_transition(Phase::RoundEnd, Phase::GameEnd, mid));

  TransitionContext last{3, 4, 5};
  EXPECT_TRUE(legal_phase_transition(Phase::RoundEnd, Phase::GameEnd, last));
  EXPECT_FALSE(legal_phase_transition(Phase::RoundEnd, Phase::BribeAllocationPhase, last));

  TransitionContext empty_congress{1, 4, 0};
  EXPECT_TRUE(legal_phase_transition(Phase::RoundEnd, Phase::GameEnd, empty_congress));
  EXPECT_FALSE(legal_phase_transition(Phase::RoundEnd, Phase::BribeAllocationPhase, empty_congress));
}

TEST(PhaseTransition, ExactlyOneSuccessorPerPhase) {
  const Phase all[] = {Phase::Lobby,       Phase::BribeAllocationPhase, Phase::Hearing, Phase::CongressVote,
                       Phase::VoterRecall, Phase::RoundEnd,             Phase::GameEnd};
  for (std::size_t round = 0; round < 4; ++round) {
    for (std::size_t members : {0u, 3u}) {
      TransitionContext ctx{round, 4, members};
      for (Phase from : all) {
        int successors = 0;
        for (Phase to : all) successors += legal_phase_transition(from, to, ctx);
        if (from == Phase::GameEnd || (from == Phase::Lobby && members == 0)) {
          EXPECT_EQ(successors, 0);
        } else {
          EXPECT_EQ(successors, 1) << to_string(from);
        }
      }
    }
  }
}

}  // namespace
}  // namespace policy_arena
