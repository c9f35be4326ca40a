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

#include "policy_arena/net/hub.hpp"

#include <gtest/gtest.h>

#include <regex>

#include "hub_driver.hpp"
#include "test_util.hpp"

namespace policy_arena::net {
namespace {

using testing_util::ExpectErrc;
using testing_util::HubGame;
using testing_util::kAdminKey;

SessionHub MakeHub() { return SessionHub(builtin_scenarios(), {kAdminKey, std::nullopt}); }

Json SmallOverrides() {
  return {{"congress_seats", 3}, {"evil_players", 1}, {"min_voters", 2}, {"rng_seed", 42},
          {"thresholds", {{"explicit", {500, 300, 100}}}}};
}

TEST(Protocol, ParsesEveryClientType) {
  EXPECT_EQ(parse_client_message(R"({"v":1,"type":"Join","payload":{"name":"Ada"}})").type, ClientType::Join);
  EXPECT_EQ(parse_client_message(R"({"v":1,"type":"Vote","payload":{"vote":"Against"}})").type, ClientType::Vote);
  EXPECT_EQ(parse_client_message(R"({"v":1,"type":"RecallBallot","payload":{"target":null}})").type,
            ClientType::RecallBallot);
  EXPECT_EQ(parse_client_message(R"({"v":1,"type":"ClosePhase"})").type, ClientType::ClosePhase);
  EXPECT_EQ(parse_client_message(client_message(ClientType::SubmitBribes, {{"allocation", {{"P1", "r0-c0"}}}}).dump()).type,
            ClientType::SubmitBribes);
}

TEST(Protocol, RejectsMalformedFrames) {
  for (const char* bad : {
           "not json",
           R"({"type":"Vote","payload":{"vote":"For"}})",
           R"({"v":1,"type":"Dance","payload":{}})",
           R"({"v":1,"type":"Vote","payload":{"vote":"Maybe"}})",
           R"({"v":1,"type":"Vote","payload":{"vote":"For","extra":1}})",
           R"({"v":1,"type":"Join","payload":{"name":""}})",
           R"({"v":1,"type":"SubmitBribes","payload":{"allocation":{"P1":3}}})",
           R"({"v":1,"type":"RecallBallot","payload":{"target":7}})",
           R"({"v":1,"type":"Resync","payload":{"x":1}})",
           R"({"v":1,"type":"Vote","payload":{"vote":"For"},"token":"abc"})",
       })
    ExpectErrc(Errc::MalformedPayload, [&] { parse_client_message(bad); });
  ExpectErrc(Errc::VersionMismatch, [] { parse_client_message(R"({"v":2,"type":"Resync"})"); });
}

TEST(OpenSession, CodeFormat) {
  auto hub = MakeHub();
  auto s = hub.open_session(kAdminKey, "scenario2");
  EXPECT_TRUE(std::regex_match(s.code, std::regex("[A-HJ-NP-Z2-9]{6}"))) << s.code;
  EXPECT_EQ(s.scenario_id, "scenario2");
  EXPECT_EQ(s.facilitator_token.size(), 32u);
}

TEST(OpenSession, Errors) {
  auto hub = MakeHub();
  ExpectErrc(Errc::UnknownScenario, [&] { hub.open_session(kAdminKey, "scenario9"); });
  ExpectErrc(Errc::AuthFailed, [&] { hub.open_session("wrong", "scenario1"); });
  ExpectErrc(Errc::InvalidConfig, [&] { hub.open_session(kAdminKey, "scenario1", {{{"congress_seats", 0}}}); });
  ExpectErrc(Errc::InvalidConfig, [&] { hub.open_session(kAdminKey, "scenario1", {{{"bogus", 1}}}); });
}

TEST(OpenSession, DistinctCodes) {
  auto hub = MakeHub();
  std::set<std::string> codes;
  for (int i = 0; i < 200; ++i) codes.insert(hub.open_session(kAdminKey, "scenario1").code);
  EXPECT_EQ(codes.size(), 200u);
  EXPECT_EQ(hub.session_count(), 200u);
}

TEST(Route, JoinIssuesTokenAndAnnounces) {
  auto hub = MakeHub();
  HubGame g(hub, "scenario1", SmallOverrides());
  auto p1 = g.join("Ada");
  EXPECT_EQ(p1, "P1");
  ASSERT_EQ(g.inbox["P1"].size(), 1u);
  EXPECT_EQ(g.inbox["P1"][0]["type"], "Joined");
  EXPECT_EQ(g.inbox["P1"][0]["payload"]["token"], g.tokens["P1"]);
  g.join("Grace");
  EXPECT_EQ(g.inbox["P1"].back()["payload"]["player_id"], "P2");
  EXPECT_FALSE(g.inbox["P1"].back()["payload"].contains("token"));
  EXPECT_EQ(g.inbox[kFacilitatorId].back()["payload"]["player_id"], "P2");
}

TEST(Route, UnauthenticatedFramesRejected) {
  auto hub = MakeHub();
  HubGame g(hub, "scenario1", SmallOverrides());
  auto out = hub.route(g.code, "", client_message(ClientType::Vote, {{"vote", "For"}}).dump());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].recipient, kSender);
  EXPECT_EQ(out[0].message["payload"]["code"], "AuthFailed");
  out = hub.route(g.code, "forged-token", client_message(ClientType::Resync).dump());
  EXPECT_EQ(out[0].message["payload"]["code"], "AuthFailed");
  out = hub.route("ZZZZZZ", "", client_message(ClientType::Join, {{"name", "x"}}).dump());
  EXPECT_EQ(out[0].message["payload"]["code"], "AuthFailed");
}

struct Started {
  SessionHub hub = MakeHub();
  std::unique_ptr<HubGame> g;
  GameState s;
  Started() {
    g = std::make_unique<HubGame>(hub, "scenario1", SmallOverrides());
    for (int i = 0; i < 6; ++i) g->join("p" + std::to_string(i));
    g->close();
    s = g->state();
  }
  PlayerId voter() const { return s.voters.at(0).voter_id; }
  PlayerId member(std::size_t i) const { return s.congress.at(i).member_id; }
  PlayerId evil() const { return s.evil.at(0); }
};

TEST(Route, BribesFromVoterErrorToSenderOnly) {
  Started t;
  const auto before = state_hash(t.g->state());
  std::vector<Outbound> out = t.hub.route(
      t.g->code, t.g->tokens[t.voter()], client_message(ClientType::SubmitBribes, {{"allocation", Json::object()}}).dump());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].recipient, t.voter());
  EXPECT_EQ(out[0].message["type"], "Error");
  EXPECT_EQ(out[0].message["payload"]["code"], "NotEvilInc");
  EXPECT_EQ(state_hash(t.g->state()), before);
}

TEST(Route, RoleMessagesAndSecretBrief) {
  Started t;
  auto types = [&](const PlayerId& id) {
    std::vector<std::string> out;
    for (const auto& m : t.g->inbox[id]) out.push_back(m["type"]);
    return out;
  };
  auto has = [](const std::vector<std::string>& v, const char* x) { return std::find(v.begin(), v.end(), x) != v.end(); };
  EXPECT_TRUE(has(types(t.evil()), "SecretBrief"));
  EXPECT_TRUE(has(types(kFacilitatorId), "SecretBrief"));
  EXPECT_FALSE(has(types(t.voter()), "SecretBrief"));
  EXPECT_FALSE(has(types(t.member(0)), "SecretBrief"));
  for (const auto& m : t.g->inbox[t.member(1)])
    if (m["type"] == "RoleAssigned") {
      EXPECT_EQ(m["payload"]["role"], "Congress");
      EXPECT_EQ(m["payload"]["bribe_threshold"], 300);
    }
}

TEST(Route, ForcedFlagReachesOnlyThatMember) {
  Started t;
  t.g->send(t.evil(), client_message(ClientType::SubmitBribes, {{"allocation", {{t.member(0), t.s.deck[0].card_id}}}}));
  auto last_phase = [&](const PlayerId& id) {
    Json found;
    for (const auto& m : t.g->inbox[id])
      if (m["type"] == "PhaseChanged") found = m["payload"];
    return found;
  };
  EXPECT_EQ(last_phase(t.member(0))["you_forced"], true);
  EXPECT_EQ(last_phase(t.member(1))["you_forced"], false);
  EXPECT_FALSE(last_phase(t.voter()).contains("you_forced"));
  EXPECT_FALSE(last_phase(t.voter()).contains("allocation"));
  EXPECT_EQ(last_phase(t.evil())["allocation"][t.member(0)], t.s.deck[0].card_id);
}

TEST(Route, VoteResultBroadcastToAll) {
  Started t;
  t.g->send(t.evil(), client_message(ClientType::SubmitBribes, {{"allocation", Json::object()}}));
  t.g->close();
  for (int i = 0; i < 3; ++i) t.g->send(t.member(i), client_message(ClientType::Vote, {{"vote", "For"}}));
  for (const auto& p : t.g->state().players) {
    bool resolved = false;
    for (const auto& m : t.g->inbox[p.id])
      resolved = resolved || (m["type"] == "VoteResult" && m["payload"]["stage"] == "resolved");
    EXPECT_TRUE(resolved) << p.id;
  }
}

TEST(Route, SequenceStrictlyIncreasingPerRecipient) {
  auto hub = MakeHub();
  HubGame g(hub, "scenario2", {{"rng_seed", 5}});
  Rng rng(5);
  g.play(PolicySet{}, 25, rng, 0.2);
  EXPECT_FALSE(g.misrouted_error);
  for (const auto& [id, msgs] : g.inbox) {
    std::int64_t last = 0;
    for (const auto& m : msgs) {
      EXPECT_GT(m["seq"].get<std::int64_t>(), last) << id;
      last = m["seq"];
    }
  }
  // Resync is at or beyond everything delivered so far.
  auto snap = hub.resync(g.code, g.tokens["P3"]);
  EXPECT_EQ(snap["type"], "StateSnapshot");
  EXPECT_GT(snap["seq"].get<std::int64_t>(), g.inbox["P3"].back()["seq"].get<std::int64_t>());
}

TEST(Resync, ProjectionPerRole) {
  Started t;
  t.g->send(t.evil(), client_message(ClientType::SubmitBribes, {{"allocation", Json::object()}}));
  t.g->send(t.member(0), client_message(ClientType::Statement, {{"text", "Question on minors"}}));
  auto evil = t.hub.resync(t.g->code, t.g->tokens[t.evil()])["payload"];
  auto voter = t.hub.resync(t.g->code, t.g->tokens[t.voter()])["payload"];
  EXPECT_EQ(evil["secret_brief"], t.s.scenario.secret_brief);
  EXPECT_FALSE(voter.contains("secret_brief"));
  EXPECT_FALSE(voter.contains("thresholds"));
  EXPECT_FALSE(voter.contains("deck"));
  ASSERT_EQ(voter["transcript"].size(), 1u);
  EXPECT_EQ(voter["transcript"][0]["text"], "Question on minors");
  ExpectErrc(Errc::AuthFailed, [&] { t.hub.resync(t.g->code, "nope"); });
}

TEST(Attach, DuplicateConnectionRejected) {
  Started t;
  const auto& token = t.g->tokens[t.voter()];
  EXPECT_EQ(t.hub.attach(t.g->code, token), t.voter());
  ExpectErrc(Errc::DuplicateConnection, [&] { t.hub.attach(t.g->code, token); });
  t.hub.release(t.g->code, token);
  EXPECT_EQ(t.hub.attach(t.g->code, token), t.voter());
}

TEST(Join, SessionFull) {
  SessionHub hub(builtin_scenarios(), {kAdminKey, std::nullopt, 3});
  HubGame g(hub, "scenario1", SmallOverrides());
  for (int i = 0; i < 3; ++i) g.join("p");
  g.join("late");
  ASSERT_EQ(g.errors_for("").size(), 1u);
  EXPECT_EQ(g.errors_for("")[0]["payload"]["code"], "SessionFull");
}

TEST(GameOver, RevealToggle) {
  for (bool reveal : {false, true}) {
    auto hub = MakeHub();
    HubGame g(hub, "scenario3", {{"rng_seed", 9}}, reveal);
    Rng rng(9);
    g.play(PolicySet{}, 25, rng);
    const auto& last = g.inbox["P1"].back();
    ASSERT_EQ(last["type"], "GameOver");
    EXPECT_EQ(last["payload"].contains("bribed_members"), reveal);
  }
}

TEST(EventLog, HubWritesReplayableLogs) {
  auto dir = std::filesystem::temp_directory_path() / "pa_hub_logs";
  std::filesystem::remove_all(dir);
  SessionHub hub(builtin_scenarios(), {kAdminKey, dir});
  HubGame g(hub, "scenario1", {{"rng_seed", 3}});
  Rng rng(3);
  g.play(PolicySet{}, 25, rng, 0.1);
  auto record = read_session_dir(dir / g.code);
  auto replayed = replay(record);
  EXPECT_TRUE(replayed.finished);
  EXPECT_EQ(state_hash(replayed.state), state_hash(g.state()));
  std::filesystem::remove_all(dir);
}

// Hygiene fuzz: Voter and Congress message streams never carry the secret
// brief or any bribe card amount, while Evil Inc. streams do (control).
TEST(Hygiene, RandomBotGamesLeakNothing) {
  auto hub = MakeHub();
  Rng rng(777);
  const std::vector<std::int64_t> amounts = {777001, 555013, 444029};
  const PolicyKind evil[] = {PolicyKind::EvilGreedy, PolicyKind::EvilRandom};
  const PolicyKind congress[] = {PolicyKind::CongressSincere, PolicyKind::CongressPublicitySeeking};
  const PolicyKind voter[] = {PolicyKind::VoterCardDriven, PolicyKind::VoterRandom};
  for (int game = 0; game < 20; ++game) {
    PolicySet p;
    p.evil = {evil[rng.uniform_index(2)], 0.5 + rng.uniform_unit() / 2};
    p.congress = {congress[rng.uniform_index(2)]};
    p.voter = {voter[rng.uniform_index(2)]};
    Json overrides = {{"bribe_deck", amounts},
                      {"thresholds", {{"min", 300000}, {"max", 900000}, {"step", 100000}}},
                      {"thresholds_visible_to_evil", rng.bernoulli(0.5)},
                      {"rng_seed", rng.next()}};
    const std::string scenario = "scenario" + std::to_string(1 + game % 3);
    HubGame g(hub, scenario, overrides);
    g.play(p, 11 + static_cast<int>(rng.uniform_index(15)), rng, 0.15);
    const GameState s = g.state();
    ASSERT_EQ(s.phase, Phase::GameEnd);
    EXPECT_FALSE(g.misrouted_error);
    for (const auto& [id, msgs] : g.inbox) {
      const auto role = s.role_of(id);
      const bool restricted = role == Role::Voter || role == Role::Congress;
      std::string stream;
      for (const auto& m : msgs) stream += m.dump() + "\n";
      bool leaked = testing_util::mentions_brief(stream, s.scenario.secret_brief);
      for (auto a : amounts) leaked = leaked || testing_util::mentions_amount(stream, a);
      if (restricted) {
        EXPECT_FALSE(leaked) << scenario << " " << id;
      } else if (role == Role::EvilInc) {
        EXPECT_TRUE(leaked) << "control: Evil Inc. should see the brief and deck";
      }
    }
  }
}

}  // namespace
}  // namespace policy_arena::net
