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

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "policy_arena/json_support.hpp"
#include "policy_arena/rules.hpp"

namespace policy_arena {

// Schema version written into every log record.
inline constexpr int kEventSchemaVersion = 1;
inline constexpr const char* kSystemActor = "system";
inline constexpr const char* kFacilitatorId = "facilitator";

namespace events {

struct PlayerJoined {
  PlayerId player_id;
  std::string name;
  bool operator==(const PlayerJoined&) const = default;
};

struct RolesAssigned {
  std::map<PlayerId, Role> roles;
  std::vector<CongressCard> congress;  // seat order
  std::vector<VoterCard> voters;
  bool operator==(const RolesAssigned&) const = default;
};

struct PhaseAdvanced {
  Phase from = Phase::Lobby;
  Phase to = Phase::Lobby;
  std::size_t round_index = 0;  // round the new phase belongs to
  bool operator==(const PhaseAdvanced&) const = default;
};

struct BribesAllocated {
  std::size_t round_index = 0;
  BribeAllocation allocation;
  std::set<PlayerId> forced;
  bool operator==(const BribesAllocated&) const = default;
};

struct StatementMade {
  PlayerId member_id;
  std::string text;
  bool operator==(const StatementMade&) const = default;
};

struct CeoReplied {
  std::string text;
  bool operator==(const CeoReplied&) const = default;
};

struct VoteCast {
  VoteRecord record;
  bool operator==(const VoteCast&) const = default;
};

struct VoteResolved {
  std::string regulation_id;
  std::vector<VoteRecord> votes;
  bool adopted = false;
  bool operator==(const VoteResolved&) const = default;
};

struct RecallBallotCast {
  PlayerId voter_id;
  RecallTarget target;
  bool operator==(const RecallBallotCast&) const = default;
};

struct RecallResolved {
  RecallRecord record;
  bool operator==(const RecallResolved&) const = default;
};

struct GameEnded {
  std::vector<std::string> auto_failed;  // regulations failed for lack of a Congress
  Outcome outcome;
  bool operator==(const GameEnded&) const = default;
};

}  // namespace events

using EventPayload =
    std::variant<events::PlayerJoined, events::RolesAssigned, events::PhaseAdvanced,
                 events::BribesAllocated, events::StatementMade, events::CeoReplied, events::VoteCast,
                 events::VoteResolved, events::RecallBallotCast, events::RecallResolved,
                 events::GameEnded>;

inline constexpr const char* kEventKindNames[] = {
    "PlayerJoined", "RolesAssigned", "PhaseAdvanced",    "BribesAllocated",
    "StatementMade", "CeoReplied",   "VoteCast",         "VoteResolved",
    "RecallBallotCast", "RecallResolved", "GameEnded"};

struct GameEvent {
  std::uint64_t seq = 0;
  std::int64_t timestamp_ms = 0;
  PlayerId actor;
  EventPayload payload;

  bool operator==(const GameEvent&) const = default;

  std::string_view kind() const { return kEventKindNames[payload.index()]; }

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&payload);
  }
};

// --- JSON ---------------------------------------------------------------

namespace events {

inline Json to_json_payload(const PlayerJoined& e) {
  return {{"player_id", e.player_id}, {"name", e.name}};
}
inline Json to_json_payload(const RolesAssigned& e) {
  Json roles = Json::object();
  for (const auto& [id, r] : e.roles) roles[id] = r;
  return {{"roles", roles}, {"congress", e.congress}, {"voters", e.voters}};
}
inline Json to_json_payload(const PhaseAdvanced& e) {
  return {{"from", e.from}, {"to", e.to}, {"round_index", e.round_index}};
}
inline Json to_json_payload(const BribesAllocated& e) {
  return {{"round_index", e.round_index}, {"allocation", e.allocation}, {"forced", e.forced}};
}
inline Json to_json_payload(const StatementMade& e) {
  return {{"member_id", e.member_id}, {"text", e.text}};
}
inline Json to_json_payload(const CeoReplied& e) { return {{"text", e.text}}; }
inline Json to_json_payload(const VoteCast& e) { return e.record; }
inline Json to_json_payload(const VoteResolved& e) {
  return {{"regulation_id", e.regulation_id}, {"votes", e.votes}, {"adopted", e.adopted}};
}
inline Json to_json_payload(const RecallBallotCast& e) {
  return {{"voter_id", e.voter_id}, {"target", e.target ? Json(*e.target) : Json(nullptr)}};
}
inline Json to_json_payload(const RecallResolved& e) { return e.record; }
inline Json to_json_payload(const GameEnded& e) {
  return {{"auto_failed", e.auto_failed}, {"outcome", e.outcome}};
}

}  // namespace events

inline Json payload_to_json(const EventPayload& p) {
  return std::visit([](const auto& e) { return events::to_json_payload(e); }, p);
}

inline EventPayload payload_from_json(std::string_view kind, const Json& j) {
  using namespace events;
  if (kind == "PlayerJoined") return PlayerJoined{j.at("player_id"), j.at("name")};
  if (kind == "RolesAssigned") {
    RolesAssigned e;
    for (const auto& [id, r] : j.at("roles").items()) e.roles[id] = r.get<Role>();
    e.congress = j.at("congress").get<std::vector<CongressCard>>();
    e.voters = j.at("voters").get<std::vector<VoterCard>>();
    return e;
  }
  if (kind == "PhaseAdvanced")
    return PhaseAdvanced{j.at("from").get<Phase>(), j.at("to").get<Phase>(),
                         j.at("round_index").get<std::size_t>()};
  if (kind == "BribesAllocated")
    return BribesAllocated{j.at("round_index").get<std::size_t>(),
                           j.at("allocation").get<BribeAllocation>(),
                           j.at("forced").get<std::set<PlayerId>>()};
  if (kind == "StatementMade") return StatementMade{j.at("member_id"), j.at("text")};
  if (kind == "CeoReplied") return CeoReplied{j.at("text")};
  if (kind == "VoteCast") return VoteCast{j.get<VoteRecord>()};
  if (kind == "VoteResolved")
    return VoteResolved{j.at("regulation_id"), j.at("votes").get<std::vector<VoteRecord>>(),
                        j.at("adopted").get<bool>()};
  if (kind == "RecallBallotCast") {
    const Json& t = j.at("target");
    return RecallBallotCast{j.at("voter_id"), t.is_null() ? RecallTarget{} : RecallTarget{t.get<std::string>()}};
  }
  if (kind == "RecallResolved") return RecallResolved{j.get<RecallRecord>()};
  if (kind == "GameEnded")
    return GameEnded{j.at("auto_failed").get<std::vector<std::string>>(), j.at("outcome").get<Outcome>()};
  fail(Errc::CorruptLog, "unknown event kind '" + std::string(kind) + "'");
}

inline Json event_to_json(const GameEvent& e) {
  return {{"v", kEventSchemaVersion}, {"seq", e.seq},     {"ts", e.timestamp_ms},
          {"actor", e.actor},         {"kind", e.kind()}, {"payload", payload_to_json(e.payload)}};
}

inline GameEvent event_from_json(const Json& j) {
  try {
    if (j.at("v").get<int>() != kEventSchemaVersion)
      fail(Errc::VersionMismatch, "event schema " + j.at("v").dump());
    GameEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.timestamp_ms = j.at("ts").get<std::int64_t>();
    e.actor = j.at("actor").get<std::string>();
    e.payload = payload_from_json(j.at("kind").get<std::string>(), j.at("payload"));
    return e;
  } catch (const nlohmann::json::exception& ex) {
    fail(Errc::CorruptLog, std::string("malformed event record: ") + ex.what());
  }
}

}  // namespace policy_arena
