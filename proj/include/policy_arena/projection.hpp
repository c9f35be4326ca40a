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

// Role projections: what a given player may see of the event log and of the
// current state.
//
//   * Bribe assignments, card amounts and the secret brief reach Evil Inc.
//     and the facilitator only.
//   * A Congress member learns whether they personally were forced, and
//     sees their own threshold; nobody else's.
//   * Cast votes are public. A forced member's auto-cast ballot is only
//     shown publicly inside the resolved tally, without the forced flag.
//   * Recall ballots are secret; the resolved tally and removal are public.

#pragma once

#include <map>
#include <optional>
#include <string>

#include "policy_arena/session.hpp"

namespace policy_arena {

struct Viewer {
  Role role = Role::Voter;
  PlayerId id;
};

inline Viewer viewer_for(const GameState& s, const PlayerId& id) {
  if (id == kFacilitatorId) return {Role::Facilitator, id};
  auto role = s.role_of(id);
  // Before roles are dealt everyone sees the public lobby view.
  return {role.value_or(Role::Voter), id};
}

namespace detail {

inline bool privileged(const Viewer& v) { return v.role == Role::Facilitator || v.role == Role::EvilInc; }

inline Json public_votes(const std::vector<VoteRecord>& votes) {
  Json out = Json::array();
  for (const auto& v : votes) out.push_back({{"member_id", v.member_id}, {"vote", v.vote}});
  return out;
}

inline Json public_recall(const RecallRecord& r) {
  std::map<PlayerId, int> tally;
  int abstain = 0;
  for (const auto& [_, target] : r.ballots) {
    if (target) {
      ++tally[*target];
    } else {
      ++abstain;
    }
  }
  return {{"tally", tally},
          {"abstentions", abstain},
          {"ballots_cast", r.ballots.size()},
          {"removed", r.removed ? Json(*r.removed) : Json(nullptr)}};
}

inline Json own_card(const GameState& s, const Viewer& v) {
  Json you = {{"id", v.id}, {"role", v.role}};
  if (const CongressCard* c = s.member(v.id)) {
    you["bribe_threshold"] = c->bribe_threshold;
    you["in_office"] = c->in_office;
  }
  if (const VoterCard* vc = s.voter(v.id)) {
    you["engagement"] = vc->engagement;
    you["strictness"] = vc->strictness;
  }
  return you;
}

}  // namespace detail

// Payload of `ev` as seen by `viewer`, or nullopt if the viewer sees nothing.
inline std::optional<Json> project_payload(const GameEvent& ev, const GameState& s, const Viewer& viewer) {
  if (viewer.role == Role::Facilitator) return payload_to_json(ev.payload);
  const bool insider = viewer.role == Role::EvilInc;

  if (auto* e = ev.as<events::RolesAssigned>()) {
    Json members = Json::array();
    for (const auto& c : e->congress) members.push_back(c.member_id);
    Json out = {{"role", e->roles.count(viewer.id) ? Json(e->roles.at(viewer.id)) : Json(nullptr)},
                {"congress", members}};
    for (const auto& c : e->congress)
      if (c.member_id == viewer.id) out["bribe_threshold"] = c.bribe_threshold;
    for (const auto& vc : e->voters)
      if (vc.voter_id == viewer.id) out["voter_card"] = vc;
    if (insider) {
      Json team = Json::array();
      for (const auto& [id, r] : e->roles)
        if (r == Role::EvilInc) team.push_back(id);
      out["evil_team"] = team;
      if (s.config.thresholds_visible_to_evil) out["thresholds"] = e->congress;
    }
    return out;
  }
  if (auto* e = ev.as<events::BribesAllocated>()) {
    if (insider) return payload_to_json(ev.payload);
    if (viewer.role == Role::Congress) return Json{{"round_index", e->round_index}, {"forced", e->forced.contains(viewer.id)}};
    return std::nullopt;
  }
  if (auto* e = ev.as<events::VoteCast>()) {
    if (insider || e->record.member_id == viewer.id) return payload_to_json(ev.payload);
    if (e->record.forced) return std::nullopt;
    return Json{{"member_id", e->record.member_id}, {"vote", e->record.vote}};
  }
  if (auto* e = ev.as<events::VoteResolved>()) {
    if (insider) return payload_to_json(ev.payload);
    return Json{{"regulation_id", e->regulation_id}, {"votes", detail::public_votes(e->votes)}, {"adopted", e->adopted}};
  }
  if (auto* e = ev.as<events::RecallBallotCast>()) {
    if (e->voter_id == viewer.id) return payload_to_json(ev.payload);
    return std::nullopt;
  }
  if (auto* e = ev.as<events::RecallResolved>()) return detail::public_recall(e->record);
  // PlayerJoined, PhaseAdvanced, StatementMade, CeoReplied, GameEnded.
  return payload_to_json(ev.payload);
}

inline std::optional<Json> project_event(const GameEvent& ev, const GameState& s, const Viewer& viewer) {
  auto payload = project_payload(ev, s, viewer);
  if (!payload) return std::nullopt;
  // Who submitted a bribe allocation is itself Evil Inc. membership.
  const bool hide_actor = ev.as<events::BribesAllocated>() && !detail::privileged(viewer);
  return Json{{"seq", ev.seq},
              {"kind", ev.kind()},
              {"actor", hide_actor ? Json(nullptr) : Json(ev.actor)},
              {"payload", *payload}};
}

// Role-projected view of the whole session, enough to rebuild a client.
inline Json snapshot(const GameState& s, const Viewer& viewer) {
  Json docket = Json::array();
  for (const auto& r : s.scenario.docket)
    docket.push_back({{"id", r.id}, {"title", r.title}, {"summary", r.summary}, {"is_key", r.is_key}});
  Json players = Json::array();
  for (const auto& p : s.players) players.push_back({{"id", p.id}, {"name", p.name}});
  Json congress = Json::array();
  for (const auto& c : s.congress) congress.push_back({{"member_id", c.member_id}, {"in_office", c.in_office}});
  Json transcript = Json::array();
  for (const auto& t : s.transcript)
    transcript.push_back({{"round_index", t.round_index}, {"speaker", t.speaker}, {"text", t.text}});
  Json vote_history = Json::array();
  for (std::size_t i = 0; i < s.docket_results.size() && i < s.votes.size(); ++i)
    vote_history.push_back({{"regulation_id", s.docket_results[i].regulation_id},
                            {"adopted", s.docket_results[i].adopted},
                            {"votes", detail::public_votes(s.votes[i])}});
  Json recalls = Json::array();
  for (const auto& r : s.recalls) recalls.push_back(detail::public_recall(r));

  Json out = {{"scenario", {{"id", s.scenario.id}, {"topic", s.scenario.topic}, {"key_issue", s.scenario.key_issue}}},
              {"docket", docket},
              {"phase", s.phase},
              {"round_index", s.round_index},
              {"players", players},
              {"congress", congress},
              {"transcript", transcript},
              {"vote_history", vote_history},
              {"recalls", recalls},
              {"docket_results", s.docket_results},
              {"outcome", s.outcome ? Json(*s.outcome) : Json(nullptr)},
              {"last_event_seq", s.log.size()},
              {"you", detail::own_card(s, viewer)}};

  if (s.phase == Phase::CongressVote) {
    Json cast = Json::array();
    for (const auto& v : s.current_votes())
      if (!v.forced || detail::privileged(viewer) || v.member_id == viewer.id)
        cast.push_back({{"member_id", v.member_id}, {"vote", v.vote}});
    out["current_votes"] = cast;
  }
  const bool allocated = s.phase != Phase::Lobby && s.phase != Phase::BribeAllocationPhase;
  if (viewer.role == Role::Congress && allocated) out["you"]["forced"] = s.forced.contains(viewer.id);
  if (viewer.role == Role::Voter && s.pending_recall.count(viewer.id)) {
    const auto& t = s.pending_recall.at(viewer.id);
    out["you"]["recall_ballot"] = t ? Json(*t) : Json(nullptr);
  }
  if (detail::privileged(viewer)) {
    out["secret_brief"] = s.scenario.secret_brief;
    out["evil_team"] = s.evil;
    out["deck"] = s.deck;
    out["allocation"] = s.allocation;
    out["forced"] = s.forced;
    if (viewer.role == Role::Facilitator || s.config.thresholds_visible_to_evil) out["thresholds"] = s.congress;
  }
  if (viewer.role == Role::Facilitator) {
    out["voter_cards"] = s.voters;
    out["pending_recall"] = recall_ballots_to_json(s.pending_recall);
    Json roles = Json::object();
    for (const auto& p : s.players)
      if (p.role) roles[p.id] = *p.role;
    out["roles"] = roles;
  }
  return out;
}

}  // namespace policy_arena
