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

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "policy_arena/error.hpp"
#include "policy_arena/rules.hpp"

namespace policy_arena {

using Json = nlohmann::json;

namespace jsonutil {

// Rejects keys outside `allowed`; `what` names the object in the message.
inline void expect_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                        std::string_view what, Errc code = Errc::ValidationError) {
  if (!j.is_object()) fail(code, std::string(what) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) fail(code, std::string(what) + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const Json& j, std::string_view key, std::string_view what,
      Errc code = Errc::ValidationError) {
  auto it = j.find(key);
  if (it == j.end()) fail(code, std::string(what) + ": missing '" + std::string(key) + "'");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(code, std::string(what) + ": bad type for '" + std::string(key) + "'");
  }
}

template <typename T>
T get_or(const Json& j, std::string_view key, T fallback, std::string_view what,
         Errc code = Errc::ValidationError) {
  if (!j.contains(key)) return fallback;
  return get<T>(j, key, what, code);
}

}  // namespace jsonutil

inline void to_json(Json& j, const Money& m) { j = m.units; }
inline void from_json(const Json& j, Money& m) { m.units = j.get<std::int64_t>(); }

inline void to_json(Json& j, Role r) { j = std::string(to_string(r)); }
inline void to_json(Json& j, Phase p) { j = std::string(to_string(p)); }
inline void to_json(Json& j, Vote v) { j = std::string(to_string(v)); }

inline void from_json(const Json& j, Role& r) {
  auto parsed = parse_role(j.get<std::string>());
  if (!parsed) throw nlohmann::json::type_error::create(302, "unknown role", &j);
  r = *parsed;
}
inline void from_json(const Json& j, Phase& p) {
  auto parsed = parse_phase(j.get<std::string>());
  if (!parsed) throw nlohmann::json::type_error::create(302, "unknown phase", &j);
  p = *parsed;
}
inline void from_json(const Json& j, Vote& v) {
  auto parsed = parse_vote(j.get<std::string>());
  if (!parsed) throw nlohmann::json::type_error::create(302, "unknown vote", &j);
  v = *parsed;
}

inline void to_json(Json& j, const CongressCard& c) {
  j = Json{{"member_id", c.member_id}, {"bribe_threshold", c.bribe_threshold},
           {"in_office", c.in_office}};
}
inline void from_json(const Json& j, CongressCard& c) {
  c.member_id = j.at("member_id").get<std::string>();
  c.bribe_threshold = j.at("bribe_threshold").get<Money>();
  c.in_office = j.at("in_office").get<bool>();
}

inline void to_json(Json& j, const VoterCard& v) {
  j = Json{{"voter_id", v.voter_id}, {"engagement", v.engagement}, {"strictness", v.strictness}};
}
inline void from_json(const Json& j, VoterCard& v) {
  v.voter_id = j.at("voter_id").get<std::string>();
  v.engagement = j.at("engagement").get<double>();
  v.strictness = j.at("strictness").get<int>();
}

inline void to_json(Json& j, const BribeCard& c) {
  j = Json{{"card_id", c.card_id}, {"amount", c.amount}};
}
inline void from_json(const Json& j, BribeCard& c) {
  c.card_id = j.at("card_id").get<std::string>();
  c.amount = j.at("amount").get<Money>();
}

inline void to_json(Json& j, const BribeAllocation& a) { j = a.assignments; }
inline void from_json(const Json& j, BribeAllocation& a) {
  a.assignments = j.get<std::map<PlayerId, std::string>>();
}

inline void to_json(Json& j, const VoteRecord& v) {
  j = Json{{"member_id", v.member_id}, {"vote", v.vote}, {"forced", v.forced}};
}
inline void from_json(const Json& j, VoteRecord& v) {
  v.member_id = j.at("member_id").get<std::string>();
  v.vote = j.at("vote").get<Vote>();
  v.forced = j.at("forced").get<bool>();
}

inline Json recall_ballots_to_json(const std::map<PlayerId, RecallTarget>& ballots) {
  Json j = Json::object();
  for (const auto& [voter, target] : ballots)
    j[voter] = target ? Json(*target) : Json(nullptr);
  return j;
}
inline std::map<PlayerId, RecallTarget> recall_ballots_from_json(const Json& j) {
  std::map<PlayerId, RecallTarget> out;
  for (const auto& [voter, target] : j.items())
    out[voter] = target.is_null() ? RecallTarget{} : RecallTarget{target.get<std::string>()};
  return out;
}

inline void to_json(Json& j, const RecallRecord& r) {
  j = Json{{"ballots", recall_ballots_to_json(r.ballots)},
           {"removed", r.removed ? Json(*r.removed) : Json(nullptr)}};
}
inline void from_json(const Json& j, RecallRecord& r) {
  r.ballots = recall_ballots_from_json(j.at("ballots"));
  const auto& removed = j.at("removed");
  r.removed = removed.is_null() ? std::nullopt : std::optional<PlayerId>(removed.get<std::string>());
}

inline void to_json(Json& j, const DocketResult& r) {
  j = Json{{"regulation_id", r.regulation_id}, {"adopted", r.adopted}};
}
inline void from_json(const Json& j, DocketResult& r) {
  r.regulation_id = j.at("regulation_id").get<std::string>();
  r.adopted = j.at("adopted").get<bool>();
}

inline void to_json(Json& j, const Outcome& o) {
  j = Json{{"voters_win", o.voters_win},
           {"evil_wins", o.evil_wins},
           {"surviving_members", o.surviving_members},
           {"docket_results", o.docket_results}};
}
inline void from_json(const Json& j, Outcome& o) {
  o.voters_win = j.at("voters_win").get<bool>();
  o.evil_wins = j.at("evil_wins").get<bool>();
  o.surviving_members = j.at("surviving_members").get<std::vector<PlayerId>>();
  o.docket_results = j.at("docket_results").get<std::vector<DocketResult>>();
}

}  // namespace policy_arena
