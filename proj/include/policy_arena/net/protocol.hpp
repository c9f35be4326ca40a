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

// Wire format for live play. One UTF-8 JSON object per WebSocket frame.
//
//   client -> server  {"v":1, "type":"Vote", "payload":{"vote":"For"}}
//   server -> client  {"v":1, "seq":17, "type":"VoteResult", "payload":{...}}
//
// See docs/protocol.md for every payload.

#pragma once

#include <array>
#include <string>
#include <string_view>

#include "policy_arena/json_support.hpp"
#include "policy_arena/rules.hpp"

namespace policy_arena::net {

inline constexpr int kProtocolVersion = 1;

enum class ClientType { Join, SubmitBribes, Statement, CeoReply, Vote, RecallBallot, ClosePhase, Resync };
inline constexpr std::array<std::string_view, 8> kClientTypeNames = {
    "Join", "SubmitBribes", "Statement", "CeoReply", "Vote", "RecallBallot", "ClosePhase", "Resync"};

enum class ServerType {
  Joined,
  RoleAssigned,
  SecretBrief,
  PhaseChanged,
  TranscriptAppended,
  VoteResult,
  RecallResult,
  GameOver,
  Error,
  StateSnapshot,
};
inline constexpr std::array<std::string_view, 10> kServerTypeNames = {
    "Joined",     "RoleAssigned", "SecretBrief", "PhaseChanged", "TranscriptAppended",
    "VoteResult", "RecallResult", "GameOver",    "Error",        "StateSnapshot"};

inline std::string_view to_string(ClientType t) { return kClientTypeNames[static_cast<std::size_t>(t)]; }
inline std::string_view to_string(ServerType t) { return kServerTypeNames[static_cast<std::size_t>(t)]; }

struct ClientMessage {
  ClientType type = ClientType::Resync;
  Json payload = Json::object();
  bool operator==(const ClientMessage&) const = default;
};

namespace detail {

[[noreturn]] inline void malformed(const std::string& why) { fail(Errc::MalformedPayload, why); }

inline const Json& field(const Json& p, const char* key) {
  if (!p.contains(key)) malformed(std::string("payload needs '") + key + "'");
  return p.at(key);
}

inline std::string text_field(const Json& p, const char* key) {
  const Json& v = field(p, key);
  if (!v.is_string()) malformed(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace detail

// Parses and shape-checks one client frame. Unknown types, unknown keys and
// wrong payload shapes are MalformedPayload.
inline ClientMessage parse_client_message(std::string_view frame) {
  Json j;
  try {
    j = Json::parse(frame);
  } catch (const nlohmann::json::parse_error& e) {
    detail::malformed(std::string("not JSON: ") + e.what());
  }
  jsonutil::expect_keys(j, {"v", "type", "payload"}, "message", Errc::MalformedPayload);
  if (!j.contains("v") || !j["v"].is_number_integer()) detail::malformed("missing protocol version 'v'");
  if (j["v"].get<int>() != kProtocolVersion) fail(Errc::VersionMismatch, "protocol version " + j["v"].dump());
  if (!j.contains("type") || !j["type"].is_string()) detail::malformed("missing 'type'");
  ClientMessage m;
  const auto type = j["type"].get<std::string>();
  auto it = std::find(kClientTypeNames.begin(), kClientTypeNames.end(), type);
  if (it == kClientTypeNames.end()) detail::malformed("unknown message type '" + type + "'");
  m.type = static_cast<ClientType>(it - kClientTypeNames.begin());
  m.payload = j.value("payload", Json::object());
  const Json& p = m.payload;
  auto keys = [&](std::initializer_list<std::string_view> allowed) {
    jsonutil::expect_keys(p, allowed, std::string(type) + " payload", Errc::MalformedPayload);
  };
  switch (m.type) {
    case ClientType::Join: {
      keys({"name"});
      if (detail::text_field(p, "name").empty()) detail::malformed("name must be non-empty");
      break;
    }
    case ClientType::SubmitBribes: {
      keys({"allocation"});
      const Json& a = detail::field(p, "allocation");
      if (!a.is_object()) detail::malformed("allocation must map member ids to card ids");
      for (const auto& [_, card] : a.items())
        if (!card.is_string()) detail::malformed("allocation values must be card ids");
      break;
    }
    case ClientType::Statement:
    case ClientType::CeoReply: {
      keys({"text"});
      if (detail::text_field(p, "text").empty()) detail::malformed("text must be non-empty");
      break;
    }
    case ClientType::Vote: {
      keys({"vote"});
      const auto v = detail::text_field(p, "vote");
      if (v != "For" && v != "Against") detail::malformed("vote must be \"For\" or \"Against\"");
      break;
    }
    case ClientType::RecallBallot: {
      keys({"target"});
      const Json& t = detail::field(p, "target");
      if (!t.is_null() && !t.is_string()) detail::malformed("target must be a member id or null");
      break;
    }
    case ClientType::ClosePhase:
    case ClientType::Resync: keys({}); break;
  }
  return m;
}

inline Json client_message(ClientType type, Json payload = Json::object()) {
  return {{"v", kProtocolVersion}, {"type", to_string(type)}, {"payload", std::move(payload)}};
}

inline Json server_message(std::uint64_t seq, ServerType type, Json payload) {
  return {{"v", kProtocolVersion}, {"seq", seq}, {"type", to_string(type)}, {"payload", std::move(payload)}};
}

inline Json error_payload(Errc code, const std::string& detail) {
  return {{"code", to_string(code)}, {"detail", detail}};
}

}  // namespace policy_arena::net
