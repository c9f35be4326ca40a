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

// Transport-independent session hosting: join codes, tokens, command routing
// and per-recipient fan-out of role-projected server messages.

#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <unordered_map>

#include "policy_arena/builtin_scenarios.hpp"
#include "policy_arena/event_log.hpp"
#include "policy_arena/net/protocol.hpp"
#include "policy_arena/projection.hpp"

namespace policy_arena::net {

inline constexpr std::string_view kCodeAlphabet = "ABCDEFGHJKLMNPQRSTUVWXYZ23456789";
inline constexpr std::size_t kCodeLength = 6;

// Recipient meaning "whoever sent the frame", used before a sender has an id.
inline const PlayerId kSender;

struct Outbound {
  PlayerId recipient;
  Json message;
};

struct HubOptions {
  std::string admin_key;
  std::optional<std::filesystem::path> log_dir;
  int max_players = 64;
  Clock clock = wall_clock_ms;
};

struct SessionOptions {
  Json config_overrides = Json::object();
  // After GameEnd, tell everyone which members were forced in each round.
  bool reveal_bribes_at_end = false;
};

struct OpenedSession {
  std::string code;
  std::string facilitator_token;
  std::string scenario_id;
  std::uint64_t seed = 0;
};

struct RouteResult {
  PlayerId sender;                   // empty if the frame was rejected before auth
  std::optional<std::string> token;  // set when the frame was a successful Join
};

class SessionHub {
 public:
  using Deliver = std::function<void(const Outbound&)>;

  SessionHub(std::vector<ScenarioFile> scenarios, HubOptions options)
      : scenarios_(std::move(scenarios)), options_(std::move(options)), token_rng_(std::random_device{}()) {}

  const std::vector<ScenarioFile>& scenarios() const { return scenarios_; }

  OpenedSession open_session(const std::string& admin_credential, const std::string& scenario_id,
                             const SessionOptions& opts = {}) {
    if (options_.admin_key.empty() || admin_credential != options_.admin_key)
      fail(Errc::AuthFailed, "facilitator credential rejected");
    const ScenarioFile* file = nullptr;
    for (const auto& f : scenarios_)
      if (f.scenario.id == scenario_id) file = &f;
    if (file == nullptr) fail(Errc::UnknownScenario, scenario_id);

    Json overrides = opts.config_overrides;
    if (!overrides.is_object()) fail(Errc::InvalidConfig, "config overrides must be an object");
    if (!overrides.contains("rng_seed")) overrides["rng_seed"] = random_u64();
    SessionConfig config;
    try {
      config = apply_overrides(file->default_config(), overrides);
    } catch (const Error& e) {
      fail(Errc::InvalidConfig, e.detail());
    }

    auto entry = std::make_shared<Entry>(file->scenario, config, options_.clock);
    entry->reveal = opts.reveal_bribes_at_end;
    OpenedSession out{"", random_token(), file->scenario.id, config.rng_seed};
    entry->tokens[out.facilitator_token] = kFacilitatorId;
    {
      std::unique_lock lock(sessions_mu_);
      do out.code = random_code();
      while (sessions_.contains(out.code));
      if (options_.log_dir) entry->writer.emplace(*options_.log_dir / out.code, make_manifest(*file, config));
      Entry* raw = entry.get();
      entry->session.set_observer([raw](const GameEvent& ev) {
        raw->batch.push_back(ev);
        if (raw->writer) raw->writer->append(ev);
      });
      sessions_.emplace(out.code, std::move(entry));
    }
    return out;
  }

  bool has_session(const std::string& code) const { return find(code) != nullptr; }

  std::size_t session_count() const {
    std::shared_lock lock(sessions_mu_);
    return sessions_.size();
  }

  PlayerId authenticate(const std::string& code, const std::string& token) const {
    auto e = entry(code);
    std::lock_guard lock(e->mu);
    return identify(*e, token);
  }

  // Marks a live connection for `token`; a second one is DuplicateConnection
  // until release() is called.
  PlayerId attach(const std::string& code, const std::string& token) {
    auto e = entry(code);
    std::lock_guard lock(e->mu);
    PlayerId id = identify(*e, token);
    if (!e->live.insert(token).second) fail(Errc::DuplicateConnection, id);
    return id;
  }

  void release(const std::string& code, const std::string& token) {
    if (auto e = find(code)) {
      std::lock_guard lock(e->mu);
      e->live.erase(token);
    }
  }

  // Applies one client frame. Every resulting message is handed to `deliver`
  // while the session is still locked, so per-recipient order is the seq
  // order. Rejections produce one Error message to the sender and nothing
  // else.
  RouteResult route(const std::string& code, const std::string& token, std::string_view frame, const Deliver& deliver) {
    auto e = find(code);
    if (!e) {
      deliver({kSender, server_message(0, ServerType::Error, error_payload(Errc::AuthFailed, "unknown session code"))});
      return {};
    }
    std::lock_guard lock(e->mu);
    RouteResult result;
    PlayerId sender_addr = kSender;
    try {
      ClientMessage msg = parse_client_message(frame);
      if (token.empty()) {
        if (msg.type != ClientType::Join) fail(Errc::AuthFailed, "join first or connect with a token");
        join(*e, msg, result, deliver);
        return result;
      }
      result.sender = identify(*e, token);
      sender_addr = result.sender;
      if (msg.type == ClientType::Join) fail(Errc::MalformedPayload, "already joined as " + result.sender);
      if (msg.type == ClientType::Resync) {
        deliver({result.sender, make_snapshot(*e, result.sender)});
        return result;
      }
      apply(*e, result.sender, msg);
    } catch (const Error& err) {
      e->batch.clear();
      deliver({sender_addr, next(*e, ServerType::Error, error_payload(err.code(), err.detail()))});
      return result;
    }
    fan_out(*e, deliver);
    return result;
  }

  std::vector<Outbound> route(const std::string& code, const std::string& token, std::string_view frame,
                              RouteResult* result = nullptr) {
    std::vector<Outbound> out;
    auto r = route(code, token, frame, [&](const Outbound& o) { out.push_back(o); });
    if (result) *result = r;
    return out;
  }

  Json resync(const std::string& code, const std::string& token) {
    auto e = entry(code);
    std::lock_guard lock(e->mu);
    return make_snapshot(*e, identify(*e, token));
  }

  // Copy of the authoritative state, for operators and tests.
  GameState state(const std::string& code) const {
    auto e = entry(code);
    std::lock_guard lock(e->mu);
    return e->session.state();
  }

 private:
  struct Entry {
    Entry(Scenario s, SessionConfig c, Clock clock) : session(std::move(s), std::move(c), std::move(clock)) {}
    std::mutex mu;
    Session session;
    std::unordered_map<std::string, PlayerId> tokens;
    std::set<std::string> live;
    std::vector<GameEvent> batch;  // events committed by the current command
    std::uint64_t seq = 0;
    bool reveal = false;
    std::optional<EventLogWriter> writer;
  };

  std::shared_ptr<Entry> find(const std::string& code) const {
    std::shared_lock lock(sessions_mu_);
    auto it = sessions_.find(code);
    return it == sessions_.end() ? nullptr : it->second;
  }

  std::shared_ptr<Entry> entry(const std::string& code) const {
    auto e = find(code);
    if (!e) fail(Errc::AuthFailed, "unknown session code");
    return e;
  }

  static PlayerId identify(const Entry& e, const std::string& token) {
    auto it = e.tokens.find(token);
    if (it == e.tokens.end()) fail(Errc::AuthFailed, "unknown token");
    return it->second;
  }

  std::uint64_t random_u64() {
    std::lock_guard lock(token_mu_);
    return token_rng_();
  }

  std::string random_token() {
    static constexpr char hex[] = "0123456789abcdef";
    std::string t;
    for (int half = 0; half < 2; ++half) {
      auto x = random_u64();
      for (int i = 0; i < 16; ++i, x >>= 4) t += hex[x & 0xF];
    }
    return t;
  }

  std::string random_code() {
    std::string c;
    for (std::size_t i = 0; i < kCodeLength; ++i) c += kCodeAlphabet[random_u64() % kCodeAlphabet.size()];
    return c;
  }

  static Json next(Entry& e, ServerType type, Json payload) { return server_message(++e.seq, type, std::move(payload)); }

  Json make_snapshot(Entry& e, const PlayerId& who) {
    const GameState& s = e.session.state();
    return next(e, ServerType::StateSnapshot, snapshot(s, viewer_for(s, who)));
  }

  void join(Entry& e, const ClientMessage& msg, RouteResult& result, const Deliver& deliver) {
    if (static_cast<int>(e.session.state().players.size()) >= options_.max_players)
      fail(Errc::SessionFull, std::to_string(options_.max_players) + " players already joined");
    const auto name = msg.payload.at("name").get<std::string>();
    result.sender = e.session.join(name);
    result.token = random_token();
    e.tokens[*result.token] = result.sender;
    deliver({kSender, next(e, ServerType::Joined, {{"player_id", result.sender}, {"name", name}, {"token", *result.token}})});
    fan_out(e, deliver);
  }

  static void apply(Entry& e, const PlayerId& actor, const ClientMessage& msg) {
    const Json& p = msg.payload;
    Session& s = e.session;
    switch (msg.type) {
      case ClientType::SubmitBribes: {
        BribeAllocation a;
        for (const auto& [member, card] : p.at("allocation").items()) a.assignments[member] = card.get<std::string>();
        s.submit_bribe_allocation(actor, a);
        break;
      }
      case ClientType::Statement: s.submit_statement(actor, p.at("text").get<std::string>()); break;
      case ClientType::CeoReply: s.ceo_reply(actor, p.at("text").get<std::string>()); break;
      case ClientType::Vote: s.cast_vote(actor, *parse_vote(p.at("vote").get<std::string>())); break;
      case ClientType::RecallBallot: {
        RecallTarget t;
        if (!p.at("target").is_null()) t = p.at("target").get<std::string>();
        s.cast_recall_ballot(actor, t);
        break;
      }
      case ClientType::ClosePhase: s.close_phase(actor); break;
      default: fail(Errc::MalformedPayload, "unexpected message");
    }
  }

  static std::vector<PlayerId> recipients(const GameState& s) {
    std::vector<PlayerId> out{kFacilitatorId};
    for (const auto& p : s.players) out.push_back(p.id);
    return out;
  }

  static const events::BribesAllocated* allocation_for_round(const GameState& s, std::size_t round) {
    for (auto it = s.log.rbegin(); it != s.log.rend(); ++it)
      if (const auto* b = it->as<events::BribesAllocated>(); b && b->round_index == round) return b;
    return nullptr;
  }

  // Server messages a given viewer gets for one event.
  std::vector<std::pair<ServerType, Json>> messages_for(const Entry& e, const GameEvent& ev, const Viewer& v) const {
    const GameState& s = e.session.state();
    const bool privileged = v.role == Role::Facilitator || v.role == Role::EvilInc;
    std::vector<std::pair<ServerType, Json>> out;
    auto add = [&](ServerType t, Json payload) {
      payload["event_seq"] = ev.seq;
      out.emplace_back(t, std::move(payload));
    };

    if (const auto* j = ev.as<events::PlayerJoined>()) {
      if (j->player_id != v.id) add(ServerType::Joined, {{"player_id", j->player_id}, {"name", j->name}});
    } else if (ev.as<events::RolesAssigned>()) {
      add(ServerType::RoleAssigned, *project_payload(ev, s, v));
      if (privileged) add(ServerType::SecretBrief, {{"text", s.scenario.secret_brief}});
    } else if (const auto* pa = ev.as<events::PhaseAdvanced>()) {
      Json p = {{"from", pa->from}, {"to", pa->to}, {"round_index", pa->round_index}};
      if (pa->round_index < s.scenario.docket.size() && pa->to != Phase::GameEnd) {
        const auto& r = s.scenario.docket[pa->round_index];
        p["regulation"] = {{"id", r.id}, {"title", r.title}, {"summary", r.summary}, {"is_key", r.is_key}};
      }
      if (pa->to == Phase::BribeAllocationPhase && privileged) p["deck"] = deal_deck(s.config, pa->round_index);
      if (pa->to == Phase::Hearing) {
        if (const auto* b = allocation_for_round(s, pa->round_index)) {
          if (privileged) {
            p["allocation"] = b->allocation;
            p["forced"] = b->forced;
          } else if (v.role == Role::Congress) {
            p["you_forced"] = b->forced.contains(v.id);
          }
        }
      }
      add(ServerType::PhaseChanged, std::move(p));
    } else if (const auto* st = ev.as<events::StatementMade>()) {
      add(ServerType::TranscriptAppended, {{"speaker", st->member_id}, {"text", st->text}});
    } else if (const auto* ceo = ev.as<events::CeoReplied>()) {
      add(ServerType::TranscriptAppended, {{"speaker", kFacilitatorId}, {"text", ceo->text}});
    } else if (ev.as<events::VoteCast>()) {
      if (auto p = project_payload(ev, s, v)) add(ServerType::VoteResult, {{"stage", "ballot"}, {"ballot", *p}});
    } else if (ev.as<events::VoteResolved>()) {
      add(ServerType::VoteResult, {{"stage", "resolved"}, {"result", *project_payload(ev, s, v)}});
    } else if (ev.as<events::RecallBallotCast>()) {
      if (auto p = project_payload(ev, s, v)) add(ServerType::RecallResult, {{"stage", "ballot"}, {"ballot", *p}});
    } else if (ev.as<events::RecallResolved>()) {
      add(ServerType::RecallResult, {{"stage", "resolved"}, {"result", *project_payload(ev, s, v)}});
    } else if (const auto* g = ev.as<events::GameEnded>()) {
      Json p = {{"outcome", g->outcome}, {"auto_failed", g->auto_failed}};
      if (e.reveal) {
        Json bribed = Json::array();
        for (const auto& logged : s.log)
          if (const auto* b = logged.as<events::BribesAllocated>())
            bribed.push_back({{"round_index", b->round_index}, {"forced", b->forced}});
        p["bribed_members"] = bribed;
      }
      add(ServerType::GameOver, std::move(p));
    }
    // BribesAllocated is reported through the PhaseChanged into Hearing.
    return out;
  }

  void fan_out(Entry& e, const Deliver& deliver) {
    const GameState& s = e.session.state();
    const auto who = recipients(s);
    for (const auto& ev : e.batch)
      for (const auto& id : who)
        for (auto& [type, payload] : messages_for(e, ev, viewer_for(s, id)))
          deliver({id, next(e, type, std::move(payload))});
    e.batch.clear();
  }

  std::vector<ScenarioFile> scenarios_;
  HubOptions options_;
  mutable std::shared_mutex sessions_mu_;
  std::unordered_map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex token_mu_;
  std::mt19937_64 token_rng_;
};

}  // namespace policy_arena::net
