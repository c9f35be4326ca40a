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

// Real sockets against a server on an ephemeral port.

#include "policy_arena/net/server.hpp"

#include <gtest/gtest.h>

#include <regex>

#include "test_util.hpp"

namespace policy_arena::net {
namespace {

using testing_util::ExpectErrc;

constexpr const char* kKey = "server-test-key";

struct HttpReply {
  int status = 0;
  Json body;
};

class Live : public ::testing::Test {
 protected:
  SessionHub hub{builtin_scenarios(), {kKey, std::nullopt}};
  survey::ResponseStore surveys{survey::builtin_instrument("pre"), survey::builtin_instrument("post")};
  std::unique_ptr<Server> server;
  unsigned short port = 0;
  std::vector<std::string> log_lines;
  std::mutex log_mu;

  void SetUp() override {
    server = std::make_unique<Server>(hub, &surveys, ServerOptions{"127.0.0.1", 0, 2}, [this](const std::string& l) {
      std::lock_guard lock(log_mu);
      log_lines.push_back(l);
    });
    port = server->local_endpoint().port();
    server->start();
  }
  void TearDown() override { server.reset(); }

  HttpReply request(http::verb verb, const std::string& target, const std::string& body = "",
                    const std::string& bearer = "") {
    asio::io_context ioc;
    beast::tcp_stream stream(ioc);
    stream.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
    http::request<http::string_body> req(verb, target, 11);
    req.set(http::field::host, "localhost");
    if (!bearer.empty()) req.set(http::field::authorization, "Bearer " + bearer);
    req.body() = body;
    req.prepare_payload();
    http::write(stream, req);
    beast::flat_buffer buf;
    http::response<http::string_body> res;
    http::read(stream, buf, res);
    return {static_cast<int>(res.result_int()), Json::parse(res.body())};
  }

  std::string open(const Json& config) {
    auto r = request(http::verb::post, "/sessions", Json{{"scenario_id", "scenario1"}, {"config", config}}.dump(), kKey);
    EXPECT_EQ(r.status, 201) << r.body.dump();
    facilitator_token = r.body["facilitator_token"];
    return r.body["code"];
  }
  std::string facilitator_token;
};

// Blocking WebSocket client that keeps everything it has read.
struct Client {
  asio::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};
  std::vector<Json> seen;

  Client(unsigned short port, const std::string& target) {
    ws.next_layer().connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
    ws.handshake("localhost", target);
  }
  void send(const Json& frame) { ws.write(asio::buffer(frame.dump())); }
  Json read() {
    beast::flat_buffer buf;
    ws.read(buf);
    seen.push_back(Json::parse(beast::buffers_to_string(buf.data())));
    return seen.back();
  }
  Json read_until(const std::string& type) {
    for (;;) {
      Json m = read();
      if (m["type"] == type) return m;
    }
  }
};

TEST_F(Live, Healthz) {
  auto r = request(http::verb::get, "/healthz");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["status"], "ok");
  EXPECT_EQ(request(http::verb::get, "/nowhere").status, 404);
}

TEST_F(Live, CreateSessionStatusCodes) {
  const std::string body = Json{{"scenario_id", "scenario2"}}.dump();
  EXPECT_EQ(request(http::verb::post, "/sessions", body).status, 401);
  EXPECT_EQ(request(http::verb::post, "/sessions", body, "wrong").status, 401);
  EXPECT_EQ(request(http::verb::post, "/sessions", Json{{"scenario_id", "nope"}}.dump(), kKey).status, 404);
  auto bad = request(http::verb::post, "/sessions", Json{{"scenario_id", "scenario2"}, {"config", {{"congress_seats", 2}}}}.dump(), kKey);
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.body["code"], "InvalidConfig");
  EXPECT_EQ(request(http::verb::post, "/sessions", "{not json", kKey).status, 400);
  auto ok = request(http::verb::post, "/sessions", body, kKey);
  EXPECT_EQ(ok.status, 201);
  EXPECT_TRUE(std::regex_match(ok.body["code"].get<std::string>(), std::regex("[A-HJ-NP-Z2-9]{6}")));
  std::lock_guard lock(log_mu);
  ASSERT_FALSE(log_lines.empty());
  EXPECT_NE(log_lines.back().find(ok.body["code"].get<std::string>()), std::string::npos);
}

TEST_F(Live, SurveyEndpoint) {
  Json answer = {{"instrument", "pre"}, {"answers", {{"discussion", 4}}}};
  EXPECT_EQ(request(http::verb::post, "/surveys/pre", answer.dump()).status, 201);
  EXPECT_EQ(request(http::verb::post, "/surveys/post", answer.dump()).status, 400);
  EXPECT_EQ(request(http::verb::post, "/surveys/pre", Json{{"instrument", "pre"}, {"answers", {{"discussion", 9}}}}.dump()).status,
            400);
  EXPECT_EQ(surveys.responses("pre").size(), 1u);
}

TEST_F(Live, BindFailureWhenPortTaken) {
  ExpectErrc(Errc::BindFailure, [&] { Server other(hub, nullptr, {"127.0.0.1", port, 1}); });
  ExpectErrc(Errc::BindFailure, [&] { Server other(hub, nullptr, {"not-an-address", 0, 1}); });
}

TEST_F(Live, PlayOverWebSockets) {
  const std::string code = open({{"congress_seats", 3}, {"evil_players", 1}, {"min_voters", 2}, {"rng_seed", 42}});
  Client fac(port, "/play?code=" + code + "&token=" + facilitator_token);
  EXPECT_EQ(fac.read()["type"], "StateSnapshot");

  std::vector<std::unique_ptr<Client>> players;
  std::vector<std::string> tokens;
  for (int i = 0; i < 6; ++i) {
    players.push_back(std::make_unique<Client>(port, "/play?code=" + code));
    players.back()->send(client_message(ClientType::Join, {{"name", "p" + std::to_string(i)}}));
    Json joined = players.back()->read_until("Joined");
    EXPECT_EQ(joined["payload"]["player_id"], "P" + std::to_string(i + 1));
    tokens.push_back(joined["payload"]["token"]);
  }
  fac.send(client_message(ClientType::ClosePhase));

  int evil = -1, voter = -1, member = -1;
  for (int i = 0; i < 6; ++i) {
    Json role = players[i]->read_until("RoleAssigned");
    const std::string r = role["payload"]["role"];
    if (r == "EvilInc") evil = i;
    if (r == "Voter") voter = i;
    if (r == "Congress") member = i;
  }
  ASSERT_GE(evil, 0);
  ASSERT_GE(voter, 0);
  ASSERT_GE(member, 0);
  Json brief = players[evil]->read_until("SecretBrief");
  EXPECT_FALSE(brief["payload"]["text"].get<std::string>().empty());

  // Voter tries to bribe: error to the voter only; state unchanged.
  const auto before = state_hash(hub.state(code));
  players[voter]->send(client_message(ClientType::SubmitBribes, {{"allocation", Json::object()}}));
  Json err = players[voter]->read_until("Error");
  EXPECT_EQ(err["payload"]["code"], "NotEvilInc");
  EXPECT_EQ(state_hash(hub.state(code)), before);

  players[evil]->send(client_message(ClientType::SubmitBribes, {{"allocation", Json::object()}}));
  for (int i = 0; i < 6; ++i) {
    Json phase = players[i]->read_until("PhaseChanged");
    while (phase["payload"]["to"] != "Hearing") phase = players[i]->read_until("PhaseChanged");
    EXPECT_EQ(phase["payload"].contains("allocation"), i == evil);
  }

  // Reconnect the voter: the old socket is live, so a second one is refused.
  const std::string voter_target = "/play?code=" + code + "&token=" + tokens[voter];
  EXPECT_THROW(Client dup(port, voter_target), boost::system::system_error);
  std::int64_t last_seq = players[voter]->seen.back()["seq"];
  players[voter]->ws.close(websocket::close_code::normal);
  players[voter].reset();
  std::unique_ptr<Client> again;
  for (int attempt = 0; attempt < 50 && !again; ++attempt) {
    try {
      again = std::make_unique<Client>(port, voter_target);
    } catch (const boost::system::system_error&) {
      std::this_thread::sleep_for(std::chrono::milliseconds(20));  // release happens asynchronously
    }
  }
  ASSERT_TRUE(again);
  Json snap = again->read();
  EXPECT_EQ(snap["type"], "StateSnapshot");
  EXPECT_GT(snap["seq"].get<std::int64_t>(), last_seq);
  EXPECT_EQ(snap["payload"]["phase"], "Hearing");
  EXPECT_FALSE(snap["payload"].contains("secret_brief"));

  // Per-connection order.
  for (auto& p : players) {
    if (!p) continue;
    std::int64_t prev = 0;
    for (const auto& m : p->seen) {
      EXPECT_GT(m["seq"].get<std::int64_t>(), prev);
      prev = m["seq"];
    }
  }
}

TEST_F(Live, UnknownCodeRejectedAtUpgrade) {
  EXPECT_THROW(Client c(port, "/play?code=ZZZZZZ"), boost::system::system_error);
}

TEST(Query, Parse) {
  auto q = parse_query("/play?code=ABC234&token=a%2Bb&flag");
  EXPECT_EQ(q["code"], "ABC234");
  EXPECT_EQ(q["token"], "a+b");
  EXPECT_EQ(q.count("flag"), 1u);
  EXPECT_TRUE(parse_query("/play").empty());
}

}  // namespace
}  // namespace policy_arena::net
