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

// HTTP + WebSocket front end for SessionHub.
//
//   GET  /healthz
//   POST /sessions              Authorization: Bearer <admin key>
//   POST /surveys/{pre|post}
//   GET  /play?code=ABC234&token=...   (WebSocket upgrade; token optional)
//
// Each connection runs on its own strand. Outgoing frames are queued on that
// strand in the order the hub hands them out, which is seq order.

#pragma once

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <boost/beast/websocket.hpp>
#include <cctype>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "policy_arena/net/hub.hpp"
#include "policy_arena/survey/analytics.hpp"

namespace policy_arena::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

inline constexpr std::size_t kMaxBodyBytes = 256 * 1024;
inline constexpr std::size_t kMaxFrameBytes = 64 * 1024;

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  int threads = 1;
};

inline http::status http_status(Errc code) {
  switch (code) {
    case Errc::AuthFailed: return http::status::unauthorized;
    case Errc::UnknownScenario: return http::status::not_found;
    case Errc::DuplicateConnection: return http::status::conflict;
    case Errc::SessionFull: return http::status::conflict;
    default: return http::status::bad_request;
  }
}

// Minimal query-string reader: splits on & and =, decodes %XX and '+'.
inline std::map<std::string, std::string> parse_query(std::string_view target) {
  std::map<std::string, std::string> out;
  auto q = target.find('?');
  if (q == std::string_view::npos) return out;
  auto decode = [](std::string_view s) {
    std::string r;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '+') {
        r += ' ';
      } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
                 std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
        r += static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16));
        i += 2;
      } else {
        r += s[i];
      }
    }
    return r;
  };
  std::string_view rest = target.substr(q + 1);
  while (!rest.empty()) {
    auto amp = rest.find('&');
    std::string_view pair = rest.substr(0, amp);
    auto eq = pair.find('=');
    if (!pair.empty()) out[decode(pair.substr(0, eq))] = eq == std::string_view::npos ? "" : decode(pair.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    rest = rest.substr(amp + 1);
  }
  return out;
}

inline std::string_view as_std(beast::string_view s) { return {s.data(), s.size()}; }

inline std::string_view target_path(std::string_view target) { return target.substr(0, target.find('?')); }

class Server;

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket&& socket, Server& server, std::string code, std::string token, PlayerId player)
      : ws_(std::move(socket)), server_(server), code_(std::move(code)), token_(std::move(token)),
        player_(std::move(player)) {}

  template <class Request>
  void start(const Request& req);

  // Thread-safe. Frames go out in call order.
  void send(std::string text) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), t = std::move(text)]() mutable {
      self->queue_.push_back(std::move(t));
      if (self->open_ && self->queue_.size() == 1) self->write_next();
    });
  }

  const PlayerId& player() const { return player_; }

 private:
  friend class Server;

  void on_accept(beast::error_code ec);
  void read_next() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsConnection::on_read, shared_from_this()));
  }
  void on_read(beast::error_code ec, std::size_t);
  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write_next();
    });
  }
  void close();

  websocket::stream<beast::tcp_stream> ws_;
  Server& server_;
  std::string code_;
  std::string token_;  // empty until Join succeeds on an anonymous connection
  PlayerId player_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool open_ = false;
  bool closed_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket&& socket, Server& server) : stream_(std::move(socket)), server_(server) {}
  void start() { asio::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->read_next(); }); }

 private:
  void read_next() {
    parser_.emplace();
    parser_->body_limit(kMaxBodyBytes);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }
  void on_read(beast::error_code ec, std::size_t);
  void reply(http::status status, const Json& body, bool keep_alive) {
    auto res = std::make_shared<http::response<http::string_body>>(status, 11);
    res->set(http::field::content_type, "application/json");
    res->keep_alive(keep_alive);
    res->body() = body.dump();
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!res->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read_next();
    });
  }

  beast::tcp_stream stream_;
  Server& server_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
};

class Server {
 public:
  using Logger = std::function<void(const std::string&)>;

  // Binds immediately; an unusable address or port is BindFailure.
  Server(SessionHub& hub, survey::ResponseStore* surveys, ServerOptions options, Logger log = {})
      : hub_(hub), surveys_(surveys), options_(std::move(options)), log_(std::move(log)), acceptor_(ioc_) {
    beast::error_code ec;
    auto address = asio::ip::make_address(options_.address, ec);
    if (ec) fail(Errc::BindFailure, "bad address '" + options_.address + "'");
    tcp::endpoint ep(address, options_.port);
    const std::string where = options_.address + ":" + std::to_string(options_.port);
    if (acceptor_.open(ep.protocol(), ec); ec) fail(Errc::BindFailure, where + ": " + ec.message());
    acceptor_.set_option(asio::socket_base::reuse_address(true), ec);
    if (acceptor_.bind(ep, ec); ec) fail(Errc::BindFailure, where + ": " + ec.message());
    if (acceptor_.listen(asio::socket_base::max_listen_connections, ec); ec)
      fail(Errc::BindFailure, where + ": " + ec.message());
    accept_next();
  }

  ~Server() { stop(); }
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  tcp::endpoint local_endpoint() const { return acceptor_.local_endpoint(); }

  // Blocks until stop(). With handle_signals, SIGINT/SIGTERM also stop.
  void run(bool handle_signals = false) {
    std::optional<asio::signal_set> signals;
    if (handle_signals) {
      signals.emplace(ioc_, SIGINT, SIGTERM);
      signals->async_wait([this](beast::error_code, int) { stop(); });
    }
    std::vector<std::jthread> extra;
    for (int i = 1; i < options_.threads; ++i) extra.emplace_back([this] { ioc_.run(); });
    ioc_.run();
  }

  // Runs on background threads; for embedding and tests.
  void start() {
    for (int i = 0; i < std::max(1, options_.threads); ++i) background_.emplace_back([this] { ioc_.run(); });
  }

  void stop() {
    ioc_.stop();
    background_.clear();
  }

  void log(const std::string& line) const {
    if (log_) log_(line);
  }

  SessionHub& hub() { return hub_; }

 private:
  friend class HttpConnection;
  friend class WsConnection;

  void accept_next() {
    acceptor_.async_accept(asio::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
      if (!ec) std::make_shared<HttpConnection>(std::move(socket), *this)->start();
      if (acceptor_.is_open()) accept_next();
    });
  }

  // Both handlers below return (status, body).
  std::pair<http::status, Json> handle(const http::request<http::string_body>& req) {
    const auto path = target_path(as_std(req.target()));
    auto error = [](Errc code, const std::string& detail) {
      return std::pair{http_status(code), error_payload(code, detail)};
    };
    try {
      if (path == "/healthz") {
        if (req.method() != http::verb::get) return {http::status::method_not_allowed, error_payload(Errc::MalformedPayload, "use GET")};
        return {http::status::ok, {{"status", "ok"}, {"sessions", hub_.session_count()}, {"protocol", kProtocolVersion}}};
      }
      if (path == "/sessions") {
        if (req.method() != http::verb::post) return {http::status::method_not_allowed, error_payload(Errc::MalformedPayload, "use POST")};
        return create_session(req);
      }
      if (path == "/surveys/pre" || path == "/surveys/post") {
        if (req.method() != http::verb::post) return {http::status::method_not_allowed, error_payload(Errc::MalformedPayload, "use POST")};
        if (surveys_ == nullptr) return {http::status::not_found, error_payload(Errc::ValidationError, "surveys are disabled")};
        const std::string id(path.substr(std::string_view("/surveys/").size()));
        surveys_->append(id, parse_body(req));
        return {http::status::created, {{"stored", true}, {"instrument", id}}};
      }
      if (path == "/play") return {http::status::bad_request, error_payload(Errc::MalformedPayload, "WebSocket upgrade required")};
      return {http::status::not_found, error_payload(Errc::MalformedPayload, "no route for " + std::string(path))};
    } catch (const Error& e) {
      return error(e.code(), e.detail());
    }
  }

  static Json parse_body(const http::request<http::string_body>& req) {
    try {
      return req.body().empty() ? Json::object() : Json::parse(req.body());
    } catch (const nlohmann::json::parse_error& e) {
      fail(Errc::MalformedPayload, std::string("body is not JSON: ") + e.what());
    }
  }

  std::pair<http::status, Json> create_session(const http::request<http::string_body>& req) {
    std::string credential;
    const auto auth = std::string(as_std(req[http::field::authorization]));
    if (auth.rfind("Bearer ", 0) == 0) credential = auth.substr(7);
    const Json body = parse_body(req);
    jsonutil::expect_keys(body, {"scenario_id", "config", "reveal_bribes_at_end"}, "session request",
                          Errc::MalformedPayload);
    if (!body.contains("scenario_id") || !body["scenario_id"].is_string())
      fail(Errc::MalformedPayload, "scenario_id is required");
    SessionOptions opts;
    opts.config_overrides = body.value("config", Json::object());
    if (body.contains("reveal_bribes_at_end")) {
      if (!body["reveal_bribes_at_end"].is_boolean()) fail(Errc::MalformedPayload, "reveal_bribes_at_end must be a boolean");
      opts.reveal_bribes_at_end = body["reveal_bribes_at_end"];
    }
    auto s = hub_.open_session(credential, body["scenario_id"], opts);
    log("session " + s.code + " opened scenario=" + s.scenario_id + " seed=" + std::to_string(s.seed));
    return {http::status::created,
            {{"code", s.code},
             {"facilitator_token", s.facilitator_token},
             {"scenario_id", s.scenario_id},
             {"seed", s.seed},
             {"play_path", "/play?code=" + s.code}}};
  }

  // Fans hub output to live sockets. Runs under the hub's session lock.
  void deliver(const std::string& code, WsConnection& sender, const Outbound& o) {
    const std::string text = o.message.dump();
    if (o.recipient == kSender || o.recipient == sender.player()) {
      if (o.message["type"] == "Joined" && o.message["payload"].contains("token")) {
        sender.player_ = o.message["payload"]["player_id"];
        sender.token_ = o.message["payload"]["token"];
        add_connection(code, sender.player_, sender.shared_from_this());
      }
      sender.send(text);
      return;
    }
    std::shared_ptr<WsConnection> target;
    {
      std::lock_guard lock(live_mu_);
      auto s = live_.find(code);
      if (s == live_.end()) return;
      auto c = s->second.find(o.recipient);
      if (c == s->second.end()) return;
      target = c->second.lock();
    }
    if (target) target->send(text);
  }

  void add_connection(const std::string& code, const PlayerId& id, const std::shared_ptr<WsConnection>& c) {
    std::lock_guard lock(live_mu_);
    live_[code][id] = c;
  }

  void remove_connection(const std::string& code, const PlayerId& id, const WsConnection* c) {
    std::lock_guard lock(live_mu_);
    auto s = live_.find(code);
    if (s == live_.end()) return;
    auto it = s->second.find(id);
    if (it != s->second.end() && (it->second.expired() || it->second.lock().get() == c)) s->second.erase(it);
  }

  SessionHub& hub_;
  survey::ResponseStore* surveys_;
  ServerOptions options_;
  Logger log_;
  asio::io_context ioc_;
  tcp::acceptor acceptor_;
  std::vector<std::jthread> background_;
  std::mutex live_mu_;
  std::map<std::string, std::map<PlayerId, std::weak_ptr<WsConnection>>> live_;
};

template <class Request>
void WsConnection::start(const Request& req) {
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.read_message_max(kMaxFrameBytes);
  beast::get_lowest_layer(ws_).expires_never();
  ws_.async_accept(req, beast::bind_front_handler(&WsConnection::on_accept, shared_from_this()));
}

inline void WsConnection::on_accept(beast::error_code ec) {
  if (ec) return close();
  open_ = true;
  if (!token_.empty()) {
    server_.hub_.route(code_, token_, client_message(ClientType::Resync).dump(),
                       [this](const Outbound& o) { server_.deliver(code_, *this, o); });
  }
  if (!queue_.empty()) write_next();
  read_next();
}

inline void WsConnection::on_read(beast::error_code ec, std::size_t) {
  if (ec) return close();
  const std::string frame = beast::buffers_to_string(buffer_.data());
  buffer_.consume(buffer_.size());
  const bool anonymous = token_.empty();
  auto r = server_.hub_.route(code_, token_, frame, [this](const Outbound& o) { server_.deliver(code_, *this, o); });
  if (anonymous && r.token) {
    try {
      server_.hub_.attach(code_, *r.token);
    } catch (const Error&) {
    }
  }
  read_next();
}

inline void WsConnection::close() {
  if (closed_) return;
  closed_ = true;
  if (!token_.empty()) {
    server_.hub_.release(code_, token_);
    server_.remove_connection(code_, player_, this);
  }
  beast::error_code ignored;
  beast::get_lowest_layer(ws_).socket().close(ignored);
}

inline void HttpConnection::on_read(beast::error_code ec, std::size_t) {
  if (ec == http::error::end_of_stream) {
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    return;
  }
  if (ec == http::error::body_limit) return reply(http::status::payload_too_large, error_payload(Errc::MalformedPayload, "body too large"), false);
  if (ec) return;
  auto req = parser_->release();
  if (websocket::is_upgrade(req)) {
    if (target_path(as_std(req.target())) != "/play")
      return reply(http::status::not_found, error_payload(Errc::MalformedPayload, "WebSocket endpoint is /play"), false);
    auto q = parse_query(as_std(req.target()));
    const std::string code = q["code"];
    const std::string token = q["token"];
    if (!server_.hub_.has_session(code))
      return reply(http::status::unauthorized, error_payload(Errc::AuthFailed, "unknown session code"), false);
    PlayerId player;
    if (!token.empty()) {
      try {
        player = server_.hub_.attach(code, token);
      } catch (const Error& e) {
        return reply(http_status(e.code()), error_payload(e.code(), e.detail()), false);
      }
    }
    stream_.expires_never();
    auto conn = std::make_shared<WsConnection>(stream_.release_socket(), server_, code, token, player);
    if (!token.empty()) server_.add_connection(code, player, conn);
    conn->start(req);
    return;
  }
  auto [status, body] = server_.handle(req);
  reply(status, body, req.keep_alive());
}

}  // namespace policy_arena::net
