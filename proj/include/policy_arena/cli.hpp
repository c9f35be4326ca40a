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

// The policy-arena command line. run_cli() is the whole program minus
// main(), so tests can drive it in-process.
//
// Exit codes: 0 ok, 2 usage, 3 validation, 4 runtime. Errors are one JSON
// line on stderr: {"error":"InvalidConfig","detail":"...","exit":3}

#pragma once

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "policy_arena/balance.hpp"
#include "policy_arena/builtin_scenarios.hpp"
#include "policy_arena/event_log.hpp"
#include "policy_arena/net/server.hpp"
#include "policy_arena/survey/analytics.hpp"

#ifndef POLICY_ARENA_DEFAULT_CONTENT
#define POLICY_ARENA_DEFAULT_CONTENT ""
#endif

namespace policy_arena::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitRuntime = 4;

inline int exit_code(Errc code) {
  switch (code) {
    case Errc::UsageError: return kExitUsage;
    case Errc::IoError:
    case Errc::BindFailure:
    case Errc::PolicyIllegalAction: return kExitRuntime;
    default: return kExitValidation;
  }
}

inline void print_error(std::ostream& err, std::string_view code, const std::string& detail, int exit) {
  err << Json{{"error", code}, {"detail", detail}, {"exit", exit}}.dump() << std::endl;
}

// --content, then $POLICY_ARENA_CONTENT, then the build-time default. The
// third may not exist on an installed binary; builtins fill in then.
struct ContentDir {
  std::optional<std::filesystem::path> dir;
};

inline ContentDir resolve_content(const std::string& flag) {
  if (!flag.empty()) return {flag};
  if (const char* env = std::getenv("POLICY_ARENA_CONTENT"); env != nullptr && *env != '\0')
    return {std::filesystem::path(env)};
  std::filesystem::path fallback = POLICY_ARENA_DEFAULT_CONTENT;
  if (!fallback.empty() && std::filesystem::is_directory(fallback / "scenarios")) return {fallback};
  return {};
}

inline std::vector<ScenarioFile> load_content_scenarios(const ContentDir& c) {
  if (!c.dir) return builtin_scenarios();
  const auto dir = *c.dir / "scenarios";
  if (!std::filesystem::is_directory(dir)) fail(Errc::ContentInvalid, dir.string() + ": no such directory");
  std::vector<ScenarioFile> out;
  try {
    out = load_scenario_dir(dir);
  } catch (const Error& e) {
    fail(Errc::ContentInvalid, e.detail());
  }
  if (out.empty()) fail(Errc::ContentInvalid, dir.string() + ": no scenario files");
  return out;
}

inline survey::SurveyInstrument load_content_instrument(const ContentDir& c, const std::string& id) {
  if (c.dir) {
    const auto path = *c.dir / "surveys" / (id + ".json");
    if (std::filesystem::exists(path)) {
      try {
        return survey::load_instrument_file(path);
      } catch (const Error& e) {
        fail(Errc::ContentInvalid, path.string() + ": " + e.detail());
      }
    }
  }
  return survey::builtin_instrument(id);
}

inline Json read_json_file(const std::string& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open " + std::string(what) + " " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::ParseError, path + ": " + e.what());
  }
}

inline const ScenarioFile& pick_scenario(const std::vector<ScenarioFile>& all, const std::string& id) {
  for (const auto& f : all)
    if (f.scenario.id == id) return f;
  fail(Errc::UnknownScenario, id);
}

struct BatchFlags {
  std::string content;
  std::string scenario = "scenario1";
  int games = 1000;
  std::optional<std::uint64_t> seed;
  std::string config_file;
  std::string policies_file;
  std::optional<int> seats;
  std::vector<std::string> sets;
  unsigned workers = default_workers();
  std::string format = "json";
};

// Precedence: flags > --config file > scenario defaults.
struct BatchSetup {
  ScenarioFile scenario;
  SessionConfig config;
  PolicySet policies;
  std::uint64_t seed = 0;
};

inline BatchSetup prepare_batch(const BatchFlags& f) {
  if (f.games < 1) fail(Errc::UsageError, "--games must be at least 1");
  const auto scenarios = load_content_scenarios(resolve_content(f.content));
  BatchSetup b{pick_scenario(scenarios, f.scenario), {}, {}, 0};
  Json overrides = Json::object();
  if (!f.config_file.empty()) overrides = read_json_file(f.config_file, "config");
  if (!overrides.is_object()) fail(Errc::InvalidConfig, f.config_file + ": config must be an object");
  // A config file may carry bot policies alongside the SessionConfig keys.
  if (overrides.contains("policies")) {
    b.policies = policies_from_json(overrides["policies"]);
    overrides.erase("policies");
  }
  if (f.seats) overrides["congress_seats"] = *f.seats;
  for (const auto& kv : f.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) fail(Errc::UsageError, "--set expects key=value, got '" + kv + "'");
    Json value;
    try {
      value = Json::parse(kv.substr(eq + 1));
    } catch (const nlohmann::json::parse_error&) {
      value = kv.substr(eq + 1);  // bare words are strings
    }
    // thresholds.max=900 reaches into nested objects.
    std::string key = kv.substr(0, eq);
    std::replace(key.begin(), key.end(), '.', '/');
    try {
      overrides[Json::json_pointer("/" + key)] = value;
    } catch (const nlohmann::json::exception&) {
      fail(Errc::UsageError, "--set cannot apply '" + kv + "'");
    }
  }
  if (f.seed) overrides["rng_seed"] = *f.seed;
  b.config = apply_overrides(b.scenario.default_config(), overrides);
  b.seed = b.config.rng_seed;
  if (!f.policies_file.empty()) b.policies = policies_from_json(read_json_file(f.policies_file, "policies"));
  return b;
}

inline void add_batch_flags(CLI::App* sub, BatchFlags& f) {
  sub->add_option("--content", f.content, "Content directory (overrides $POLICY_ARENA_CONTENT)");
  sub->add_option("--scenario", f.scenario, "Scenario id")->capture_default_str();
  sub->add_option("--games", f.games, "Games per batch (>= 1)")->capture_default_str();
  sub->add_option("--seed", f.seed, "Master seed (default: config rng_seed)");
  sub->add_option("--config", f.config_file, "JSON file with SessionConfig overrides and optional \"policies\"");
  sub->add_option("--policies", f.policies_file, "JSON file with evil/congress/voter policies (overrides --config)");
  sub->add_option("--seats", f.seats, "Congress seats (overrides --config)");
  sub->add_option("--set", f.sets, "key=value config override, repeatable (overrides --config)");
  sub->add_option("--workers", f.workers, "Worker threads (default: one per hardware thread)");
  sub->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
}

inline std::pair<std::string, unsigned short> parse_bind(const std::string& bind) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos) fail(Errc::UsageError, "--bind expects host:port, got '" + bind + "'");
  std::string host = bind.substr(0, colon);
  if (host.size() > 1 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(bind.substr(colon + 1), &used);
    if (used != bind.size() - colon - 1) port = -1;
  } catch (const std::exception&) {
  }
  if (port < 0 || port > 65535) fail(Errc::UsageError, "bad port in --bind '" + bind + "'");
  return {host, static_cast<unsigned short>(port)};
}

inline std::string random_hex(std::size_t bytes) {
  std::random_device rd;
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bytes; ++i) {
    auto b = rd() & 0xff;
    out += kHex[b >> 4];
    out += kHex[b & 15];
  }
  return out;
}

struct ServeFlags {
  std::string bind = "127.0.0.1:8080";
  std::string content;
  std::string admin_key;
  std::string log_dir;
  std::string survey_dir;
  int threads = 2;
};

inline int serve(const ServeFlags& f, std::ostream& out) {
  auto [host, port] = parse_bind(f.bind);
  if (f.threads < 1) fail(Errc::UsageError, "--threads must be at least 1");
  const auto content = resolve_content(f.content);
  auto scenarios = load_content_scenarios(content);
  survey::ResponseStore surveys(load_content_instrument(content, "pre"), load_content_instrument(content, "post"),
                                f.survey_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(f.survey_dir));
  std::string key = f.admin_key;
  if (key.empty())
    if (const char* env = std::getenv("POLICY_ARENA_ADMIN_KEY")) key = env;
  const bool generated = key.empty();
  if (generated) key = random_hex(16);

  net::HubOptions hub_options{key, std::nullopt};
  if (!f.log_dir.empty()) hub_options.log_dir = f.log_dir;
  net::SessionHub hub(std::move(scenarios), hub_options);
  std::mutex out_mu;
  auto log = [&](const std::string& line) {
    std::lock_guard lock(out_mu);
    out << line << std::endl;
  };
  net::Server server(hub, &surveys, {host, port, f.threads}, log);
  const auto ep = server.local_endpoint();
  if (generated) log("admin key " + key);
  log("ready http://" + ep.address().to_string() + ":" + std::to_string(ep.port()) + " scenarios=" +
      std::to_string(hub.scenarios().size()));
  server.run(true);
  log("stopped");
  return kExitOk;
}

inline int simulate(const BatchFlags& f, std::ostream& out) {
  auto b = prepare_batch(f);
  auto report = run_batch(b.scenario.scenario, b.config, b.policies, f.games, b.seed, f.workers);
  if (f.format == "text")
    out << report_to_text(report);
  else
    out << report_to_json(report).dump(2) << "\n";
  return kExitOk;
}

inline int run_sweep(const BatchFlags& f, const std::string& grid_file, std::ostream& out) {
  auto b = prepare_batch(f);
  auto grid = grid_from_json(read_json_file(grid_file, "grid"));
  auto reports = sweep(b.scenario.scenario, b.config, grid, b.policies, f.games, b.seed, f.workers);
  if (reports.empty()) fail(Errc::InvalidConfig, grid_file + ": grid has no cells");
  if (f.format == "text") {
    for (std::size_t i = 0; i < reports.size(); ++i) out << (i ? "\n" : "") << report_to_text(reports[i]);
  } else {
    Json all = Json::array();
    for (const auto& r : reports) all.push_back(report_to_json(r));
    out << all.dump(2) << "\n";
  }
  return kExitOk;
}

inline int validate_scenarios(const std::string& path, std::ostream& out, std::ostream& err) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(path)) {
    for (const auto& e : std::filesystem::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(Errc::ValidationError, path + ": no .json files");
  } else {
    files.emplace_back(path);
  }
  for (const auto& p : files) {
    std::vector<std::string> warnings;
    auto f = load_scenario_file(p, &warnings);
    out << "ok " << p.string() << ": " << f.scenario.id << ", " << f.scenario.docket.size() << " regulations\n";
    for (const auto& w : warnings) err << "warning: " << p.string() << ": " << w << "\n";
  }
  return kExitOk;
}

inline int survey_report(const std::string& content_flag, const std::string& pre_file, const std::string& post_file,
                         const std::string& format, std::ostream& out) {
  const auto content = resolve_content(content_flag);
  const auto pre_in = load_content_instrument(content, "pre");
  const auto post_in = load_content_instrument(content, "post");
  const auto pre = survey::load_responses_file(pre_file, pre_in);
  const auto post = survey::load_responses_file(post_file, post_in);
  const auto cmp = survey::compare(pre_in, pre, post_in, post);
  std::optional<std::vector<survey::FeedbackItem>> feedback;
  if (post_in.section(survey::kFeedbackSection) != nullptr) {
    try {
      feedback = survey::feedback_summary(post_in, post);
    } catch (const Error& e) {
      if (e.code() != Errc::NoResponses) throw;
    }
  }
  if (format == "json") {
    Json j = {{"comparison", survey::comparison_to_json(cmp)}};
    j["feedback"] = feedback ? survey::feedback_to_json(*feedback) : Json(nullptr);
    out << j.dump(2) << "\n";
  } else {
    out << survey::comparison_to_text(cmp);
    if (feedback) out << "\n" << survey::feedback_to_text(*feedback);
  }
  return kExitOk;
}

inline int replay_log(const std::string& dir, std::ostream& out) {
  auto record = read_session_dir(dir);
  auto result = replay(record);
  Json j = {{"session", dir},
            {"scenario_id", record.manifest.scenario.scenario.id},
            {"events", record.events.size()},
            {"finished", result.finished},
            {"phase", result.state.phase},
            {"state_hash", state_hash(result.state)}};
  if (result.finished) {
    // The fold has already checked the logged outcome against the rules.
    const auto* ended = record.events.back().as<events::GameEnded>();
    if (ended == nullptr) fail(Errc::CorruptLog, "finished log does not end with GameEnded");
    j["outcome"] = ended->outcome;
    j["auto_failed"] = ended->auto_failed;
  }
  out << j.dump(2) << "\n";
  return kExitOk;
}

inline constexpr const char* kDescription =
    "Congress vs. Evil Inc.: classroom AI-policy game server, balance simulator and survey reports.\n"
    "Config precedence: flags > --config file > scenario defaults > built-in defaults.\n"
    "Content directory: --content > $POLICY_ARENA_CONTENT > compiled-in default.";

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{kDescription, "policy-arena"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kEngineVersion));

  ServeFlags serve_flags;
  auto* serve_cmd = app.add_subcommand("serve", "Host live sessions over HTTP and WebSocket");
  serve_cmd->add_option("--bind", serve_flags.bind, "Listen address host:port")->capture_default_str();
  serve_cmd->add_option("--content", serve_flags.content, "Content directory (overrides $POLICY_ARENA_CONTENT)");
  serve_cmd->add_option("--admin-key", serve_flags.admin_key,
                        "Facilitator key for POST /sessions (default: $POLICY_ARENA_ADMIN_KEY, else random)");
  serve_cmd->add_option("--log-dir", serve_flags.log_dir, "Write one event log per session under this directory");
  serve_cmd->add_option("--survey-dir", serve_flags.survey_dir, "Append survey responses here as NDJSON");
  serve_cmd->add_option("--threads", serve_flags.threads, "I/O threads")->capture_default_str();

  BatchFlags sim_flags;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a batch of bot games and print a balance report");
  add_batch_flags(sim_cmd, sim_flags);

  BatchFlags sweep_flags;
  std::string grid_file;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one batch per cell of a config grid");
  add_batch_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--grid", grid_file, "JSON object of config key -> list of values")->required();

  std::string scenario_path;
  auto* validate_cmd = app.add_subcommand("validate-scenario", "Check a scenario file or directory");
  validate_cmd->add_option("path", scenario_path, "Scenario .json file or directory")->required();

  std::string survey_content, pre_file, post_file, survey_format = "text";
  auto* survey_cmd = app.add_subcommand("survey-report", "Compare pre and post survey responses");
  survey_cmd->add_option("--pre", pre_file, "JSON array of pre-survey responses")->required();
  survey_cmd->add_option("--post", post_file, "JSON array of post-survey responses")->required();
  survey_cmd->add_option("--content", survey_content, "Content directory holding surveys/{pre,post}.json");
  survey_cmd->add_option("--format", survey_format, "Output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  std::string log_dir;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a session event log and print its result");
  replay_cmd->add_option("--log", log_dir, "Session log directory (manifest.json + events.ndjson)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    print_error(err, to_string(Errc::UsageError), e.what(), kExitUsage);
    return kExitUsage;
  }

  try {
    if (*serve_cmd) return serve(serve_flags, out);
    if (*sim_cmd) return simulate(sim_flags, out);
    if (*sweep_cmd) return run_sweep(sweep_flags, grid_file, out);
    if (*validate_cmd) return validate_scenarios(scenario_path, out, err);
    if (*survey_cmd) return survey_report(survey_content, pre_file, post_file, survey_format, out);
    if (*replay_cmd) return replay_log(log_dir, out);
  } catch (const Error& e) {
    const int code = exit_code(e.code());
    print_error(err, to_string(e.code()), e.detail(), code);
    return code;
  } catch (const std::exception& e) {
    print_error(err, "InternalError", e.what(), kExitRuntime);
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace policy_arena::cli
