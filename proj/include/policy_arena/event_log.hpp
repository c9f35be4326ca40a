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

// On-disk session records. A session directory holds
//   manifest.json  - engine version, scenario id, seed, config, scenario file
//   events.ndjson  - one GameEvent per line, in sequence order

#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "policy_arena/scenario.hpp"
#include "policy_arena/session.hpp"

namespace policy_arena {

struct SessionManifest {
  std::string engine_version = kEngineVersion;
  std::string scenario_id;
  std::uint64_t seed = 0;
  SessionConfig config;
  ScenarioFile scenario;
};

inline Json manifest_to_json(const SessionManifest& m) {
  return {{"engine_version", m.engine_version},
          {"scenario_id", m.scenario_id},
          {"seed", m.seed},
          {"config", m.config},
          {"scenario", scenario_to_json(m.scenario)}};
}

inline std::string engine_major(const std::string& version) { return version.substr(0, version.find('.')); }

inline SessionManifest manifest_from_json(const Json& j) {
  SessionManifest m;
  try {
    m.engine_version = j.at("engine_version").get<std::string>();
    if (engine_major(m.engine_version) != engine_major(kEngineVersion))
      fail(Errc::VersionMismatch, "log written by engine " + m.engine_version + ", this is " + kEngineVersion);
    m.scenario_id = j.at("scenario_id").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config = config_from_json(j.at("config"));
    m.scenario = scenario_from_json(j.at("scenario"));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::CorruptLog, std::string("malformed manifest: ") + e.what());
  }
  return m;
}

inline SessionManifest make_manifest(const ScenarioFile& scenario, const SessionConfig& config) {
  return {kEngineVersion, scenario.scenario.id, config.rng_seed, config, scenario};
}

// Appends events to <dir>/events.ndjson as they are committed.
class EventLogWriter {
 public:
  EventLogWriter(const std::filesystem::path& dir, const SessionManifest& manifest) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
    std::ofstream(dir / "manifest.json") << manifest_to_json(manifest).dump(2) << "\n";
    out_.open(dir / "events.ndjson", std::ios::trunc);
    if (!out_) fail(Errc::IoError, "cannot write " + (dir / "events.ndjson").string());
  }

  void append(const GameEvent& ev) {
    std::lock_guard<std::mutex> lock(mu_);
    out_ << event_to_json(ev).dump() << "\n";
    out_.flush();
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::ofstream out_;
  std::mutex mu_;
};

inline std::vector<GameEvent> parse_event_log(std::istream& in) {
  std::vector<GameEvent> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(Errc::CorruptLog, "line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(event_from_json(j));
  }
  return out;
}

struct SessionRecord {
  SessionManifest manifest;
  std::vector<GameEvent> events;
};

inline SessionRecord read_session_dir(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) fail(Errc::IoError, "missing " + (dir / "manifest.json").string());
  std::ifstream ef(dir / "events.ndjson");
  if (!ef) fail(Errc::IoError, "missing " + (dir / "events.ndjson").string());
  Json mj;
  try {
    mj = Json::parse(mf);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::CorruptLog, std::string("manifest: ") + e.what());
  }
  return {manifest_from_json(mj), parse_event_log(ef)};
}

inline ReplayResult replay(const SessionRecord& record) {
  return replay(record.events, record.manifest.scenario.scenario, record.manifest.config);
}

}  // namespace policy_arena
