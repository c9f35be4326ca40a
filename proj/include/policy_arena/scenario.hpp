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

// Scenario files: UTF-8 JSON with a format version, one scenario and an
// optional partial SessionConfig. See docs/scenario-format.md.

#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "policy_arena/config.hpp"
#include "policy_arena/json_support.hpp"
#include "policy_arena/rules.hpp"

namespace policy_arena {

inline constexpr int kScenarioFormatVersion = 1;

struct ScenarioFile {
  int format_version = kScenarioFormatVersion;
  Scenario scenario;
  Json default_config_overrides;   // null or a partial SessionConfig object
  std::vector<std::string> notes;  // editorial remarks, carried verbatim

  bool operator==(const ScenarioFile&) const = default;

  SessionConfig default_config() const {
    return apply_overrides(SessionConfig{}, default_config_overrides);
  }
};

namespace detail {

inline bool is_token(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s) {
    bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
              ch == '-' || ch == '_';
    if (!ok) return false;
  }
  return true;
}

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

// Checks the Scenario invariants; throws ValidationError naming the one broken.
inline void validate(const Scenario& s) {
  auto bad = [](const std::string& why) { fail(Errc::ValidationError, why); };
  if (!detail::is_token(s.id)) bad("scenario.id must be a non-empty token");
  if (s.topic.empty()) bad("scenario.topic must be non-empty");
  if (s.docket.empty()) bad("scenario.docket must hold at least one regulation");
  std::set<std::string> ids;
  int keys = 0;
  for (const auto& r : s.docket) {
    if (!detail::is_token(r.id)) bad("regulation id must be a non-empty token");
    if (!ids.insert(r.id).second) bad("regulation ids must be unique: " + r.id);
    if (r.title.empty()) bad("regulation " + r.id + " has an empty title");
    if (r.is_key) ++keys;
  }
  if (keys != 1) bad("exactly one regulation must have is_key = true (found " + std::to_string(keys) + ")");
}

inline std::vector<std::string> lint(const ScenarioFile& f) {
  std::vector<std::string> warnings;
  const auto& s = f.scenario;
  if (s.key_issue.empty()) warnings.push_back("scenario.key_issue is empty");
  if (s.secret_brief.empty()) warnings.push_back("scenario.secret_brief is empty");
  for (const auto& r : s.docket)
    if (r.summary.empty()) warnings.push_back("regulation " + r.id + " has no summary");
  return warnings;
}

inline Json scenario_to_json(const ScenarioFile& f) {
  Json docket = Json::array();
  for (const auto& r : f.scenario.docket)
    docket.push_back({{"id", r.id}, {"title", r.title}, {"summary", r.summary}, {"is_key", r.is_key}});
  Json j = {{"format_version", f.format_version},
            {"scenario",
             {{"id", f.scenario.id},
              {"topic", f.scenario.topic},
              {"key_issue", f.scenario.key_issue},
              {"secret_brief", f.scenario.secret_brief},
              {"docket", docket}}}};
  if (!f.default_config_overrides.is_null()) j["default_config_overrides"] = f.default_config_overrides;
  if (!f.notes.empty()) j["notes"] = f.notes;
  return j;
}

inline std::string serialize_scenario(const ScenarioFile& f) { return scenario_to_json(f).dump(2) + "\n"; }

inline ScenarioFile scenario_from_json(const Json& j) {
  using jsonutil::get;
  if (!j.is_object()) fail(Errc::ValidationError, "scenario file must be a JSON object");
  auto version = j.find("format_version");
  if (version == j.end() || !version->is_number_integer())
    fail(Errc::ValidationError, "format_version must be an integer");
  if (version->get<int>() != kScenarioFormatVersion)
    fail(Errc::UnsupportedVersion, "format_version " + version->dump() + " (supported: " +
                                       std::to_string(kScenarioFormatVersion) + ")");
  jsonutil::expect_keys(j, {"format_version", "scenario", "default_config_overrides", "notes"}, "file");

  ScenarioFile f;
  const Json& s = j.contains("scenario") ? j["scenario"] : Json();
  if (!s.is_object()) fail(Errc::ValidationError, "missing 'scenario' object");
  jsonutil::expect_keys(s, {"id", "topic", "key_issue", "secret_brief", "docket"}, "scenario");
  f.scenario.id = get<std::string>(s, "id", "scenario");
  f.scenario.topic = get<std::string>(s, "topic", "scenario");
  f.scenario.key_issue = get<std::string>(s, "key_issue", "scenario");
  f.scenario.secret_brief = get<std::string>(s, "secret_brief", "scenario");
  const Json& docket = s.contains("docket") ? s["docket"] : Json();
  if (!docket.is_array()) fail(Errc::ValidationError, "scenario.docket must be an array");
  for (const auto& r : docket) {
    jsonutil::expect_keys(r, {"id", "title", "summary", "is_key"}, "regulation");
    f.scenario.docket.push_back(Regulation{get<std::string>(r, "id", "regulation"),
                                           get<std::string>(r, "title", "regulation"),
                                           jsonutil::get_or<std::string>(r, "summary", "", "regulation"),
                                           get<bool>(r, "is_key", "regulation")});
  }
  validate(f.scenario);

  if (j.contains("default_config_overrides")) {
    f.default_config_overrides = j["default_config_overrides"];
    try {
      (void)f.default_config();
    } catch (const Error& e) {
      fail(Errc::ValidationError, "default_config_overrides: " + e.detail());
    }
  }
  if (j.contains("notes")) f.notes = get<std::vector<std::string>>(j, "notes", "file");
  return f;
}

inline ScenarioFile load_scenario(std::istream& in, std::vector<std::string>* warnings = nullptr) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::ParseError, detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  ScenarioFile f = scenario_from_json(j);
  if (warnings != nullptr) *warnings = lint(f);
  return f;
}

inline ScenarioFile load_scenario_string(const std::string& text,
                                         std::vector<std::string>* warnings = nullptr) {
  std::istringstream in(text);
  return load_scenario(in, warnings);
}

inline ScenarioFile load_scenario_file(const std::filesystem::path& path,
                                       std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path.string());
  try {
    return load_scenario(in, warnings);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.detail());
  }
}

// All *.json files in `dir`, sorted by file name. The first invalid file
// aborts with an error naming it.
inline std::vector<ScenarioFile> load_scenario_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> paths;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".json") paths.push_back(entry.path());
  if (ec) fail(Errc::IoError, "cannot read " + dir.string() + ": " + ec.message());
  std::sort(paths.begin(), paths.end());
  std::vector<ScenarioFile> out;
  std::set<std::string> ids;
  for (const auto& p : paths) {
    out.push_back(load_scenario_file(p));
    if (!ids.insert(out.back().scenario.id).second)
      fail(Errc::ValidationError, p.string() + ": duplicate scenario id " + out.back().scenario.id);
  }
  return out;
}

}  // namespace policy_arena
