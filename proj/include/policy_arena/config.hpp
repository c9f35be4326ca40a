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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "policy_arena/json_support.hpp"

namespace policy_arena {

// Bribe thresholds are either dealt from an explicit list (in seat order) or
// sampled uniformly from {min, min+step, ..., max}.
struct ThresholdSpec {
  std::vector<Money> explicit_values;
  Money min{100};
  Money max{700};
  Money step{100};

  bool operator==(const ThresholdSpec&) const = default;
};

// Engagement ~ U[engagement_min, engagement_max); strictness 1..5 drawn with
// integer weights.
struct VoterCardSpec {
  double engagement_min = 0.0;
  double engagement_max = 1.0;
  std::array<int, 5> strictness_weights{1, 1, 1, 1, 1};

  bool operator==(const VoterCardSpec&) const = default;
};

struct SessionConfig {
  int congress_seats = 7;
  int evil_players = 3;
  int min_voters = 1;
  bool allow_even_seats = false;
  // Amounts dealt as a fresh deck every round. Empty means no bribes at all.
  std::vector<Money> bribe_deck{Money{600}, Money{400}, Money{200}};
  ThresholdSpec thresholds;
  VoterCardSpec voter_cards;
  int recall_quorum = 1;
  std::uint64_t rng_seed = 0;
  bool thresholds_visible_to_evil = false;
  // Table size used by headless simulation; live sessions ignore it.
  int simulated_players = 25;

  bool operator==(const SessionConfig&) const = default;

  int min_players() const { return congress_seats + evil_players + min_voters; }
};

inline void validate(const SessionConfig& c) {
  auto bad = [](const std::string& why) { fail(Errc::InvalidConfig, why); };
  if (c.congress_seats < 3) bad("congress_seats must be >= 3");
  if (!c.allow_even_seats && c.congress_seats % 2 == 0)
    bad("congress_seats must be odd unless allow_even_seats is set");
  if (c.evil_players < 1) bad("evil_players must be >= 1");
  if (c.min_voters < 1) bad("min_voters must be >= 1");
  for (auto m : c.bribe_deck)
    if (m.units <= 0) bad("bribe_deck amounts must be positive");
  const auto& t = c.thresholds;
  if (!t.explicit_values.empty()) {
    if (static_cast<int>(t.explicit_values.size()) < c.congress_seats)
      bad("thresholds.explicit needs one value per congress seat");
    for (auto m : t.explicit_values)
      if (m.units < 0) bad("thresholds must be non-negative");
  } else {
    if (t.min.units < 0 || t.max < t.min) bad("thresholds range must satisfy 0 <= min <= max");
    if (t.step.units <= 0) bad("thresholds.step must be positive");
  }
  const auto& v = c.voter_cards;
  if (!(v.engagement_min >= 0.0 && v.engagement_max <= 1.0 && v.engagement_min <= v.engagement_max))
    bad("voter_cards engagement range must lie within [0, 1]");
  int total = 0;
  for (int w : v.strictness_weights) {
    if (w < 0) bad("strictness_weights must be non-negative");
    total += w;
  }
  if (total <= 0) bad("strictness_weights must not all be zero");
  if (c.recall_quorum < 1) bad("recall_quorum must be >= 1");
  if (c.simulated_players < c.min_players()) bad("simulated_players below the role minimum");
}

inline void to_json(Json& j, const SessionConfig& c) {
  Json thresholds;
  if (!c.thresholds.explicit_values.empty()) {
    thresholds = Json{{"explicit", c.thresholds.explicit_values}};
  } else {
    thresholds = Json{{"min", c.thresholds.min}, {"max", c.thresholds.max}, {"step", c.thresholds.step}};
  }
  j = Json{
      {"congress_seats", c.congress_seats},
      {"evil_players", c.evil_players},
      {"min_voters", c.min_voters},
      {"allow_even_seats", c.allow_even_seats},
      {"bribe_deck", c.bribe_deck},
      {"thresholds", thresholds},
      {"voter_cards",
       {{"engagement_min", c.voter_cards.engagement_min},
        {"engagement_max", c.voter_cards.engagement_max},
        {"strictness_weights", c.voter_cards.strictness_weights}}},
      {"recall_quorum", c.recall_quorum},
      {"rng_seed", c.rng_seed},
      {"thresholds_visible_to_evil", c.thresholds_visible_to_evil},
      {"simulated_players", c.simulated_players},
  };
}

// Strict reader: unknown keys are rejected, missing keys keep defaults.
inline SessionConfig config_from_json(const Json& j) {
  using jsonutil::get_or;
  constexpr auto E = Errc::InvalidConfig;
  jsonutil::expect_keys(j,
                        {"congress_seats", "evil_players", "min_voters", "allow_even_seats",
                         "bribe_deck", "thresholds", "voter_cards", "recall_quorum", "rng_seed",
                         "thresholds_visible_to_evil", "simulated_players"},
                        "config", E);
  SessionConfig c;
  c.congress_seats = get_or(j, "congress_seats", c.congress_seats, "config", E);
  c.evil_players = get_or(j, "evil_players", c.evil_players, "config", E);
  c.min_voters = get_or(j, "min_voters", c.min_voters, "config", E);
  c.allow_even_seats = get_or(j, "allow_even_seats", c.allow_even_seats, "config", E);
  c.bribe_deck = get_or(j, "bribe_deck", c.bribe_deck, "config", E);
  if (j.contains("thresholds")) {
    const Json& t = j["thresholds"];
    jsonutil::expect_keys(t, {"explicit", "min", "max", "step"}, "config.thresholds", E);
    if (t.contains("explicit")) {
      if (t.size() != 1) fail(E, "config.thresholds: 'explicit' excludes min/max/step");
      c.thresholds.explicit_values = jsonutil::get<std::vector<Money>>(t, "explicit", "config.thresholds", E);
    } else {
      c.thresholds.min = get_or(t, "min", c.thresholds.min, "config.thresholds", E);
      c.thresholds.max = get_or(t, "max", c.thresholds.max, "config.thresholds", E);
      c.thresholds.step = get_or(t, "step", c.thresholds.step, "config.thresholds", E);
    }
  }
  if (j.contains("voter_cards")) {
    const Json& v = j["voter_cards"];
    jsonutil::expect_keys(v, {"engagement_min", "engagement_max", "strictness_weights"},
                          "config.voter_cards", E);
    auto& vc = c.voter_cards;
    vc.engagement_min = get_or(v, "engagement_min", vc.engagement_min, "config.voter_cards", E);
    vc.engagement_max = get_or(v, "engagement_max", vc.engagement_max, "config.voter_cards", E);
    vc.strictness_weights =
        get_or(v, "strictness_weights", vc.strictness_weights, "config.voter_cards", E);
  }
  c.recall_quorum = get_or(j, "recall_quorum", c.recall_quorum, "config", E);
  c.rng_seed = get_or(j, "rng_seed", c.rng_seed, "config", E);
  c.thresholds_visible_to_evil =
      get_or(j, "thresholds_visible_to_evil", c.thresholds_visible_to_evil, "config", E);
  c.simulated_players = get_or(j, "simulated_players", c.simulated_players, "config", E);
  return c;
}

// Applies a partial config (JSON merge patch semantics) and validates.
inline SessionConfig apply_overrides(const SessionConfig& base, const Json& overrides) {
  if (overrides.is_null()) return base;
  if (!overrides.is_object()) fail(Errc::InvalidConfig, "config overrides must be an object");
  Json merged = base;
  // An explicit threshold list replaces a range and vice versa.
  if (overrides.contains("thresholds") && overrides["thresholds"].is_object() &&
      (overrides["thresholds"].contains("explicit") || merged["thresholds"].contains("explicit")))
    merged.erase("thresholds");
  merged.merge_patch(overrides);
  SessionConfig out = config_from_json(merged);
  validate(out);
  return out;
}

}  // namespace policy_arena
