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

// Monte Carlo batches of bot games and parameter sweeps.
//
// Game i of a batch with master seed m is played with seed derive_seed(m, i).
// Games run on worker threads; totals are summed in game-index order, so a
// report depends only on (scenario, config, policies, n, seed).

#pragma once

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "policy_arena/agents.hpp"

namespace policy_arena {

struct BalanceReport {
  std::string scenario_id;
  std::uint64_t seed = 0;
  SessionConfig config;
  PolicySet policies;
  Json overrides = Json::object();  // sweep cell, empty for a plain batch

  int games_played = 0;
  int voter_wins = 0;
  int evil_wins = 0;
  std::int64_t seated_members = 0;
  std::int64_t surviving_members = 0;
  std::int64_t members_removed = 0;
  std::int64_t forced_votes = 0;
  std::int64_t allocation_rounds = 0;
  std::vector<std::string> regulation_ids;  // docket order
  std::vector<int> adopted;                 // per regulation

  double voter_win_rate() const { return ratio(voter_wins, games_played); }
  double evil_win_rate() const { return ratio(evil_wins, games_played); }
  // A Congress member wins by finishing the game in office.
  double congress_survival_rate() const { return ratio(surviving_members, seated_members); }
  double adoption_rate(std::size_t i) const { return ratio(adopted.at(i), games_played); }
  double mean_members_removed() const { return ratio(members_removed, games_played); }
  double mean_forced_per_round() const { return ratio(forced_votes, allocation_rounds); }

  bool operator==(const BalanceReport&) const = default;

 private:
  static double ratio(std::int64_t a, std::int64_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  }
};

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

inline BalanceReport run_batch(const Scenario& scenario, const SessionConfig& config, const PolicySet& policies,
                               int n, std::uint64_t seed, unsigned workers = default_workers()) {
  if (n < 1) fail(Errc::InvalidConfig, "a batch needs at least one game");
  validate(config);
  validate(policies);

  std::vector<GameRecord> games(static_cast<std::size_t>(n));
  std::vector<std::string> errors(games.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < games.size(); i = next++) {
      try {
        games[i] = play_game(scenario, config, policies, derive_seed(seed, i));
      } catch (const Error& e) {
        errors[i] = e.detail();
      }
    }
  };
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) fail(Errc::PolicyIllegalAction, "game " + std::to_string(i) + ": " + errors[i]);

  BalanceReport r;
  r.scenario_id = scenario.id;
  r.seed = seed;
  r.config = config;
  r.policies = policies;
  r.games_played = n;
  for (const auto& reg : scenario.docket) r.regulation_ids.push_back(reg.id);
  r.adopted.assign(scenario.docket.size(), 0);
  for (const auto& g : games) {
    r.voter_wins += g.outcome.voters_win;
    r.evil_wins += g.outcome.evil_wins;
    r.seated_members += g.seated;
    r.surviving_members += static_cast<std::int64_t>(g.outcome.surviving_members.size());
    r.members_removed += g.removed;
    r.forced_votes += g.forced_total;
    r.allocation_rounds += g.allocation_rounds;
    for (std::size_t i = 0; i < g.outcome.docket_results.size(); ++i) r.adopted[i] += g.outcome.docket_results[i].adopted;
  }
  return r;
}

inline Json report_to_json(const BalanceReport& r) {
  Json adoption = Json::object();
  for (std::size_t i = 0; i < r.regulation_ids.size(); ++i) adoption[r.regulation_ids[i]] = r.adoption_rate(i);
  Json j = {{"scenario_id", r.scenario_id},
            {"seed", r.seed},
            {"games_played", r.games_played},
            {"win_rate", {{"voters", r.voter_win_rate()}, {"evil_inc", r.evil_win_rate()}, {"congress", r.congress_survival_rate()}}},
            {"adoption_rate", adoption},
            {"mean_members_removed", r.mean_members_removed()},
            {"mean_forced_per_round", r.mean_forced_per_round()},
            {"counts",
             {{"voter_wins", r.voter_wins},
              {"evil_wins", r.evil_wins},
              {"seated_members", r.seated_members},
              {"surviving_members", r.surviving_members},
              {"members_removed", r.members_removed},
              {"forced_votes", r.forced_votes},
              {"allocation_rounds", r.allocation_rounds},
              {"adopted", r.adopted}}},
            {"config", r.config},
            {"policies", policies_to_json(r.policies)}};
  if (!r.overrides.empty()) j["cell"] = r.overrides;
  return j;
}

inline std::string report_to_text(const BalanceReport& r) {
  std::vector<std::pair<std::string, std::string>> rows;
  auto num = [](double x) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << x;
    return s.str();
  };
  if (!r.overrides.empty()) rows.emplace_back("cell", r.overrides.dump());
  rows.emplace_back("scenario", r.scenario_id);
  rows.emplace_back("seed", std::to_string(r.seed));
  rows.emplace_back("games_played", std::to_string(r.games_played));
  rows.emplace_back("voter_win_rate", num(r.voter_win_rate()));
  rows.emplace_back("evil_win_rate", num(r.evil_win_rate()));
  rows.emplace_back("congress_survival_rate", num(r.congress_survival_rate()));
  rows.emplace_back("mean_members_removed", num(r.mean_members_removed()));
  rows.emplace_back("mean_forced_per_round", num(r.mean_forced_per_round()));
  for (std::size_t i = 0; i < r.regulation_ids.size(); ++i)
    rows.emplace_back("adoption[" + r.regulation_ids[i] + "]", num(r.adoption_rate(i)));
  std::size_t width = 0;
  for (const auto& [k, _] : rows) width = std::max(width, k.size());
  std::ostringstream out;
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(width + 2)) << k << v << "\n";
  return out.str();
}

// Axes of a config grid, e.g. {"recall_quorum": [1, 3, 5]}. Each cell is a
// merge patch applied to the base config.
using ConfigGrid = std::vector<std::pair<std::string, std::vector<Json>>>;

inline ConfigGrid grid_from_json(const Json& j) {
  if (!j.is_object()) fail(Errc::InvalidConfig, "sweep grid must be an object of arrays");
  ConfigGrid grid;
  for (const auto& [key, values] : j.items()) {
    if (!values.is_array()) fail(Errc::InvalidConfig, "sweep axis '" + key + "' must be an array");
    grid.emplace_back(key, std::vector<Json>(values.begin(), values.end()));
  }
  return grid;
}

// Cartesian product of the axes, first axis varying slowest. No axes, or an
// axis with no values, gives no cells.
inline std::vector<Json> grid_cells(const ConfigGrid& grid) {
  if (grid.empty()) return {};
  std::vector<Json> cells{Json::object()};
  for (const auto& [key, values] : grid) {
    std::vector<Json> next;
    for (const auto& cell : cells)
      for (const auto& v : values) {
        Json c = cell;
        c[key] = v;
        next.push_back(std::move(c));
      }
    cells = std::move(next);
  }
  return cells;
}

// Every cell uses the same master seed, so cells differ only in config.
inline std::vector<BalanceReport> sweep(const Scenario& scenario, const SessionConfig& base, const ConfigGrid& grid,
                                        const PolicySet& policies, int n, std::uint64_t seed,
                                        unsigned workers = default_workers()) {
  std::vector<BalanceReport> out;
  for (const auto& cell : grid_cells(grid)) {
    auto report = run_batch(scenario, apply_overrides(base, cell), policies, n, seed, workers);
    report.overrides = cell;
    out.push_back(std::move(report));
  }
  return out;
}

}  // namespace policy_arena
