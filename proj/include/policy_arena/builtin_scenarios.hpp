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

// The three classroom scenarios. content/scenarios/*.json carry the same
// data; tests keep the two in sync.

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "policy_arena/scenario.hpp"

namespace policy_arena {

inline std::vector<ScenarioFile> builtin_scenarios() {
  std::vector<ScenarioFile> out;

  ScenarioFile s1;
  s1.scenario = Scenario{
      "scenario1",
      "AI-targeted advertising",
      "Protection of underage users",
      {
          {"s1-minor-social-media-ban", "Social media ban for children under 18",
           "Platforms may not offer accounts to anyone under 18.", false},
          {"s1-data-access", "Users can request a copy of their own data",
           "Platforms must hand users a copy of the data held about them on request.", false},
          {"s1-ai-use-notice", "Users must be notified about when and how AI is used",
           "Any AI-driven feature or decision must be disclosed to the user.", false},
          {"s1-targeted-ad-ban", "Ban on using AI to target advertising",
           "Advertising may not be personalised by AI models.", true},
      },
      "Evil Inc. earns most of its revenue from AI-personalised ads, and its "
      "fastest-growing audience is teenagers. Stop any rule that takes targeted "
      "advertising away from the company."};
  s1.notes = {
      "Key regulation chosen as the item closest to the key issue; override freely.",
      "secret_brief and regulation summaries are authored game content."};
  out.push_back(s1);

  ScenarioFile s2;
  s2.scenario = Scenario{
      "scenario2",
      "Autonomous vehicles",
      "Testing and acceptable harm",
      {
          {"s2-central-monitoring",
           "Require companies to monitor their autonomous fleet from a central control center",
           "Operators must staff a control center that watches every vehicle in service.", false},
          {"s2-manual-override", "Require autonomous vehicles to have a manual override feature",
           "Every vehicle must let a human take control at any time.", false},
          {"s2-final-inspection",
           "Prohibit autonomous vehicles from being publicly released until they pass a rigorous final "
           "inspection",
           "No public release before an independent, rigorous final inspection is passed.", true},
          {"s2-total-ban", "Ban autonomous vehicles in all cases",
           "Autonomous vehicles may not operate on public roads at all.", false},
      },
      "Evil Inc. plans to launch its robotaxi fleet next quarter, before its "
      "safety testing is finished. Any inspection requirement would delay the "
      "launch by years, so keep release rules off the books."};
  s2.notes = s1.notes;
  out.push_back(s2);

  ScenarioFile s3;
  s3.scenario = Scenario{
      "scenario3",
      "LLMs and `general-purpose' AI",
      "Disclosure of model information",
      {
          {"s3-no-user-data-training", "Prohibit LLMs from training on user data (prompts)",
           "User prompts may not be used as training data.", false},
          {"s3-architecture-disclosure",
           "Require LLMs to disclose their general model architecture and training process",
           "Providers must report their model architecture and training process to regulators.", true},
          {"s3-law-enforcement-notice",
           "Require LLMs to notify law enforcement if the user refers to illegal activity",
           "Providers must report prompts that mention illegal activity.", false},
          {"s3-no-live-internet",
           "Prohibit LLMs from accessing the live internet (i.e. require a training cutoff)",
           "Models may only use knowledge up to a fixed training cutoff.", false},
      },
      "Evil Inc.'s language model only leads the market because its model "
      "architecture is kept secret. Prevent Congress from forcing disclosure of "
      "any architecture or training information."};
  s3.notes = {
      "Key regulation follows the disclosure duty for general-purpose models; override freely.",
      "Regulation summaries are authored game content."};
  out.push_back(s3);

  return out;
}

inline std::optional<ScenarioFile> find_scenario(const std::vector<ScenarioFile>& files,
                                                 std::string_view id) {
  for (const auto& f : files)
    if (f.scenario.id == id) return f;
  return std::nullopt;
}

}  // namespace policy_arena
