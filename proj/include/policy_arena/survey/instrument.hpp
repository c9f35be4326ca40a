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

// Pre/post module survey instruments and anonymous responses.
//
// Likert items use a 1-5 scale, 1 = "Strongly disagree" ... 5 = "Strongly
// agree". Responses carry no respondent identifier and the JSON schema
// rejects any key besides "instrument" and "answers".

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "policy_arena/json_support.hpp"

namespace policy_arena::survey {

inline constexpr int kInstrumentFormatVersion = 1;
inline constexpr const char* kFeedbackSection = "AI Policy Module Feedback";
inline constexpr std::array<const char*, 5> kLikertAnchors = {
    "Strongly disagree", "Somewhat disagree", "Neither agree nor disagree", "Somewhat agree", "Strongly agree"};

enum class QuestionKind { Likert, FreeResponse };

struct Question {
  std::string id;
  std::string text;
  QuestionKind kind = QuestionKind::Likert;
  bool operator==(const Question&) const = default;
};

struct Section {
  std::string title;
  std::vector<Question> questions;
  bool operator==(const Section&) const = default;
};

struct SurveyInstrument {
  std::string id;  // "pre" or "post"
  std::vector<Section> sections;

  const Question* find(std::string_view qid) const {
    for (const auto& s : sections)
      for (const auto& q : s.questions)
        if (q.id == qid) return &q;
    return nullptr;
  }
  const Section* section(std::string_view title) const {
    for (const auto& s : sections)
      if (s.title == title) return &s;
    return nullptr;
  }
  bool operator==(const SurveyInstrument&) const = default;
};

inline void validate(const SurveyInstrument& in) {
  auto bad = [&](const std::string& msg) { fail(Errc::ValidationError, "instrument '" + in.id + "': " + msg); };
  if (in.id != "pre" && in.id != "post") bad("id must be \"pre\" or \"post\"");
  if (in.sections.empty()) bad("no sections");
  std::set<std::string> ids;
  for (const auto& s : in.sections) {
    if (s.title.empty()) bad("section without a title");
    if (s.title == kFeedbackSection && in.id != "post") bad("the module feedback section belongs to the post survey only");
    for (const auto& q : s.questions) {
      if (q.id.empty() || q.text.empty()) bad("question needs an id and text");
      if (!ids.insert(q.id).second) bad("duplicate question id '" + q.id + "'");
    }
  }
}

inline Json instrument_to_json(const SurveyInstrument& in) {
  Json sections = Json::array();
  for (const auto& s : in.sections) {
    Json qs = Json::array();
    for (const auto& q : s.questions)
      qs.push_back({{"id", q.id}, {"text", q.text}, {"kind", q.kind == QuestionKind::Likert ? "likert" : "free_response"}});
    sections.push_back({{"title", s.title}, {"questions", qs}});
  }
  return {{"format_version", kInstrumentFormatVersion}, {"id", in.id}, {"sections", sections}};
}

inline SurveyInstrument instrument_from_json(const Json& j) {
  using jsonutil::expect_keys;
  SurveyInstrument in;
  try {
    expect_keys(j, {"format_version", "id", "sections"}, "instrument");
    if (j.at("format_version").get<int>() != kInstrumentFormatVersion)
      fail(Errc::UnsupportedVersion, "instrument format_version " + j.at("format_version").dump());
    in.id = j.at("id").get<std::string>();
    for (const auto& sj : j.at("sections")) {
      expect_keys(sj, {"title", "questions"}, "section");
      Section s{sj.at("title").get<std::string>(), {}};
      for (const auto& qj : sj.at("questions")) {
        expect_keys(qj, {"id", "text", "kind"}, "question");
        const auto kind = qj.at("kind").get<std::string>();
        if (kind != "likert" && kind != "free_response") fail(Errc::ValidationError, "unknown question kind '" + kind + "'");
        s.questions.push_back({qj.at("id").get<std::string>(), qj.at("text").get<std::string>(),
                               kind == "likert" ? QuestionKind::Likert : QuestionKind::FreeResponse});
      }
      in.sections.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ValidationError, std::string("instrument: ") + e.what());
  }
  validate(in);
  return in;
}

inline SurveyInstrument builtin_instrument(const std::string& id) {
  using K = QuestionKind;
  SurveyInstrument in{id, {}};
  in.sections.push_back(
      {"AI Ethics",
       {{"define_ethics", "In one sentence, how would you define the term ethics?", K::FreeResponse},
        {"tools_ethical", "In general, I think existing AI tools are ethical.", K::Likert},
        {"developers_ethical", "I believe that most developers of AI tools design their AI systems with ethics in mind.",
         K::Likert},
        {"worry_current", "I worry about the ethical impact of *current* AI technology.", K::Likert},
        {"worry_future", "I worry about the ethical impact of *future* AI technology.", K::Likert},
        {"act_ethically", "In general, I think I act ethically when I use or create AI tools.", K::Likert},
        {"ethics_concerns",
         "Are there any particular ethical concerns or impacts of AI technology that you are concerned about?",
         K::FreeResponse}}});
  in.sections.push_back(
      {"AI Policy",
       {{"define_policy", "In one sentence, how would you define AI policy?", K::FreeResponse},
        {"adequately_regulated", "I believe AI technologies are currently adequately regulated by the government.",
         K::Likert},
        {"protect_users",
         "The government and private companies should do more to protect *users* from potential harms of AI technology.",
         K::Likert},
        {"protect_society",
         "The government and private companies should do more to protect *society* from potential harms of AI "
         "technology.",
         K::Likert},
        {"discussion", "I can have a robust discussion with friends or peers about AI regulation.", K::Likert},
        {"follow_news", "I plan to follow news about government regulation of technology and/or AI in the future.",
         K::Likert},
        {"apply_ethics", "I feel confident in my ability to apply ethical principles to my work related to AI.",
         K::Likert},
        {"implement_policies", "I feel confident in my ability to implement policies regarding AI in my work.",
         K::Likert},
        {"job_knowledge", "My future job will probably require me to be generally knowledgable about AI policy.",
         K::Likert},
        {"career_interest", "I am interested in AI policy and regulation as a potential career path.", K::Likert}}});
  if (id == "post")
    in.sections.push_back(
        {kFeedbackSection,
         {{"overall_rating",
           "Overall, how would you rate these two lectures (\"AI Ethics\" and \"AI Policy\")?", K::FreeResponse},
          {"content_interesting", "The content of the lectures was interesting.", K::Likert},
          {"engaging_interactive", "The lectures were engaging and interactive.", K::Likert},
          {"interactivity_vs_previous",
           "I liked the level of interactivity in these lectures compared to previous lectures.", K::Likert},
          {"good_use_of_time", "The lectures were a good use of class time.", K::Likert},
          {"game_enjoyable", "The in-class simulation (mafia game) was enjoyable.", K::Likert},
          {"game_helpful", "The in-class simulation (mafia game) was helpful for me to connect with the lecture content.",
           K::Likert}}});
  validate(in);
  return in;
}

inline SurveyInstrument load_instrument_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot read " + path.string());
  try {
    return instrument_from_json(Json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::ParseError, path.string() + ": " + e.what());
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.detail());
  }
}

// --- responses ---------------------------------------------------------------

using Answer = std::variant<int, std::string>;  // Likert 1-5 or free text

struct SurveyResponse {
  std::string instrument_id;
  std::map<std::string, Answer> answers;
  bool operator==(const SurveyResponse&) const = default;
};

inline void validate(const SurveyResponse& r, const SurveyInstrument& in) {
  if (r.instrument_id != in.id)
    fail(Errc::InstrumentMismatch, "response for '" + r.instrument_id + "' checked against '" + in.id + "'");
  for (const auto& [qid, answer] : r.answers) {
    const Question* q = in.find(qid);
    if (q == nullptr) fail(Errc::ValidationError, "no question '" + qid + "' in the " + in.id + " survey");
    if (q->kind == QuestionKind::Likert) {
      const int* v = std::get_if<int>(&answer);
      if (v == nullptr || *v < 1 || *v > 5) fail(Errc::ValidationError, "'" + qid + "' needs an integer 1-5");
    } else if (!std::holds_alternative<std::string>(answer)) {
      fail(Errc::ValidationError, "'" + qid + "' needs a text answer");
    }
  }
}

inline Json response_to_json(const SurveyResponse& r) {
  Json answers = Json::object();
  for (const auto& [qid, a] : r.answers)
    std::visit([&, &qid = qid](const auto& v) { answers[qid] = v; }, a);
  return {{"instrument", r.instrument_id}, {"answers", answers}};
}

inline SurveyResponse response_from_json(const Json& j, const SurveyInstrument& in) {
  jsonutil::expect_keys(j, {"instrument", "answers"}, "survey response");
  SurveyResponse r;
  try {
    r.instrument_id = j.at("instrument").get<std::string>();
    if (!j.at("answers").is_object()) fail(Errc::ValidationError, "answers must be an object");
    for (const auto& [qid, v] : j.at("answers").items()) {
      if (v.is_number_integer()) {
        r.answers[qid] = v.get<int>();
      } else if (v.is_string()) {
        r.answers[qid] = v.get<std::string>();
      } else {
        fail(Errc::ValidationError, "'" + qid + "' must be an integer or a string");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ValidationError, std::string("survey response: ") + e.what());
  }
  validate(r, in);
  return r;
}

inline std::vector<SurveyResponse> responses_from_json(const Json& j, const SurveyInstrument& in) {
  if (!j.is_array()) fail(Errc::ValidationError, "responses must be a JSON array");
  std::vector<SurveyResponse> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      out.push_back(response_from_json(j[i], in));
    } catch (const Error& e) {
      fail(e.code(), "response " + std::to_string(i) + ": " + e.detail());
    }
  }
  return out;
}

inline std::vector<SurveyResponse> load_responses_file(const std::filesystem::path& path, const SurveyInstrument& in) {
  std::ifstream f(path);
  if (!f) fail(Errc::IoError, "cannot read " + path.string());
  try {
    return responses_from_json(Json::parse(f), in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::ParseError, path.string() + ": " + e.what());
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.detail());
  }
}

}  // namespace policy_arena::survey
