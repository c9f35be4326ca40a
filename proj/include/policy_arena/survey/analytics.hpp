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

// Agreement statistics over survey responses. "Agree" means a Likert answer
// of 4 or 5. Fractions are kept as exact (count, denominator) pairs; whole
// percents are for display only and round half up.

#pragma once

#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>

#include "policy_arena/survey/instrument.hpp"

namespace policy_arena::survey {

struct Fraction {
  std::int64_t count = 0;
  std::int64_t den = 0;

  double value() const { return static_cast<double>(count) / static_cast<double>(den); }
  int percent() const { return static_cast<int>((200 * count + den) / (2 * den)); }
  bool operator==(const Fraction&) const = default;
};

inline Json to_json(const Fraction& f) { return {{"count", f.count}, {"n", f.den}, {"value", f.value()}, {"percent", f.percent()}}; }

namespace detail {

inline const Question& likert_question(const SurveyInstrument& in, const std::string& qid) {
  const Question* q = in.find(qid);
  if (q == nullptr) fail(Errc::ValidationError, "no question '" + qid + "' in the " + in.id + " survey");
  if (q->kind != QuestionKind::Likert) fail(Errc::NotLikert, qid);
  return *q;
}

template <class Pred>
Fraction count_answers(const std::vector<SurveyResponse>& responses, const std::string& qid, Pred pred) {
  Fraction f;
  for (const auto& r : responses) {
    auto it = r.answers.find(qid);
    if (it == r.answers.end()) continue;
    const int* v = std::get_if<int>(&it->second);
    if (v == nullptr) continue;
    ++f.den;
    if (pred(*v)) ++f.count;
  }
  if (f.den == 0) fail(Errc::NoResponses, qid);
  return f;
}

}  // namespace detail

// Share answering 4 or 5 among those who answered the question at all.
inline Fraction agreement_fraction(const SurveyInstrument& in, const std::vector<SurveyResponse>& responses,
                                   const std::string& qid) {
  detail::likert_question(in, qid);
  return detail::count_answers(responses, qid, [](int v) { return v >= 4; });
}

inline Fraction strong_agreement_fraction(const SurveyInstrument& in, const std::vector<SurveyResponse>& responses,
                                          const std::string& qid) {
  detail::likert_question(in, qid);
  return detail::count_answers(responses, qid, [](int v) { return v == 5; });
}

struct QuestionComparison {
  std::string question_id;
  std::string text;
  Fraction pre;
  Fraction post;

  double delta() const { return post.value() - pre.value(); }
  int delta_percent() const { return post.percent() - pre.percent(); }
  bool operator==(const QuestionComparison&) const = default;
};

struct SurveyComparison {
  std::size_t n_pre = 0;
  std::size_t n_post = 0;
  std::vector<QuestionComparison> questions;  // order of the first instrument
  std::vector<std::string> skipped;           // shared, but unanswered on one side

  const QuestionComparison* find(std::string_view qid) const {
    for (const auto& q : questions)
      if (q.question_id == qid) return &q;
    return nullptr;
  }
};

// Compares every Likert question present in both instruments. Each response
// set must belong to the instrument passed alongside it.
inline SurveyComparison compare(const SurveyInstrument& pre_in, const std::vector<SurveyResponse>& pre,
                                const SurveyInstrument& post_in, const std::vector<SurveyResponse>& post) {
  for (const auto& r : pre) validate(r, pre_in);
  for (const auto& r : post) validate(r, post_in);
  SurveyComparison out{pre.size(), post.size(), {}, {}};
  for (const auto& s : pre_in.sections) {
    for (const auto& q : s.questions) {
      if (q.kind != QuestionKind::Likert) continue;
      const Question* other = post_in.find(q.id);
      if (other == nullptr) continue;
      if (other->text != q.text || other->kind != q.kind)
        fail(Errc::InstrumentMismatch, "question '" + q.id + "' differs between the two instruments");
      try {
        out.questions.push_back({q.id, q.text, agreement_fraction(pre_in, pre, q.id), agreement_fraction(post_in, post, q.id)});
      } catch (const Error& e) {
        if (e.code() != Errc::NoResponses) throw;
        out.skipped.push_back(q.id);
      }
    }
  }
  return out;
}

struct FeedbackItem {
  std::string question_id;
  std::string text;
  Fraction agree;
  Fraction strongly_agree;
};

inline std::vector<FeedbackItem> feedback_summary(const SurveyInstrument& post_in,
                                                  const std::vector<SurveyResponse>& post) {
  const Section* section = post_in.section(kFeedbackSection);
  if (section == nullptr) fail(Errc::InstrumentMismatch, "the " + post_in.id + " survey has no module feedback section");
  for (const auto& r : post) validate(r, post_in);
  std::vector<FeedbackItem> out;
  for (const auto& q : section->questions) {
    if (q.kind != QuestionKind::Likert) continue;
    try {
      out.push_back({q.id, q.text, agreement_fraction(post_in, post, q.id), strong_agreement_fraction(post_in, post, q.id)});
    } catch (const Error& e) {
      if (e.code() != Errc::NoResponses) throw;
    }
  }
  if (out.empty()) fail(Errc::NoResponses, "no answers in the module feedback section");
  return out;
}

// --- reports ----------------------------------------------------------------

inline std::string pct(const Fraction& f) { return std::to_string(f.percent()) + "%"; }

inline Json comparison_to_json(const SurveyComparison& c) {
  Json qs = Json::array();
  for (const auto& q : c.questions)
    qs.push_back({{"question_id", q.question_id},
                  {"text", q.text},
                  {"pre", to_json(q.pre)},
                  {"post", to_json(q.post)},
                  {"delta", q.delta()},
                  {"delta_percent", q.delta_percent()}});
  return {{"n_pre", c.n_pre}, {"n_post", c.n_post}, {"questions", qs}, {"skipped", c.skipped}};
}

inline Json feedback_to_json(const std::vector<FeedbackItem>& items) {
  Json out = Json::array();
  for (const auto& f : items)
    out.push_back({{"question_id", f.question_id}, {"text", f.text}, {"agree", to_json(f.agree)},
                   {"strongly_agree", to_json(f.strongly_agree)}});
  return out;
}

namespace detail {

inline std::string table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  auto display_len = [](const std::string& s) {
    std::size_t n = 0;
    for (unsigned char ch : s) n += (ch & 0xC0) != 0x80;  // count UTF-8 code points
    return n;
  };
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], display_len(row[i]));
    }
  std::ostringstream out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(width[i] - display_len(row[i]) + 2, ' ');
    }
    out << line << "\n";
  }
  return out.str();
}

}  // namespace detail

inline std::string comparison_to_text(const SurveyComparison& c) {
  std::vector<std::vector<std::string>> rows{{"question", "agree (pre → post)", "pre", "post", "delta"}};
  for (const auto& q : c.questions) {
    const int d = q.delta_percent();
    rows.push_back({q.question_id, pct(q.pre) + " → " + pct(q.post),
                    std::to_string(q.pre.count) + "/" + std::to_string(q.pre.den),
                    std::to_string(q.post.count) + "/" + std::to_string(q.post.den),
                    (d > 0 ? "+" : "") + std::to_string(d)});
  }
  std::ostringstream out;
  out << "n_pre = " << c.n_pre << ", n_post = " << c.n_post << "\n" << detail::table(rows);
  return out.str();
}

inline std::string feedback_to_text(const std::vector<FeedbackItem>& items) {
  std::vector<std::vector<std::string>> rows{{"feedback question", "agree", "strongly agree"}};
  for (const auto& f : items)
    rows.push_back({f.question_id, pct(f.agree) + " (" + std::to_string(f.agree.count) + "/" + std::to_string(f.agree.den) + ")",
                    pct(f.strongly_agree) + " (" + std::to_string(f.strongly_agree.count) + "/" +
                        std::to_string(f.strongly_agree.den) + ")"});
  return detail::table(rows);
}

// Append-only response storage, one writer at a time per survey. With a
// directory, each accepted response is also appended to <dir>/<id>.ndjson.
class ResponseStore {
 public:
  ResponseStore(SurveyInstrument pre, SurveyInstrument post, std::optional<std::filesystem::path> dir = std::nullopt)
      : dir_(std::move(dir)) {
    slots_[0].instrument = std::move(pre);
    slots_[1].instrument = std::move(post);
    if (dir_) {
      std::error_code ec;
      std::filesystem::create_directories(*dir_, ec);
      if (ec) fail(Errc::IoError, "cannot create " + dir_->string());
    }
  }

  const SurveyInstrument& instrument(const std::string& id) const { return slot(id).instrument; }

  void append(const std::string& id, const Json& response) {
    Slot& s = slot(id);
    SurveyResponse r = response_from_json(response, s.instrument);
    std::lock_guard<std::mutex> lock(s.mu);
    if (dir_) {
      std::ofstream out(*dir_ / (id + ".ndjson"), std::ios::app);
      out << response_to_json(r).dump() << "\n";
      if (!out) fail(Errc::IoError, "cannot append to " + (*dir_ / (id + ".ndjson")).string());
    }
    s.responses.push_back(std::move(r));
  }

  std::vector<SurveyResponse> responses(const std::string& id) const {
    const Slot& s = slot(id);
    std::lock_guard<std::mutex> lock(s.mu);
    return s.responses;
  }

 private:
  struct Slot {
    SurveyInstrument instrument;
    std::vector<SurveyResponse> responses;
    mutable std::mutex mu;
  };

  Slot& slot(const std::string& id) { return const_cast<Slot&>(std::as_const(*this).slot(id)); }
  const Slot& slot(const std::string& id) const {
    if (id == "pre") return slots_[0];
    if (id == "post") return slots_[1];
    fail(Errc::ValidationError, "unknown survey '" + id + "'");
  }

  std::array<Slot, 2> slots_;
  std::optional<std::filesystem::path> dir_;
};

}  // namespace policy_arena::survey
