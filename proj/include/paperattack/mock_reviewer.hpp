// Copyright 2026 The paperattack Authors.
//
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

// Deterministic stand-in for an LLM reviewer.
//
// Scores start from per-aspect base values and move by `delta` for every
// occurrence of a trigger word in the document (whole-word, case-insensitive),
// then clamp to [1, 10]. The review lists one canned sentence per tag and
// quotes, tagged NONE, every document sentence that contains a focus word, so
// localization against the mock's review recovers exactly those sentences.

#ifndef PAPERATTACK_MOCK_REVIEWER_HPP
#define PAPERATTACK_MOCK_REVIEWER_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "paperattack/aspects.hpp"
#include "paperattack/errors.hpp"
#include "paperattack/review_format.hpp"
#include "paperattack/segmenter.hpp"
#include "paperattack/utf8.hpp"

namespace paperattack {

struct TagEffect {
  AspectTag tag = AspectTag::None;
  bool add = true;  // false: each hit removes one instance of `tag`

  friend bool operator==(const TagEffect&, const TagEffect&) = default;
};

struct Trigger {
  std::string word;  // stored lower-cased
  ScoreAspect aspect = ScoreAspect::Overall;
  int delta = 0;
  std::optional<TagEffect> tag_effect;

  friend bool operator==(const Trigger&, const Trigger&) = default;
};

struct SensitivityProfile {
  std::array<int, kScoreAspectCount> base{5, 5, 5, 5, 5, 5, 5, 5};
  std::vector<Trigger> triggers;
  std::vector<AspectTag> tags{AspectTag::Summary, AspectTag::SubstancePositive,
                              AspectTag::SoundnessNegative, AspectTag::ClarityNegative};
  std::vector<std::string> focus;  // lower-cased

  friend bool operator==(const SensitivityProfile&, const SensitivityProfile&) = default;
};

inline std::optional<TagEffect> parse_tag_effect(const std::string& s) {
  if (s.empty()) return std::nullopt;
  TagEffect e;
  std::string body = s;
  if (body.front() == '+' || body.front() == '-') {
    e.add = body.front() == '+';
    body.erase(0, 1);
  }
  auto tag = parse_tag(body);
  if (!tag) throw Error("unknown tag in tag_effect: " + s);
  e.tag = *tag;
  return e;
}

inline SensitivityProfile profile_from_json(const nlohmann::json& j) {
  SensitivityProfile p;
  if (j.contains("base")) {
    for (const auto& [k, v] : j.at("base").items()) {
      auto a = parse_aspect(k);
      if (!a) throw Error("unknown aspect in profile base: " + k);
      p.base[static_cast<std::size_t>(*a)] = v.get<int>();
    }
  }
  if (j.contains("triggers")) {
    for (const auto& t : j.at("triggers")) {
      Trigger tr;
      tr.word = utf8::lower(t.at("word").get<std::string>());
      auto a = parse_aspect(t.at("aspect").get<std::string>());
      if (!a) throw Error("unknown aspect in trigger: " + t.at("aspect").get<std::string>());
      tr.aspect = *a;
      tr.delta = t.value("delta", 0);
      if (t.contains("tag_effect") && t.at("tag_effect").is_string()) {
        tr.tag_effect = parse_tag_effect(t.at("tag_effect").get<std::string>());
      }
      p.triggers.push_back(std::move(tr));
    }
  }
  if (j.contains("tags")) {
    p.tags.clear();
    for (const auto& t : j.at("tags")) {
      auto tag = parse_tag(t.get<std::string>());
      if (!tag) throw Error("unknown tag in profile: " + t.get<std::string>());
      p.tags.push_back(*tag);
    }
  }
  if (j.contains("focus")) {
    for (const auto& f : j.at("focus")) p.focus.push_back(utf8::lower(f.get<std::string>()));
  }
  return p;
}

inline nlohmann::json to_json(const SensitivityProfile& p) {
  nlohmann::json base = nlohmann::json::object();
  for (auto a : kAllScoreAspects) base[aspect_name(a)] = p.base[static_cast<std::size_t>(a)];
  auto triggers = nlohmann::json::array();
  for (const auto& t : p.triggers) {
    nlohmann::json jt{{"word", t.word}, {"aspect", aspect_name(t.aspect)}, {"delta", t.delta}};
    if (t.tag_effect) {
      jt["tag_effect"] = std::string(t.tag_effect->add ? "+" : "-") + tag_name(t.tag_effect->tag);
    } else {
      jt["tag_effect"] = nullptr;
    }
    triggers.push_back(std::move(jt));
  }
  auto tags = nlohmann::json::array();
  for (auto t : p.tags) tags.push_back(tag_name(t));
  return {{"base", base}, {"triggers", triggers}, {"tags", tags}, {"focus", p.focus}};
}

inline SensitivityProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  return profile_from_json(nlohmann::json::parse(in));
}

namespace detail {

inline std::string canned_sentence(AspectTag t) {
  switch (t) {
    case AspectTag::None:
      return "No further remarks.";
    case AspectTag::Summary:
      return "Summary remark from the mock reviewer.";
    default:
      break;
  }
  std::string label(tag_label(t));
  const auto sp = label.rfind(' ');
  std::string aspect = utf8::lower(label.substr(0, sp));
  aspect[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(aspect[0])));
  return aspect + (is_positive(t) ? " remark, favourable." : " remark, unfavourable.");
}

}  // namespace detail

/// Pure function of (text, profile).
inline ReviewResult mock_review(std::string_view paper_text, const SensitivityProfile& profile) {
  const auto text = utf8::decode(paper_text);
  std::map<std::string, int> counts;
  for (const auto& w : words_of(std::u32string_view(text))) ++counts[utf8::lower(w.text)];

  ReviewResult r;
  auto scores = profile.base;
  std::vector<AspectTag> tags = profile.tags;
  for (const auto& t : profile.triggers) {
    auto it = counts.find(t.word);
    const int hits = it == counts.end() ? 0 : it->second;
    if (hits == 0) continue;
    scores[static_cast<std::size_t>(t.aspect)] += t.delta * hits;
    if (t.tag_effect) {
      for (int h = 0; h < hits; ++h) {
        if (t.tag_effect->add) {
          tags.push_back(t.tag_effect->tag);
        } else {
          auto pos = std::find(tags.begin(), tags.end(), t.tag_effect->tag);
          if (pos != tags.end()) tags.erase(pos);
        }
      }
    }
  }
  for (std::size_t k = 0; k < kScoreAspectCount; ++k) {
    r.scores.scores[k] = std::clamp(scores[k], kMinScore, kMaxScore);
    r.scores.explanations[k] =
        "Mock assessment of " + utf8::lower(aspect_label(kAllScoreAspects[k])) + ".";
  }
  for (auto t : tags) r.tagged_sentences.push_back(TaggedSentence{t, detail::canned_sentence(t)});

  if (!profile.focus.empty() && !detail::only_space(text)) {
    const std::set<std::string> focus(profile.focus.begin(), profile.focus.end());
    for (const auto& s : split(std::u32string_view(text), Granularity::Sentence)) {
      bool quoted = false;
      for (const auto& w : words_of(std::string_view(s.text))) {
        if (focus.count(utf8::lower(w.text))) {
          quoted = true;
          break;
        }
      }
      if (quoted) r.tagged_sentences.push_back(TaggedSentence{AspectTag::None, s.text});
    }
  }
  if (r.tagged_sentences.empty()) {
    r.tagged_sentences.push_back(TaggedSentence{AspectTag::None, "No remarks."});
  }
  r.raw = render_response(r);
  return r;
}

}  // namespace paperattack

#endif  // PAPERATTACK_MOCK_REVIEWER_HPP
