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

// Attack focus localization: the parts of a paper that the reviewer model
// reproduces in its own review are the parts worth perturbing. Both texts are
// split at the attack granularity, matched with an LCS, and the matched runs
// become modifiable spans of the clean content.

#ifndef PAPERATTACK_LOCALIZER_HPP
#define PAPERATTACK_LOCALIZER_HPP

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "paperattack/errors.hpp"
#include "paperattack/lcs.hpp"
#include "paperattack/segmenter.hpp"
#include "paperattack/utf8.hpp"

namespace paperattack {

struct ModifiableSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  Granularity granularity = Granularity::Word;
  MatchRun origin;

  friend bool operator==(const ModifiableSpan&, const ModifiableSpan&) = default;
};

struct ModifiableSpanSet {
  std::string paper_id;
  Granularity granularity = Granularity::Word;
  std::vector<ModifiableSpan> spans;

  std::size_t size() const { return spans.size(); }
  bool empty() const { return spans.empty(); }

  /// True when [start, end) lies inside a single span.
  bool covers(std::size_t start, std::size_t end) const {
    auto it = std::upper_bound(spans.begin(), spans.end(), start,
                               [](std::size_t s, const ModifiableSpan& m) { return s < m.start; });
    if (it == spans.begin()) return false;
    --it;
    return start >= it->start && end <= it->end;
  }

  friend bool operator==(const ModifiableSpanSet&, const ModifiableSpanSet&) = default;
};

inline constexpr std::size_t default_min_run(Granularity g) {
  return g == Granularity::Character ? 10 : 3;
}

/// Sorts spans and merges those that overlap or touch. A merged span keeps
/// the origin of its leftmost member.
inline std::vector<ModifiableSpan> merge_spans(std::vector<ModifiableSpan> spans) {
  std::sort(spans.begin(), spans.end(), [](const auto& x, const auto& y) {
    return x.start != y.start ? x.start < y.start : x.end < y.end;
  });
  std::vector<ModifiableSpan> out;
  for (auto& s : spans) {
    if (!out.empty() && s.start <= out.back().end) {
      out.back().end = std::max(out.back().end, s.end);
    } else {
      out.push_back(std::move(s));
    }
  }
  return out;
}

/// Replaces each span by the union of the sentences of x_clean it intersects.
inline ModifiableSpanSet extend_sentence_spans(const ModifiableSpanSet& set,
                                               std::u32string_view x_clean,
                                               const AbbreviationList& abbrev =
                                                   AbbreviationList::builtin()) {
  ModifiableSpanSet out{set.paper_id, Granularity::Sentence, {}};
  if (set.spans.empty()) return out;
  const auto sentences = split(x_clean, Granularity::Sentence, abbrev);
  for (const auto& span : set.spans) {
    // first sentence that ends after span.start
    auto it = std::upper_bound(sentences.begin(), sentences.end(), span.start,
                               [](std::size_t s, const Unit& u) { return s < u.end; });
    std::size_t lo = span.start;
    std::size_t hi = span.end;
    bool any = false;
    for (; it != sentences.end() && it->start < span.end; ++it) {
      if (!any) lo = std::min(lo, it->start);
      hi = std::max(hi, it->end);
      any = true;
    }
    out.spans.push_back(ModifiableSpan{lo, hi, Granularity::Sentence, span.origin});
  }
  out.spans = merge_spans(std::move(out.spans));
  return out;
}

inline ModifiableSpanSet extend_sentence_spans(const ModifiableSpanSet& set,
                                               std::string_view x_clean) {
  return extend_sentence_spans(set, std::u32string_view(utf8::decode(x_clean)));
}

namespace detail {

// Trims whitespace at the span edges, then widens it to whole words.
inline bool snap_to_words(std::u32string_view text, const std::vector<Unit>& words,
                          ModifiableSpan& span) {
  while (span.start < span.end && utf8::is_space(text[span.start])) ++span.start;
  while (span.end > span.start && utf8::is_space(text[span.end - 1])) --span.end;
  if (span.start >= span.end) return false;
  auto containing = [&](std::size_t off) -> const Unit* {
    auto it = std::upper_bound(words.begin(), words.end(), off,
                               [](std::size_t o, const Unit& u) { return o < u.start; });
    if (it == words.begin()) return nullptr;
    --it;
    return (off >= it->start && off < it->end) ? &*it : nullptr;
  };
  if (const Unit* w = containing(span.start)) span.start = w->start;
  if (const Unit* w = containing(span.end - 1)) span.end = w->end;
  return true;
}

}  // namespace detail

/// Spans of x_clean matched by the review at granularity g. Sentence
/// granularity matches words and then widens to full sentences.
inline ModifiableSpanSet localize(std::string_view x_clean, std::string_view review, Granularity g,
                                  std::size_t min_run, std::string paper_id = {},
                                  const AbbreviationList& abbrev = AbbreviationList::builtin()) {
  if (min_run == 0) throw Error("min_run must be at least 1");
  const auto clean = utf8::decode(x_clean);
  const auto rev = utf8::decode(review);
  if (detail::only_space(clean) || detail::only_space(rev)) {
    throw EmptyInput("localize requires non-empty paper and review text");
  }
  const Granularity match_g = (g == Granularity::Sentence) ? Granularity::Word : g;
  const auto a = split(std::u32string_view(clean), match_g, abbrev);
  const auto b = split(std::u32string_view(rev), match_g, abbrev);

  ModifiableSpanSet out{std::move(paper_id), g, {}};
  if (a.empty() || b.empty()) return out;

  std::vector<Unit> clean_words;
  if (g == Granularity::Character) clean_words = words_of(std::u32string_view(clean));

  for (const auto& run : lcs_runs(a, b)) {
    if (run.length < min_run) continue;
    ModifiableSpan span{run.a_start, run.a_end, match_g, run};
    if (g == Granularity::Character && !detail::snap_to_words(clean, clean_words, span)) continue;
    out.spans.push_back(span);
  }
  out.spans = merge_spans(std::move(out.spans));
  if (g == Granularity::Sentence) return extend_sentence_spans(out, clean, abbrev);
  return out;
}

inline nlohmann::json to_json(const MatchRun& r) {
  return {{"a_start", r.a_start}, {"a_end", r.a_end}, {"b_start", r.b_start},
          {"b_end", r.b_end},     {"length", r.length}, {"a_unit", r.a_unit},
          {"b_unit", r.b_unit}};
}

inline nlohmann::json to_json(const ModifiableSpanSet& s) {
  auto spans = nlohmann::json::array();
  for (const auto& m : s.spans) {
    spans.push_back({{"start", m.start}, {"end", m.end}, {"origin", to_json(m.origin)}});
  }
  return {{"paper_id", s.paper_id},
          {"granularity", std::string(granularity_name(s.granularity))},
          {"spans", spans}};
}

inline ModifiableSpanSet span_set_from_json(const nlohmann::json& j) {
  ModifiableSpanSet s;
  s.paper_id = j.at("paper_id").get<std::string>();
  s.granularity = parse_granularity(j.at("granularity").get<std::string>());
  for (const auto& m : j.at("spans")) {
    ModifiableSpan span;
    span.start = m.at("start").get<std::size_t>();
    span.end = m.at("end").get<std::size_t>();
    span.granularity = s.granularity;
    if (m.contains("origin")) {
      const auto& o = m.at("origin");
      span.origin = MatchRun{o.value("a_start", span.start), o.value("a_end", span.end),
                             o.value("b_start", std::size_t{0}), o.value("b_end", std::size_t{0}),
                             o.value("length", std::size_t{0}), o.value("a_unit", std::size_t{0}),
                             o.value("b_unit", std::size_t{0})};
    }
    if (span.start >= span.end) throw Error("span set contains an empty span");
    s.spans.push_back(span);
  }
  return s;
}

}  // namespace paperattack

#endif  // PAPERATTACK_LOCALIZER_HPP
