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

// Structured reviewer output:
//
//   1. REVIEW: [SUMMARY] ... [CLARITY POSITIVE] ...
//   2. REVIEW SCORE: OVERALL: 7, SUBSTANCE: 8, ..., IMPACT: 7
//   3. REVIEW SCORE EXPLANATION: OVERALL: ..., SUBSTANCE: ..., ...
//
// The lenient parser accepts case drift, underscores in labels, markdown
// emphasis, newline separators, "7.0" and "7/10"; it never guesses a score.
// Unknown or repeated score labels, missing aspects, non-integral or
// out-of-range values are all parse failures.

#ifndef PAPERATTACK_REVIEW_FORMAT_HPP
#define PAPERATTACK_REVIEW_FORMAT_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "paperattack/aspects.hpp"
#include "paperattack/errors.hpp"
#include "paperattack/segmenter.hpp"

namespace paperattack {

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 10;

struct AspectScores {
  std::array<int, kScoreAspectCount> scores{};
  std::array<std::string, kScoreAspectCount> explanations{};

  int& operator[](ScoreAspect a) { return scores[static_cast<std::size_t>(a)]; }
  int operator[](ScoreAspect a) const { return scores[static_cast<std::size_t>(a)]; }
  std::string& explanation(ScoreAspect a) { return explanations[static_cast<std::size_t>(a)]; }
  const std::string& explanation(ScoreAspect a) const {
    return explanations[static_cast<std::size_t>(a)];
  }

  bool valid() const {
    for (int s : scores) {
      if (s < kMinScore || s > kMaxScore) return false;
    }
    return true;
  }

  static AspectScores uniform(int v) {
    AspectScores s;
    s.scores.fill(v);
    return s;
  }

  friend bool operator==(const AspectScores&, const AspectScores&) = default;
};

/// Sum over the eight aspects, in [8, 80] for valid scores.
inline int total_score(const AspectScores& s) {
  int total = 0;
  for (int v : s.scores) total += v;
  return total;
}

struct TaggedSentence {
  AspectTag tag = AspectTag::None;
  std::string text;

  friend bool operator==(const TaggedSentence&, const TaggedSentence&) = default;
};

struct ReviewResult {
  std::vector<TaggedSentence> tagged_sentences;
  AspectScores scores;
  std::string raw;
  std::size_t queries_consumed = 0;
  /// False when the output carried no tags and sentences were tagged NONE.
  bool has_tags = true;

  std::vector<AspectTag> tags() const {
    std::vector<AspectTag> out;
    out.reserve(tagged_sentences.size());
    for (const auto& s : tagged_sentences) out.push_back(s.tag);
    return out;
  }

  /// Review body without tags.
  std::string text() const {
    std::string out;
    for (const auto& s : tagged_sentences) {
      if (!out.empty()) out += ' ';
      out += s.text;
    }
    return out;
  }

  friend bool operator==(const ReviewResult&, const ReviewResult&) = default;
};

struct ParseOptions {
  bool strict = false;
  /// When false, untagged review text is accepted and tagged NONE.
  bool require_tags = true;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string excerpt(std::string_view s, std::size_t pos, std::size_t len = 40) {
  if (pos > s.size()) pos = s.size();
  return std::string(s.substr(pos, len));
}

// Drops a trailing list number such as "2." left before the next header.
inline std::string strip_list_number(std::string s) {
  static const std::regex trailing(R"((^|[.,;!?)\]]|\n)[ \t]*\d+\s*[.)]\s*$)");
  std::smatch m;
  if (std::regex_search(s, m, trailing)) {
    s.erase(static_cast<std::size_t>(m.position(0) + m.length(1)));
  }
  return trim(s);
}

inline std::optional<int> parse_score_value(std::string v, bool strict) {
  v = trim(v);
  if (strict) {
    static const std::regex int_re(R"(\d{1,2})");
    if (!std::regex_match(v, int_re)) return std::nullopt;
    return std::stoi(v);
  }
  static const std::regex lenient_re(R"(^([+-]?\d+(?:\.\d+)?)\s*(?:/\s*10)?\s*\.?$)");
  std::smatch m;
  if (!std::regex_match(v, m, lenient_re)) return std::nullopt;
  const double d = std::stod(m[1].str());
  if (d != std::floor(d)) return std::nullopt;
  if (d < -1000 || d > 1000) return std::nullopt;
  return static_cast<int>(d);
}

inline std::string label_pattern(std::string_view label) {
  std::string out;
  for (char c : label) {
    if (c == ' ') {
      out += "[ _]+";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

inline std::vector<TaggedSentence> parse_tagged(const std::string& region, bool strict,
                                                std::size_t region_offset,
                                                const std::string& raw) {
  static const std::regex bracket(R"(\[\s*([A-Za-z][A-Za-z _-]*?)\s*\])");
  std::vector<TaggedSentence> out;
  std::optional<AspectTag> current;
  std::size_t text_begin = 0;
  auto flush = [&](std::size_t end) {
    if (!current) {
      if (strict && !trim(std::string_view(region).substr(0, end)).empty()) {
        throw ParseFailure("text before the first tag", excerpt(raw, region_offset), raw);
      }
      return;
    }
    auto text = trim(std::string_view(region).substr(text_begin, end - text_begin));
    if (text.empty()) {
      if (strict) throw ParseFailure("empty tagged sentence", excerpt(raw, region_offset + end), raw);
      return;
    }
    out.push_back(TaggedSentence{*current, std::move(text)});
  };
  for (auto it = std::sregex_iterator(region.begin(), region.end(), bracket);
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    auto tag = parse_tag(m[1].str());
    if (!tag) {
      if (strict) {
        throw ParseFailure("unknown tag [" + m[1].str() + "]",
                           excerpt(raw, region_offset + static_cast<std::size_t>(m.position(0))),
                           raw);
      }
      continue;
    }
    const auto pos = static_cast<std::size_t>(m.position(0));
    flush(pos);
    current = tag;
    text_begin = pos + static_cast<std::size_t>(m.length(0));
  }
  flush(region.size());
  return out;
}

}  // namespace detail

/// Parses raw reviewer output; throws ParseFailure with the first
/// unparseable region.
inline ReviewResult parse_response(const std::string& raw_in, const ParseOptions& opt = {}) {
  if (detail::trim(raw_in).empty()) throw ParseFailure("empty response", "", raw_in);
  std::string raw = raw_in;
  if (!opt.strict) {
    std::erase(raw, '*');
    std::erase(raw, '#');
  }
  const auto flags = opt.strict ? std::regex::ECMAScript : (std::regex::ECMAScript | std::regex::icase);
  const std::regex review_hdr(opt.strict ? R"(1\. REVIEW:)" : R"(REVIEW[ _]*:)", flags);
  const std::regex score_hdr(opt.strict ? R"(2\. REVIEW SCORE:)" : R"(REVIEW[ _]*SCORES?[ _]*:)", flags);
  const std::regex expl_hdr(opt.strict ? R"(3\. REVIEW SCORE EXPLANATION:)"
                                       : R"(REVIEW[ _]*SCORES?[ _]*EXPLANATIONS?[ _]*:)",
                            flags);

  std::smatch m_score;
  if (!std::regex_search(raw, m_score, score_hdr)) {
    throw ParseFailure("missing REVIEW SCORE block", detail::excerpt(raw, 0), raw_in);
  }
  const auto score_hdr_pos = static_cast<std::size_t>(m_score.position(0));
  const auto score_begin = score_hdr_pos + static_cast<std::size_t>(m_score.length(0));

  // review body
  std::size_t review_begin = 0;
  {
    std::smatch m;
    const std::string head = raw.substr(0, score_hdr_pos);
    if (std::regex_search(head, m, review_hdr)) {
      review_begin = static_cast<std::size_t>(m.position(0) + m.length(0));
    } else if (opt.strict) {
      throw ParseFailure("missing REVIEW block", detail::excerpt(raw, 0), raw_in);
    }
  }
  std::string review_region = raw.substr(review_begin, score_hdr_pos - review_begin);
  if (opt.strict) {
    review_region = detail::trim(review_region);
  } else {
    review_region = detail::strip_list_number(review_region);
  }

  ReviewResult r;
  r.raw = raw_in;
  r.tagged_sentences = detail::parse_tagged(review_region, opt.strict, review_begin, raw_in);
  if (r.tagged_sentences.empty()) {
    if (opt.require_tags || detail::trim(review_region).empty()) {
      throw ParseFailure("no tagged review sentences", detail::excerpt(raw, review_begin), raw_in);
    }
    r.has_tags = false;
    for (auto& u : split(review_region, Granularity::Sentence)) {
      r.tagged_sentences.push_back(TaggedSentence{AspectTag::None, u.text});
    }
  }

  // score block
  std::smatch m_expl;
  const std::string after_score = raw.substr(score_begin);
  std::size_t score_end = raw.size();
  std::optional<std::size_t> expl_begin;
  if (std::regex_search(after_score, m_expl, expl_hdr)) {
    score_end = score_begin + static_cast<std::size_t>(m_expl.position(0));
    expl_begin = score_end + static_cast<std::size_t>(m_expl.length(0));
  } else if (opt.strict) {
    throw ParseFailure("missing REVIEW SCORE EXPLANATION block", detail::excerpt(raw, score_begin),
                       raw_in);
  }
  std::string score_region = raw.substr(score_begin, score_end - score_begin);
  score_region = opt.strict ? detail::trim(score_region) : detail::strip_list_number(score_region);
  if (opt.strict && !score_region.empty() && score_region.back() == '.') score_region.pop_back();

  std::array<bool, kScoreAspectCount> seen{};
  {
    const std::string sep = opt.strict ? ", " : "";
    std::size_t pos = 0;
    std::size_t count = 0;
    while (pos < score_region.size()) {
      std::size_t next;
      if (opt.strict) {
        next = score_region.find(", ", pos);
      } else {
        next = score_region.find_first_of(",;\n", pos);
      }
      if (next == std::string::npos) next = score_region.size();
      const std::string item = score_region.substr(pos, next - pos);
      const auto region_pos = score_begin + pos;
      pos = next + (opt.strict ? 2 : 1);
      if (detail::trim(item).empty()) {
        if (opt.strict) throw ParseFailure("empty score entry", detail::excerpt(raw, region_pos), raw_in);
        continue;
      }
      const auto colon = item.rfind(':');
      if (colon == std::string::npos) {
        throw ParseFailure("score entry without ':'", detail::excerpt(raw, region_pos), raw_in);
      }
      const std::string label = detail::trim(std::string_view(item).substr(0, colon));
      std::optional<ScoreAspect> aspect;
      if (opt.strict) {
        for (auto a : kAllScoreAspects) {
          if (aspect_label(a) == label) aspect = a;
        }
      } else {
        aspect = parse_aspect(label);
      }
      if (!aspect) {
        throw ParseFailure("unknown score aspect '" + label + "'", detail::excerpt(raw, region_pos),
                           raw_in);
      }
      const auto idx = static_cast<std::size_t>(*aspect);
      if (seen[idx]) {
        throw ParseFailure("duplicate score aspect '" + label + "'", detail::excerpt(raw, region_pos),
                           raw_in);
      }
      if (opt.strict && static_cast<std::size_t>(*aspect) != count) {
        throw ParseFailure("score aspects out of order", detail::excerpt(raw, region_pos), raw_in);
      }
      auto value = detail::parse_score_value(item.substr(colon + 1), opt.strict);
      if (!value) {
        throw ParseFailure("non-integer score for " + label, detail::excerpt(raw, region_pos), raw_in);
      }
      if (*value < kMinScore || *value > kMaxScore) {
        throw ParseFailure("score out of range [1,10] for " + label,
                           detail::excerpt(raw, region_pos), raw_in);
      }
      seen[idx] = true;
      r.scores.scores[idx] = *value;
      ++count;
    }
    for (auto a : kAllScoreAspects) {
      if (!seen[static_cast<std::size_t>(a)]) {
        throw ParseFailure("missing score for " + std::string(aspect_label(a)),
                           detail::excerpt(raw, score_begin), raw_in);
      }
    }
  }

  // explanations, located label by label in the fixed aspect order
  if (expl_begin) {
    const std::string region = raw.substr(*expl_begin);
    std::vector<std::pair<std::size_t, std::size_t>> found(kScoreAspectCount, {std::string::npos, 0});
    std::size_t pos = 0;
    for (auto a : kAllScoreAspects) {
      const std::regex label_re("(^|[\\s,;.])" + detail::label_pattern(aspect_label(a)) + "\\s*:",
                                flags);
      std::smatch m;
      const std::string rest = region.substr(pos);
      if (!std::regex_search(rest, m, label_re)) {
        if (opt.strict) {
          throw ParseFailure("missing explanation for " + std::string(aspect_label(a)),
                             detail::excerpt(raw, *expl_begin + pos), raw_in);
        }
        continue;
      }
      const auto start = pos + static_cast<std::size_t>(m.position(0) + m.length(1));
      const auto text_start = pos + static_cast<std::size_t>(m.position(0) + m.length(0));
      found[static_cast<std::size_t>(a)] = {start, text_start};
      pos = text_start;
    }
    for (std::size_t k = 0; k < kScoreAspectCount; ++k) {
      if (found[k].first == std::string::npos) continue;
      std::size_t end = region.size();
      for (std::size_t q = k + 1; q < kScoreAspectCount; ++q) {
        if (found[q].first != std::string::npos) {
          end = found[q].first;
          break;
        }
      }
      auto text = detail::trim(std::string_view(region).substr(found[k].second, end - found[k].second));
      while (!text.empty() && (text.back() == ',' || text.back() == ';')) text.pop_back();
      if (k + 1 == kScoreAspectCount && !text.empty() && text.back() == '.') {
        text.pop_back();
      }
      r.scores.explanations[k] = detail::trim(text);
    }
  }
  return r;
}

/// Canonical rendering; parse_response(render_response(r)) reproduces the
/// tags, scores and explanations of r.
inline std::string render_response(const ReviewResult& r) {
  std::string out = "1. REVIEW:";
  for (const auto& s : r.tagged_sentences) {
    out += " [";
    out += tag_label(s.tag);
    out += "] ";
    out += s.text;
  }
  out += "\n2. REVIEW SCORE: ";
  for (std::size_t k = 0; k < kScoreAspectCount; ++k) {
    if (k) out += ", ";
    out += aspect_label(kAllScoreAspects[k]);
    out += ": ";
    out += std::to_string(r.scores.scores[k]);
  }
  out += ".\n3. REVIEW SCORE EXPLANATION: ";
  for (std::size_t k = 0; k < kScoreAspectCount; ++k) {
    if (k) out += ", ";
    out += aspect_label(kAllScoreAspects[k]);
    out += ": ";
    out += r.scores.explanations[k];
  }
  out += ".";
  return out;
}

inline nlohmann::json to_json(const AspectScores& s) {
  nlohmann::json scores = nlohmann::json::object();
  nlohmann::json expl = nlohmann::json::object();
  for (auto a : kAllScoreAspects) {
    scores[aspect_name(a)] = s[a];
    expl[aspect_name(a)] = s.explanation(a);
  }
  return {{"scores", scores}, {"explanations", expl}, {"total", total_score(s)}};
}

inline AspectScores aspect_scores_from_json(const nlohmann::json& j) {
  AspectScores s;
  for (auto a : kAllScoreAspects) {
    s[a] = j.at("scores").at(aspect_name(a)).get<int>();
    if (j.contains("explanations")) s.explanation(a) = j.at("explanations").value(aspect_name(a), "");
  }
  return s;
}

inline nlohmann::json to_json(const ReviewResult& r) {
  auto sentences = nlohmann::json::array();
  for (const auto& s : r.tagged_sentences) sentences.push_back({{"tag", tag_name(s.tag)}, {"text", s.text}});
  return {{"tagged_sentences", sentences}, {"scores", to_json(r.scores)},
          {"raw", r.raw},                  {"queries_consumed", r.queries_consumed},
          {"has_tags", r.has_tags}};
}

inline ReviewResult review_result_from_json(const nlohmann::json& j) {
  ReviewResult r;
  for (const auto& s : j.at("tagged_sentences")) {
    auto tag = parse_tag(s.at("tag").get<std::string>());
    if (!tag) throw Error("unknown tag in review artifact: " + s.at("tag").get<std::string>());
    r.tagged_sentences.push_back(TaggedSentence{*tag, s.at("text").get<std::string>()});
  }
  r.scores = aspect_scores_from_json(j.at("scores"));
  r.raw = j.value("raw", "");
  r.queries_consumed = j.value("queries_consumed", std::size_t{0});
  r.has_tags = j.value("has_tags", true);
  return r;
}

}  // namespace paperattack

#endif  // PAPERATTACK_REVIEW_FORMAT_HPP
