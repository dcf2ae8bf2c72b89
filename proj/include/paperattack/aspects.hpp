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

#ifndef PAPERATTACK_ASPECTS_HPP
#define PAPERATTACK_ASPECTS_HPP

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace paperattack {

/// Sentence-level review tags. Declaration order is the order the tags are
/// listed to the model.
enum class AspectTag {
  None,
  Summary,
  MotivationPositive,
  MotivationNegative,
  SubstancePositive,
  SubstanceNegative,
  OriginalityPositive,
  OriginalityNegative,
  SoundnessPositive,
  SoundnessNegative,
  ClarityPositive,
  ClarityNegative,
  ReplicabilityPositive,
  ReplicabilityNegative,
  MeaningfulComparisonPositive,
  MeaningfulComparisonNegative,
};

inline constexpr std::size_t kAspectTagCount = 16;

inline constexpr std::array<AspectTag, kAspectTagCount> kAllAspectTags = {
    AspectTag::None,
    AspectTag::Summary,
    AspectTag::MotivationPositive,
    AspectTag::MotivationNegative,
    AspectTag::SubstancePositive,
    AspectTag::SubstanceNegative,
    AspectTag::OriginalityPositive,
    AspectTag::OriginalityNegative,
    AspectTag::SoundnessPositive,
    AspectTag::SoundnessNegative,
    AspectTag::ClarityPositive,
    AspectTag::ClarityNegative,
    AspectTag::ReplicabilityPositive,
    AspectTag::ReplicabilityNegative,
    AspectTag::MeaningfulComparisonPositive,
    AspectTag::MeaningfulComparisonNegative,
};

/// Name as written inside brackets in model output, e.g. "CLARITY POSITIVE".
inline constexpr std::string_view tag_label(AspectTag t) {
  constexpr std::array<std::string_view, kAspectTagCount> names = {
      "NONE",
      "SUMMARY",
      "MOTIVATION POSITIVE",
      "MOTIVATION NEGATIVE",
      "SUBSTANCE POSITIVE",
      "SUBSTANCE NEGATIVE",
      "ORIGINALITY POSITIVE",
      "ORIGINALITY NEGATIVE",
      "SOUNDNESS POSITIVE",
      "SOUNDNESS NEGATIVE",
      "CLARITY POSITIVE",
      "CLARITY NEGATIVE",
      "REPLICABILITY POSITIVE",
      "REPLICABILITY NEGATIVE",
      "MEANINGFUL COMPARISON POSITIVE",
      "MEANINGFUL COMPARISON NEGATIVE",
  };
  return names[static_cast<std::size_t>(t)];
}

/// Identifier form used in JSON artifacts, e.g. "CLARITY_POSITIVE".
inline std::string tag_name(AspectTag t) {
  std::string s(tag_label(t));
  for (auto& c : s) {
    if (c == ' ') c = '_';
  }
  return s;
}

/// Collapses case, underscores and runs of whitespace so that
/// "meaningful_comparison  Positive" and "MEANINGFUL COMPARISON POSITIVE"
/// compare equal.
inline std::string normalize_label(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (c == '_' || c == '-' || std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

inline std::optional<AspectTag> parse_tag(std::string_view s) {
  const auto norm = normalize_label(s);
  for (auto t : kAllAspectTags) {
    if (tag_label(t) == norm) return t;
  }
  return std::nullopt;
}

inline bool is_positive(AspectTag t) {
  const auto label = tag_label(t);
  return label.size() > 9 && label.substr(label.size() - 9) == " POSITIVE";
}

inline bool is_negative(AspectTag t) {
  const auto label = tag_label(t);
  return label.size() > 9 && label.substr(label.size() - 9) == " NEGATIVE";
}

/// The eight scored aspects, in the order the model is asked to emit them.
enum class ScoreAspect {
  Overall,
  Substance,
  Appropriateness,
  MeaningfulComparison,
  SoundnessCorrectness,
  Originality,
  Clarity,
  Impact,
};

inline constexpr std::size_t kScoreAspectCount = 8;

inline constexpr std::array<ScoreAspect, kScoreAspectCount> kAllScoreAspects = {
    ScoreAspect::Overall,
    ScoreAspect::Substance,
    ScoreAspect::Appropriateness,
    ScoreAspect::MeaningfulComparison,
    ScoreAspect::SoundnessCorrectness,
    ScoreAspect::Originality,
    ScoreAspect::Clarity,
    ScoreAspect::Impact,
};

inline constexpr std::string_view aspect_label(ScoreAspect a) {
  constexpr std::array<std::string_view, kScoreAspectCount> names = {
      "OVERALL",     "SUBSTANCE",   "APPROPRIATENESS", "MEANINGFUL COMPARISON",
      "SOUNDNESS CORRECTNESS", "ORIGINALITY", "CLARITY", "IMPACT",
  };
  return names[static_cast<std::size_t>(a)];
}

inline std::string aspect_name(ScoreAspect a) {
  std::string s(aspect_label(a));
  for (auto& c : s) {
    if (c == ' ') c = '_';
  }
  return s;
}

inline std::optional<ScoreAspect> parse_aspect(std::string_view s) {
  const auto norm = normalize_label(s);
  for (auto a : kAllScoreAspects) {
    if (aspect_label(a) == norm) return a;
  }
  return std::nullopt;
}

}  // namespace paperattack

#endif  // PAPERATTACK_ASPECTS_HPP
