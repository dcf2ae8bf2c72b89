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

// Character, word and sentence segmentation with exact scalar offsets.
//
// Word: a maximal run of alphanumeric scalars; a hyphen or apostrophe is
// part of the word only when both neighbours are alphanumeric.
//
// Sentence: a terminator run ('.', '!', '?', U+2026) plus trailing closing
// quotes/brackets ends a sentence when it is followed by whitespace and then
// an uppercase letter (optionally behind an opening quote/bracket) or the end
// of text. A line break always ends a sentence. A single '.' does not end a
// sentence when the text before it matches an abbreviation stoplist entry.

#ifndef PAPERATTACK_SEGMENTER_HPP
#define PAPERATTACK_SEGMENTER_HPP

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "paperattack/errors.hpp"
#include "paperattack/utf8.hpp"

namespace paperattack {

enum class Granularity { Character, Word, Sentence };

inline std::string_view granularity_name(Granularity g) {
  switch (g) {
    case Granularity::Character:
      return "character";
    case Granularity::Word:
      return "word";
    case Granularity::Sentence:
      return "sentence";
  }
  return "word";
}

inline Granularity parse_granularity(std::string_view s) {
  if (s == "character" || s == "char") return Granularity::Character;
  if (s == "word") return Granularity::Word;
  if (s == "sentence") return Granularity::Sentence;
  throw Error("unknown granularity: " + std::string(s));
}

/// A segment of a source text. start/end are scalar indices, end exclusive.
struct Unit {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  friend bool operator==(const Unit&, const Unit&) = default;
};

inline constexpr std::string_view kDefaultAbbreviations =
    "e.g.\n"
    "i.e.\n"
    "et al.\n"
    "fig.\n"
    "figs.\n"
    "eq.\n"
    "eqs.\n"
    "eqn.\n"
    "sec.\n"
    "secs.\n"
    "tab.\n"
    "ref.\n"
    "refs.\n"
    "vs.\n"
    "cf.\n"
    "approx.\n"
    "resp.\n"
    "dr.\n"
    "mr.\n"
    "mrs.\n"
    "ms.\n"
    "prof.\n"
    "vol.\n"
    "pp.\n"
    "ch.\n"
    "alg.\n"
    "thm.\n"
    "def.\n"
    "app.\n"
    "appx.\n"
    "viz.\n"
    "ca.\n"
    "jr.\n"
    "st.\n"
    "inc.\n"
    "ltd.\n";

class AbbreviationList {
 public:
  AbbreviationList() = default;

  /// One entry per line; blank lines and lines starting with '#' are skipped.
  static AbbreviationList parse(std::string_view contents) {
    AbbreviationList list;
    std::size_t pos = 0;
    while (pos <= contents.size()) {
      auto nl = contents.find('\n', pos);
      if (nl == std::string_view::npos) nl = contents.size();
      auto line = contents.substr(pos, nl - pos);
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
        line.remove_suffix(1);
      }
      while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
      if (!line.empty() && line.front() != '#') list.entries_.push_back(utf8::fold(utf8::decode(line)));
      pos = nl + 1;
    }
    return list;
  }

  static AbbreviationList load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  static const AbbreviationList& builtin() {
    static const AbbreviationList list = parse(kDefaultAbbreviations);
    return list;
  }

  /// True when s[0..dot] (dot inclusive) ends with an entry that starts at a
  /// word boundary.
  bool matches_before(std::u32string_view s, std::size_t dot) const {
    for (const auto& e : entries_) {
      if (e.size() > dot + 1) continue;
      const std::size_t begin = dot + 1 - e.size();
      if (begin > 0 && utf8::is_alnum(s[begin - 1])) continue;
      bool eq = true;
      for (std::size_t k = 0; k < e.size(); ++k) {
        if (utf8::to_lower(s[begin + k]) != e[k]) {
          eq = false;
          break;
        }
      }
      if (eq) return true;
    }
    return false;
  }

  const std::vector<std::u32string>& entries() const { return entries_; }

 private:
  std::vector<std::u32string> entries_;
};

namespace detail {

inline bool is_connector(char32_t c) {
  return c == U'-' || c == U'\'' || c == 0x2019 || c == 0x2010 || c == 0x2011;
}

inline bool is_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?' || c == 0x2026; }

inline bool is_closer(char32_t c) {
  return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == 0x201D || c == 0x2019;
}

inline bool is_opener(char32_t c) {
  return c == U'"' || c == U'\'' || c == U'(' || c == U'[' || c == 0x201C || c == 0x2018;
}

inline Unit make_unit(std::u32string_view s, std::size_t b, std::size_t e) {
  return Unit{utf8::encode(s.substr(b, e - b)), b, e};
}

inline bool only_space(std::u32string_view s) {
  return std::all_of(s.begin(), s.end(), [](char32_t c) { return utf8::is_space(c); });
}

inline std::vector<Unit> split_chars(std::u32string_view s) {
  std::vector<Unit> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back(make_unit(s, i, i + 1));
  return out;
}

inline std::vector<Unit> split_words(std::u32string_view s) {
  std::vector<Unit> out;
  const auto n = s.size();
  std::size_t i = 0;
  while (i < n) {
    if (!utf8::is_alnum(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n) {
      if (utf8::is_alnum(s[j])) {
        ++j;
      } else if (is_connector(s[j]) && j + 1 < n && utf8::is_alnum(s[j + 1])) {
        j += 2;
      } else {
        break;
      }
    }
    out.push_back(make_unit(s, i, j));
    i = j;
  }
  return out;
}

inline std::vector<Unit> split_sentences(std::u32string_view s, const AbbreviationList& abbrev) {
  std::vector<Unit> out;
  const auto n = s.size();
  constexpr auto kNone = static_cast<std::size_t>(-1);
  std::size_t start = kNone;

  auto emit_trimmed = [&](std::size_t end) {
    while (end > start && utf8::is_space(s[end - 1])) --end;
    if (end > start) out.push_back(make_unit(s, start, end));
    start = kNone;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = s[i];
    if (c == U'\n' || c == 0x2029) {
      if (start != kNone) emit_trimmed(i);
      continue;
    }
    if (start == kNone) {
      if (utf8::is_space(c)) continue;
      start = i;
    }
    if (!is_terminator(c)) continue;

    std::size_t k = i + 1;
    while (k < n && is_terminator(s[k])) ++k;
    const bool single_dot = (c == U'.' && k == i + 1);
    while (k < n && is_closer(s[k])) ++k;

    bool boundary = false;
    if (k == n) {
      boundary = true;
    } else if (utf8::is_space(s[k])) {
      std::size_t p = k;
      while (p < n && utf8::is_space(s[p]) && s[p] != U'\n' && s[p] != 0x2029) ++p;
      if (p == n || s[p] == U'\n' || s[p] == 0x2029) {
        boundary = true;
      } else if (utf8::is_upper(s[p])) {
        boundary = true;
      } else if (is_opener(s[p]) && p + 1 < n && utf8::is_upper(s[p + 1])) {
        boundary = true;
      }
    }
    if (boundary && single_dot && abbrev.matches_before(s, i)) boundary = false;

    if (boundary) {
      out.push_back(make_unit(s, start, k));
      start = kNone;
    }
    i = k - 1;
  }
  if (start != kNone) emit_trimmed(n);
  return out;
}

}  // namespace detail

/// Splits decoded text. Word and Sentence reject empty or whitespace-only input.
inline std::vector<Unit> split(std::u32string_view text, Granularity g,
                               const AbbreviationList& abbrev = AbbreviationList::builtin()) {
  if (g == Granularity::Character) return detail::split_chars(text);
  if (detail::only_space(text)) throw EmptyInput("cannot split empty or whitespace-only text");
  if (g == Granularity::Word) return detail::split_words(text);
  return detail::split_sentences(text, abbrev);
}

inline std::vector<Unit> split(std::string_view text, Granularity g,
                               const AbbreviationList& abbrev = AbbreviationList::builtin()) {
  return split(std::u32string_view(utf8::decode(text)), g, abbrev);
}

/// Word split that tolerates text without words (returns an empty list).
inline std::vector<Unit> words_of(std::u32string_view text) { return detail::split_words(text); }
inline std::vector<Unit> words_of(std::string_view text) {
  return detail::split_words(utf8::decode(text));
}

/// Sentence containing `offset`. An offset in the whitespace between two
/// sentences resolves to the preceding sentence, or to the first sentence when
/// it lies before any sentence.
inline Unit sentence_of(std::size_t offset, std::u32string_view text,
                        const AbbreviationList& abbrev = AbbreviationList::builtin()) {
  if (offset >= text.size()) {
    throw OutOfBounds("offset " + std::to_string(offset) + " outside text of length " +
                      std::to_string(text.size()));
  }
  const auto sentences = split(text, Granularity::Sentence, abbrev);
  auto it = std::upper_bound(sentences.begin(), sentences.end(), offset,
                             [](std::size_t off, const Unit& u) { return off < u.start; });
  if (it == sentences.begin()) return sentences.front();
  return *std::prev(it);
}

inline Unit sentence_of(std::size_t offset, std::string_view text,
                        const AbbreviationList& abbrev = AbbreviationList::builtin()) {
  return sentence_of(offset, std::u32string_view(utf8::decode(text)), abbrev);
}

}  // namespace paperattack

#endif  // PAPERATTACK_SEGMENTER_HPP
