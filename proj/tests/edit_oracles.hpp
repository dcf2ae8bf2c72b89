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

#ifndef PAPERATTACK_TESTS_EDIT_ORACLES_HPP
#define PAPERATTACK_TESTS_EDIT_ORACLES_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "paperattack/perturb.hpp"

namespace testing_support {

/// Optimal string alignment distance (insert, delete, substitute, adjacent
/// transpose), full table.
inline std::size_t osa_distance(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    }
  }
  return d[a.size()][b.size()];
}

/// A char edit keeps the first and last scalar and is one edit away.
inline bool is_one_char_edit(const std::string& original, const std::string& candidate) {
  const auto a = paperattack::utf8::decode(original);
  const auto b = paperattack::utf8::decode(candidate);
  if (a.empty() || b.empty()) return false;
  return a.front() == b.front() && a.back() == b.back() && osa_distance(a, b) == 1;
}

/// A punctuation edit is a single interior insertion of one mark.
inline bool is_one_punct_insert(const std::string& original, const std::string& candidate) {
  const auto a = paperattack::utf8::decode(original);
  const auto b = paperattack::utf8::decode(candidate);
  if (b.size() != a.size() + 1) return false;
  for (std::size_t p = 1; p < b.size() - 1; ++p) {
    if (paperattack::kPunctMarks.find(b[p]) == std::u32string_view::npos) continue;
    if (b.substr(0, p) + b.substr(p + 1) == a) return true;
  }
  return false;
}

inline bool same_casing(const std::string& original, const std::string& candidate) {
  using paperattack::Casing;
  const auto co = paperattack::casing_of(paperattack::utf8::decode(original));
  const auto cc = paperattack::casing_of(paperattack::utf8::decode(candidate));
  return co == Casing::Mixed || co == cc;
}

/// Exactly one token differs between the documents before and after a word
/// swap, and the replacement is one token with the original casing.
inline bool is_one_token_swap(const std::string& doc, const paperattack::Perturbation& p) {
  const auto after = paperattack::apply(std::string_view(doc), p);
  const auto a = paperattack::words_of(std::string_view(doc));
  const auto b = paperattack::words_of(std::string_view(after));
  if (a.size() != b.size()) return false;
  std::size_t diffs = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diffs += a[i].text != b[i].text;
  return diffs == 1 && paperattack::detail::single_token(p.replacement) &&
         paperattack::utf8::lower(p.replacement) != paperattack::utf8::lower(p.original) &&
         same_casing(p.original, p.replacement);
}

}  // namespace testing_support

#endif  // PAPERATTACK_TESTS_EDIT_ORACLES_HPP
