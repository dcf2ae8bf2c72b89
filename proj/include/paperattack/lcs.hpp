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

// Longest common subsequence over interned unit sequences.
//
// lcs_pairs() is Hirschberg's divide and conquer: the longer sequence is cut
// in half, one forward and one backward score row over the shorter sequence
// locate the optimal crossing column, and each half is solved recursively.
// Score rows are sized by the shorter input, so working memory is
// O(min(|a|, |b|)) besides the O(LCS) output. Subproblems below kDirectCells
// fall back to the full table with a backtrace that prefers stepping in `a`
// on ties.

#ifndef PAPERATTACK_LCS_HPP
#define PAPERATTACK_LCS_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "paperattack/errors.hpp"
#include "paperattack/segmenter.hpp"
#include "paperattack/utf8.hpp"

namespace paperattack {

using Symbol = std::uint32_t;
using IndexPair = std::pair<std::size_t, std::size_t>;

/// Length only, one score row.
inline std::size_t lcs_length(std::span<const Symbol> a, std::span<const Symbol> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::uint32_t> row(b.size() + 1, 0);
  for (Symbol x : a) {
    std::uint32_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::uint32_t up = row[j];
      row[j] = (x == b[j - 1]) ? diag + 1 : std::max(up, row[j - 1]);
      diag = up;
    }
  }
  return row.back();
}

namespace detail {

inline constexpr std::size_t kDirectCells = 1u << 14;

// fwd[j] = LCS(a, b[0..j)) for j in [0, |b|]
inline void lcs_row_forward(std::span<const Symbol> a, std::span<const Symbol> b,
                            std::vector<std::uint32_t>& row) {
  row.assign(b.size() + 1, 0);
  for (Symbol x : a) {
    std::uint32_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::uint32_t up = row[j];
      row[j] = (x == b[j - 1]) ? diag + 1 : std::max(up, row[j - 1]);
      diag = up;
    }
  }
}

// bwd[j] = LCS(a, b[j..|b|)) for j in [0, |b|]
inline void lcs_row_backward(std::span<const Symbol> a, std::span<const Symbol> b,
                             std::vector<std::uint32_t>& row) {
  const std::size_t m = b.size();
  row.assign(m + 1, 0);
  for (std::size_t ii = a.size(); ii-- > 0;) {
    const Symbol x = a[ii];
    std::uint32_t diag = 0;
    for (std::size_t j = m; j-- > 0;) {
      const std::uint32_t down = row[j];
      row[j] = (x == b[j]) ? diag + 1 : std::max(down, row[j + 1]);
      diag = down;
    }
  }
}

inline void lcs_direct(std::span<const Symbol> a, std::span<const Symbol> b, std::size_t a_off,
                       std::size_t b_off, std::vector<IndexPair>& out) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::uint32_t> t((n + 1) * (m + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return t[i * (m + 1) + j]; };
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      at(i, j) = (a[i - 1] == b[j - 1]) ? at(i - 1, j - 1) + 1 : std::max(at(i - 1, j), at(i, j - 1));
    }
  }
  std::vector<IndexPair> rev;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 && j > 0) {
    if (a[i - 1] == b[j - 1]) {
      rev.emplace_back(a_off + i - 1, b_off + j - 1);
      --i;
      --j;
    } else if (at(i - 1, j) >= at(i, j - 1)) {
      --i;
    } else {
      --j;
    }
  }
  out.insert(out.end(), rev.rbegin(), rev.rend());
}

// `a` is the longer side; the recursion keeps rows sized by `b`.
inline void hirschberg(std::span<const Symbol> a, std::span<const Symbol> b, std::size_t a_off,
                       std::size_t b_off, std::vector<IndexPair>& out,
                       std::vector<std::uint32_t>& fwd, std::vector<std::uint32_t>& bwd) {
  if (a.empty() || b.empty()) return;
  if (a.size() == 1) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (b[j] == a[0]) {
        out.emplace_back(a_off, b_off + j);
        return;
      }
    }
    return;
  }
  if (b.size() == 1) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == b[0]) {
        out.emplace_back(a_off + i, b_off);
        return;
      }
    }
    return;
  }
  if (a.size() * b.size() <= kDirectCells) {
    lcs_direct(a, b, a_off, b_off, out);
    return;
  }
  const std::size_t mid = a.size() / 2;
  lcs_row_forward(a.first(mid), b, fwd);
  lcs_row_backward(a.subspan(mid), b, bwd);
  std::size_t best_k = 0;
  std::uint32_t best = 0;
  for (std::size_t k = 0; k <= b.size(); ++k) {
    const std::uint32_t v = fwd[k] + bwd[k];
    if (v > best || k == 0) {
      best = v;
      best_k = k;
    }
  }
  hirschberg(a.first(mid), b.first(best_k), a_off, b_off, out, fwd, bwd);
  hirschberg(a.subspan(mid), b.subspan(best_k), a_off + mid, b_off + best_k, out, fwd, bwd);
}

}  // namespace detail

/// Index pairs (i, j) of one longest common subsequence, ascending in both.
inline std::vector<IndexPair> lcs_pairs(std::span<const Symbol> a, std::span<const Symbol> b) {
  std::vector<IndexPair> out;
  std::vector<std::uint32_t> fwd;
  std::vector<std::uint32_t> bwd;
  if (a.size() >= b.size()) {
    detail::hirschberg(a, b, 0, 0, out, fwd, bwd);
  } else {
    detail::hirschberg(b, a, 0, 0, out, fwd, bwd);
    for (auto& p : out) std::swap(p.first, p.second);
  }
  return out;
}

/// Maps case-folded unit texts of both sequences onto a shared alphabet.
class SymbolTable {
 public:
  Symbol intern(const std::string& folded) {
    auto [it, inserted] = ids_.try_emplace(folded, static_cast<Symbol>(ids_.size()));
    return it->second;
  }

  std::vector<Symbol> encode(const std::vector<Unit>& units) {
    std::vector<Symbol> out;
    out.reserve(units.size());
    for (const auto& u : units) out.push_back(intern(utf8::lower(u.text)));
    return out;
  }

 private:
  std::unordered_map<std::string, Symbol> ids_;
};

/// A contiguous stretch of the common subsequence: units a_unit..a_unit+length
/// of A match b_unit..b_unit+length of B one for one.
struct MatchRun {
  std::size_t a_start = 0;
  std::size_t a_end = 0;
  std::size_t b_start = 0;
  std::size_t b_end = 0;
  std::size_t length = 0;
  std::size_t a_unit = 0;
  std::size_t b_unit = 0;

  friend bool operator==(const MatchRun&, const MatchRun&) = default;
};

inline std::vector<MatchRun> runs_from_pairs(const std::vector<IndexPair>& pairs,
                                             const std::vector<Unit>& a,
                                             const std::vector<Unit>& b) {
  std::vector<MatchRun> runs;
  for (const auto& [i, j] : pairs) {
    if (!runs.empty()) {
      auto& r = runs.back();
      if (r.a_unit + r.length == i && r.b_unit + r.length == j) {
        ++r.length;
        r.a_end = a[i].end;
        r.b_end = b[j].end;
        continue;
      }
    }
    runs.push_back(MatchRun{a[i].start, a[i].end, b[j].start, b[j].end, 1, i, j});
  }
  return runs;
}

/// Contiguous runs of one LCS of the two unit lists, compared case-insensitively.
inline std::vector<MatchRun> lcs_runs(const std::vector<Unit>& a, const std::vector<Unit>& b) {
  if (a.empty() || b.empty()) throw EmptyInput("lcs_runs requires two non-empty unit lists");
  SymbolTable table;
  const auto sa = table.encode(a);
  const auto sb = table.encode(b);
  return runs_from_pairs(lcs_pairs(sa, sb), a, b);
}

inline std::size_t lcs_length(const std::vector<Unit>& a, const std::vector<Unit>& b) {
  SymbolTable table;
  const auto sa = table.encode(a);
  const auto sb = table.encode(b);
  return lcs_length(std::span<const Symbol>(sa), std::span<const Symbol>(sb));
}

}  // namespace paperattack

#endif  // PAPERATTACK_LCS_HPP
