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

// Candidate perturbations and their application to a document.
//
// Offsets are Unicode scalar indices into the document as it is at the time
// the perturbation is applied. Character-level candidates keep the first and
// last character of the word and differ from it by exactly one insertion,
// deletion, substitution or adjacent transposition.

#ifndef PAPERATTACK_PERTURB_HPP
#define PAPERATTACK_PERTURB_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "paperattack/errors.hpp"
#include "paperattack/hashing.hpp"
#include "paperattack/localizer.hpp"
#include "paperattack/providers.hpp"
#include "paperattack/segmenter.hpp"
#include "paperattack/utf8.hpp"

namespace paperattack {

enum class PerturbKind { CharEdit, PunctEdit, SynonymSwap, EmbeddingSwap, SentenceRewrite };

inline std::string_view perturb_kind_name(PerturbKind k) {
  switch (k) {
    case PerturbKind::CharEdit:
      return "char_edit";
    case PerturbKind::PunctEdit:
      return "punct_edit";
    case PerturbKind::SynonymSwap:
      return "synonym_swap";
    case PerturbKind::EmbeddingSwap:
      return "embedding_swap";
    case PerturbKind::SentenceRewrite:
      return "sentence_rewrite";
  }
  return "?";
}

inline PerturbKind parse_perturb_kind(std::string_view s) {
  for (auto k : {PerturbKind::CharEdit, PerturbKind::PunctEdit, PerturbKind::SynonymSwap,
                 PerturbKind::EmbeddingSwap, PerturbKind::SentenceRewrite}) {
    if (perturb_kind_name(k) == s) return k;
  }
  throw Error("unknown perturbation kind: " + std::string(s));
}

struct Perturbation {
  std::size_t span_start = 0;
  std::size_t span_end = 0;
  std::string original;
  std::string replacement;
  PerturbKind kind = PerturbKind::CharEdit;

  /// Scalar length change caused by applying this perturbation.
  std::ptrdiff_t delta() const {
    return static_cast<std::ptrdiff_t>(utf8::length(replacement)) -
           static_cast<std::ptrdiff_t>(span_end - span_start);
  }

  friend bool operator==(const Perturbation&, const Perturbation&) = default;
};

inline constexpr std::size_t kDefaultCandidateCap = 15;

struct CandidateSet {
  Unit target;
  std::vector<Perturbation> candidates;
  std::size_t cap = kDefaultCandidateCap;

  std::size_t size() const { return candidates.size(); }
  bool empty() const { return candidates.empty(); }
};

namespace detail {

inline const std::array<std::string_view, 26>& qwerty_neighbours() {
  static const std::array<std::string_view, 26> k = {
      "qwsz",   "vghn",  "xdfv",   "serfcx", "wsdr",  "drtgvc", "ftyhbv", "gyujnb", "ujko",
      "huikmn", "jiolm", "kop",    "njk",    "bhjm",  "iklp",   "ol",     "wa",     "edft",
      "awedxz", "rfgy",  "yhji",   "cfgb",   "qase",  "zsdc",   "tghu",   "asx"};
  return k;
}

inline std::u32string neighbours_of(char32_t c) {
  const bool upper = c >= U'A' && c <= U'Z';
  const char32_t l = upper ? c - U'A' + U'a' : c;
  std::u32string out;
  if (l >= U'a' && l <= U'z') {
    for (char n : qwerty_neighbours()[l - U'a']) out.push_back(upper ? n - 'a' + 'A' : n);
  } else if (l >= U'0' && l <= U'9') {
    static constexpr std::u32string_view kRow = U"1234567890";
    const auto i = kRow.find(l);
    if (i > 0) out.push_back(kRow[i - 1]);
    if (i + 1 < kRow.size()) out.push_back(kRow[i + 1]);
  }
  return out;
}

/// Uniform index in [0, n) from the raw engine output; the distribution
/// classes are avoided because their output differs across standard libraries.
inline std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw(rng, i)]);
}

inline std::uint64_t word_seed(const Unit& w, std::uint64_t seed) {
  return fnv1a64(w.text + '\x1f' + std::to_string(w.start), seed ^ 0x9e3779b97f4a7c15ULL);
}

/// Takes from each pool in turn so every kind of edit is represented.
inline std::vector<std::u32string> round_robin(std::vector<std::vector<std::u32string>> pools,
                                               std::size_t cap) {
  std::vector<std::u32string> out;
  std::set<std::u32string> seen;
  std::vector<std::size_t> next(pools.size(), 0);
  bool progressed = true;
  while (out.size() < cap && progressed) {
    progressed = false;
    for (std::size_t p = 0; p < pools.size() && out.size() < cap; ++p) {
      while (next[p] < pools[p].size()) {
        auto& c = pools[p][next[p]++];
        if (seen.insert(c).second) {
          out.push_back(std::move(c));
          progressed = true;
          break;
        }
      }
    }
  }
  return out;
}

inline CandidateSet make_set(const Unit& word, const std::vector<std::u32string>& variants, PerturbKind kind,
                             std::size_t cap) {
  CandidateSet set{word, {}, cap};
  for (const auto& v : variants) {
    set.candidates.push_back(Perturbation{word.start, word.end, word.text, utf8::encode(v), kind});
  }
  return set;
}

}  // namespace detail

/// Insert a letter, repeat a letter, delete, transpose adjacent or substitute a
/// keyboard neighbour, never touching the first or last character.
inline CandidateSet char_candidates(const Unit& word, std::uint64_t seed, std::size_t cap = kDefaultCandidateCap) {
  const auto w = utf8::decode(word.text);
  const std::size_t n = w.size();
  if (n < 3) throw WordTooShort("word too short for interior character edits: " + word.text);

  std::vector<std::u32string> insert, repeat, remove, swap, subst;
  for (std::size_t p = 1; p < n; ++p) {
    for (char32_t c = U'a'; c <= U'z'; ++c) {
      auto v = w;
      v.insert(v.begin() + static_cast<std::ptrdiff_t>(p), c);
      insert.push_back(std::move(v));
    }
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    auto r = w;
    r.insert(r.begin() + static_cast<std::ptrdiff_t>(i), w[i]);
    repeat.push_back(std::move(r));
    auto d = w;
    d.erase(i, 1);
    remove.push_back(std::move(d));
    if (i + 2 < n && w[i] != w[i + 1]) {
      auto s = w;
      std::swap(s[i], s[i + 1]);
      swap.push_back(std::move(s));
    }
    for (char32_t c : detail::neighbours_of(w[i])) {
      auto s = w;
      s[i] = c;
      subst.push_back(std::move(s));
    }
  }
  std::mt19937_64 rng(detail::word_seed(word, seed));
  std::vector<std::vector<std::u32string>> pools{std::move(insert), std::move(subst), std::move(remove),
                                                 std::move(swap), std::move(repeat)};
  for (auto& p : pools) {
    detail::shuffle(p, rng);
    std::erase(p, w);
  }
  return detail::make_set(word, detail::round_robin(std::move(pools), cap), PerturbKind::CharEdit, cap);
}

inline constexpr std::u32string_view kPunctMarks = U"&-'.,";

/// One punctuation mark inserted between two characters of the word.
inline CandidateSet punct_candidates(const Unit& word, std::uint64_t seed, std::size_t cap = kDefaultCandidateCap) {
  const auto w = utf8::decode(word.text);
  if (w.size() < 2) throw WordTooShort("word too short for punctuation insertion: " + word.text);
  std::vector<std::u32string> pool;
  for (std::size_t p = 1; p < w.size(); ++p) {
    for (char32_t m : kPunctMarks) {
      auto v = w;
      v.insert(v.begin() + static_cast<std::ptrdiff_t>(p), m);
      pool.push_back(std::move(v));
    }
  }
  std::mt19937_64 rng(detail::word_seed(word, seed));
  detail::shuffle(pool, rng);
  std::vector<std::vector<std::u32string>> pools{std::move(pool)};
  return detail::make_set(word, detail::round_robin(std::move(pools), cap), PerturbKind::PunctEdit, cap);
}

enum class Casing { Lower, Title, Upper, Mixed };

inline Casing casing_of(std::u32string_view w) {
  std::size_t letters = 0, uppers = 0;
  for (char32_t c : w) {
    if (utf8::is_upper(c) || utf8::is_lower(c)) ++letters;
    if (utf8::is_upper(c)) ++uppers;
  }
  if (uppers == 0) return Casing::Lower;
  if (uppers == letters && letters > 1) return Casing::Upper;
  if (uppers == 1 && !w.empty() && utf8::is_upper(w.front())) return Casing::Title;
  return Casing::Mixed;
}

inline std::string apply_casing(std::string_view word, Casing c) {
  auto w = utf8::fold(utf8::decode(word));
  switch (c) {
    case Casing::Upper:
      for (auto& ch : w) ch = utf8::to_upper(ch);
      break;
    case Casing::Title:
      if (!w.empty()) w[0] = utf8::to_upper(w[0]);
      break;
    default:
      break;
  }
  return utf8::encode(w);
}

namespace detail {

inline bool single_token(std::string_view s) {
  const auto ws = words_of(s);
  return ws.size() == 1 && ws[0].start == 0 && ws[0].end == utf8::length(s);
}

inline CandidateSet word_set(const Unit& word, const std::vector<std::string>& raw, PerturbKind kind,
                             std::size_t k) {
  if (k > kDefaultCandidateCap) throw Error("word candidate count above cap");
  const auto casing = casing_of(utf8::decode(word.text));
  const auto lowered = utf8::lower(word.text);
  CandidateSet set{word, {}, k};
  std::unordered_set<std::string> seen;
  for (const auto& r : raw) {
    if (set.size() >= k) break;
    const auto lr = utf8::lower(r);
    if (lr == lowered || !single_token(r) || !seen.insert(lr).second) continue;
    set.candidates.push_back(Perturbation{word.start, word.end, word.text, apply_casing(r, casing), kind});
  }
  return set;
}

}  // namespace detail

/// First k listed synonyms, with the word's casing pattern re-applied.
inline CandidateSet word_candidates(const Unit& word, const SynonymLexicon& lexicon, std::size_t k) {
  return detail::word_set(word, lexicon.lookup(word.text), PerturbKind::SynonymSwap, k);
}

/// k nearest neighbours by cosine, with the word's casing pattern re-applied.
inline CandidateSet word_candidates(const Unit& word, const EmbeddingTable& table, std::size_t k) {
  std::vector<std::string> raw;
  for (auto& [w, sim] : table.nearest(word.text, k + kDefaultCandidateCap)) raw.push_back(std::move(w));
  return detail::word_set(word, raw, PerturbKind::EmbeddingSwap, k);
}

inline Perturbation rewrite_sentence(const Unit& sentence, const SentenceRewriter& rewriter) {
  auto out = rewriter.rewrite(sentence.text);
  const auto trimmed = detail::strip(out);
  if (trimmed.empty() || trimmed == detail::strip(sentence.text)) {
    throw EmptyRewrite("rewriter returned the sentence unchanged");
  }
  return Perturbation{sentence.start, sentence.end, sentence.text, std::string(trimmed),
                      PerturbKind::SentenceRewrite};
}

/// Replaces the perturbation's slice in place and returns the length change.
inline std::ptrdiff_t apply(std::u32string& doc, const Perturbation& p) {
  if (p.span_start > p.span_end || p.span_end > doc.size()) {
    throw OutOfBounds("perturbation span [" + std::to_string(p.span_start) + ", " + std::to_string(p.span_end) +
                      ") outside document of length " + std::to_string(doc.size()));
  }
  const auto slice = std::u32string_view(doc).substr(p.span_start, p.span_end - p.span_start);
  if (utf8::encode(slice) != p.original) {
    throw StaleSpan("document slice '" + utf8::encode(slice) + "' does not match '" + p.original + "'");
  }
  doc.replace(p.span_start, p.span_end - p.span_start, utf8::decode(p.replacement));
  return p.delta();
}

inline std::string apply(std::string_view doc, const Perturbation& p) {
  auto d = utf8::decode(doc);
  paperattack::apply(d, p);
  return utf8::encode(d);
}

/// The perturbation that undoes `p` once `p` has been applied.
inline Perturbation inverse(const Perturbation& p) {
  return Perturbation{p.span_start, p.span_start + utf8::length(p.replacement), p.replacement, p.original, p.kind};
}

inline bool similarity_ok(const std::string& orig, const std::string& adv, const SimilarityScorer& scorer,
                          double threshold) {
  return scorer.score(orig, adv) >= threshold;
}

/// Spans in current-document coordinates. Spans at or after the edit shift by
/// its delta; the span holding the edit grows or shrinks with it.
inline void shift_spans(ModifiableSpanSet& set, const Perturbation& p) {
  const auto d = p.delta();
  for (auto& s : set.spans) {
    if (s.start >= p.span_end && p.span_end > p.span_start) {
      s.start = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.start) + d);
      s.end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.end) + d);
    } else if (s.start <= p.span_start && s.end >= p.span_end) {
      s.end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.end) + d);
    }
  }
}

/// Throws SpanViolation unless `p` lies inside one span of `set`.
inline void guard_span(const Perturbation& p, const ModifiableSpanSet& set) {
  if (!set.covers(p.span_start, p.span_end)) {
    throw SpanViolation("perturbation [" + std::to_string(p.span_start) + ", " + std::to_string(p.span_end) +
                        ") outside the modifiable spans");
  }
}

/// Replays `log` from `x_clean`, checking each step against the spans as they
/// shift. Returns false on the first violation or stale slice.
inline bool log_within_spans(std::string_view x_clean, const std::vector<Perturbation>& log,
                             ModifiableSpanSet spans) {
  auto doc = utf8::decode(x_clean);
  for (const auto& p : log) {
    if (!spans.covers(p.span_start, p.span_end)) return false;
    try {
      paperattack::apply(doc, p);
    } catch (const Error&) {
      return false;
    }
    shift_spans(spans, p);
  }
  return true;
}

inline const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> k = {
      "a",       "about",   "above",   "after",   "again",  "against", "all",     "also",    "am",
      "an",      "and",     "any",     "are",     "as",     "at",      "be",      "because", "been",
      "before",  "being",   "below",   "between", "both",   "but",     "by",      "can",     "could",
      "did",     "do",      "does",    "doing",   "down",   "during",  "each",    "either",  "few",
      "for",     "from",    "further", "had",     "has",    "have",    "having",  "he",      "her",
      "here",    "hers",    "him",     "his",     "how",    "however", "i",       "if",      "in",
      "into",    "is",      "it",      "its",     "itself", "just",    "may",     "me",      "might",
      "more",    "most",    "must",    "my",      "neither", "no",     "nor",     "not",     "now",
      "of",      "off",     "on",      "once",    "only",   "or",      "other",   "our",     "ours",
      "out",     "over",    "own",     "same",    "she",    "should",  "so",      "some",    "such",
      "than",    "that",    "the",     "their",   "theirs", "them",    "then",    "there",   "these",
      "they",    "this",    "those",   "through", "thus",   "to",      "too",     "under",   "until",
      "up",      "upon",    "us",      "very",    "via",    "was",     "we",      "were",    "what",
      "when",    "where",   "whether", "which",   "while",  "who",     "whom",    "why",     "will",
      "with",    "within",  "without", "would",   "yet",    "you",     "your",    "yours",
  };
  return k;
}

/// Word-level engines skip stopwords, words under three characters and tokens
/// without a letter.
inline bool eligible_word(std::string_view word) {
  const auto w = utf8::decode(word);
  if (w.size() < 3) return false;
  if (std::none_of(w.begin(), w.end(), [](char32_t c) { return utf8::is_upper(c) || utf8::is_lower(c); })) {
    return false;
  }
  return stopwords().count(utf8::lower(word)) == 0;
}

inline nlohmann::json to_json(const Perturbation& p) {
  return {{"span_start", p.span_start},
          {"span_end", p.span_end},
          {"original", p.original},
          {"replacement", p.replacement},
          {"kind", std::string(perturb_kind_name(p.kind))}};
}

inline Perturbation perturbation_from_json(const nlohmann::json& j) {
  return Perturbation{j.at("span_start").get<std::size_t>(), j.at("span_end").get<std::size_t>(),
                      j.at("original").get<std::string>(), j.at("replacement").get<std::string>(),
                      parse_perturb_kind(j.at("kind").get<std::string>())};
}

}  // namespace paperattack

#endif  // PAPERATTACK_PERTURB_HPP
