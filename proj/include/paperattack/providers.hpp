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

// Lexical resources used by the perturbation engines: a synonym lexicon, a
// word-embedding table with k-NN lookup, a sentence rewriter and a sentence
// similarity scorer. The builtin rewriter and scorer are deterministic; the
// HTTP variants live in http.hpp.

#ifndef PAPERATTACK_PROVIDERS_HPP
#define PAPERATTACK_PROVIDERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "paperattack/errors.hpp"
#include "paperattack/hashing.hpp"
#include "paperattack/segmenter.hpp"
#include "paperattack/utf8.hpp"

namespace paperattack {

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// word<TAB>syn1,syn2,... per line. Lookup is case-insensitive and keeps the
/// listed order.
class SynonymLexicon {
 public:
  static SynonymLexicon parse(std::string_view contents) {
    SynonymLexicon lex;
    std::size_t line_no = 0;
    while (!contents.empty()) {
      const auto nl = contents.find('\n');
      auto line = contents.substr(0, nl);
      contents = nl == std::string_view::npos ? std::string_view{} : contents.substr(nl + 1);
      ++line_no;
      line = detail::strip(line);
      if (line.empty() || line.front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos) {
        throw Error("synonym lexicon line " + std::to_string(line_no) + ": missing tab");
      }
      const auto key = utf8::lower(detail::strip(line.substr(0, tab)));
      auto& syns = lex.entries_[key];
      auto rest = line.substr(tab + 1);
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto s = detail::strip(rest.substr(0, comma));
        if (!s.empty()) syns.emplace_back(s);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
    }
    return lex;
  }

  static SynonymLexicon load(const std::filesystem::path& path) { return parse(detail::read_file(path)); }

  void add(std::string word, std::vector<std::string> synonyms) {
    auto& v = entries_[utf8::lower(word)];
    v.insert(v.end(), std::make_move_iterator(synonyms.begin()), std::make_move_iterator(synonyms.end()));
  }

  bool contains(std::string_view word) const { return entries_.count(utf8::lower(word)) != 0; }

  const std::vector<std::string>& lookup(std::string_view word) const {
    auto it = entries_.find(utf8::lower(word));
    if (it == entries_.end()) throw UnknownWord("not in synonym lexicon: " + std::string(word));
    return it->second;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
};

/// Header line "V D", then "word v1 ... vD" per line. Vectors are stored
/// unit-normalised so cosine similarity is a dot product.
class EmbeddingTable {
 public:
  static EmbeddingTable parse(std::string_view contents) {
    std::istringstream in{std::string(contents)};
    std::size_t v = 0;
    std::size_t d = 0;
    if (!(in >> v >> d) || d == 0) throw Error("embedding table: bad header");
    EmbeddingTable t;
    t.dim_ = d;
    t.words_.reserve(v);
    t.data_.reserve(v * d);
    for (std::size_t i = 0; i < v; ++i) {
      std::string w;
      if (!(in >> w)) throw Error("embedding table: expected " + std::to_string(v) + " rows, got " + std::to_string(i));
      std::vector<float> vec(d);
      for (auto& x : vec) {
        if (!(in >> x)) throw Error("embedding table: short vector for " + w);
      }
      t.push(utf8::lower(w), vec);
    }
    return t;
  }

  static EmbeddingTable load(const std::filesystem::path& path) { return parse(detail::read_file(path)); }

  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  void add(std::string word, const std::vector<float>& vec) {
    if (vec.size() != dim_) throw Error("embedding dimension mismatch for " + word);
    push(utf8::lower(word), vec);
  }

  bool contains(std::string_view word) const { return index_.count(utf8::lower(word)) != 0; }
  std::size_t size() const { return words_.size(); }
  std::size_t dim() const { return dim_; }

  double cosine(std::string_view a, std::string_view b) const { return dot(row(a), row(b)); }

  /// The k most cosine-similar other words, best first; equal similarities
  /// are ordered lexicographically.
  std::vector<std::pair<std::string, double>> nearest(std::string_view word, std::size_t k) const {
    const auto self = row(word);
    std::vector<std::pair<std::string, double>> all;
    all.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (i == self) continue;
      all.emplace_back(words_[i], dot(self, i));
    }
    const auto by_sim = [](const auto& x, const auto& y) {
      if (x.second != y.second) return x.second > y.second;
      return x.first < y.first;
    };
    k = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), by_sim);
    all.resize(k);
    return all;
  }

 private:
  void push(std::string w, const std::vector<float>& vec) {
    if (index_.count(w)) throw DuplicateId(w);
    double norm = 0;
    for (float x : vec) norm += static_cast<double>(x) * x;
    norm = std::sqrt(norm);
    index_.emplace(w, words_.size());
    words_.push_back(std::move(w));
    for (float x : vec) data_.push_back(norm > 0 ? static_cast<float>(x / norm) : 0.0f);
  }

  std::size_t row(std::string_view word) const {
    auto it = index_.find(utf8::lower(word));
    if (it == index_.end()) throw UnknownWord("not in embedding table: " + std::string(word));
    return it->second;
  }

  double dot(std::size_t i, std::size_t j) const {
    double s = 0;
    for (std::size_t c = 0; c < dim_; ++c) s += static_cast<double>(data_[i * dim_ + c]) * data_[j * dim_ + c];
    return s;
  }

  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

class SentenceRewriter {
 public:
  virtual ~SentenceRewriter() = default;
  virtual std::string rewrite(const std::string& sentence) const = 0;
  virtual std::string name() const = 0;
};

/// Archaic-register rewriter: word substitutions from a fixed table, then one
/// sentence-initial interjection chosen by a hash of the input.
class RuleRewriter : public SentenceRewriter {
 public:
  std::string rewrite(const std::string& sentence) const override {
    static const std::unordered_map<std::string, std::string> kTable = {
        {"you", "thou"},      {"your", "thy"},       {"yours", "thine"},   {"has", "hath"},
        {"does", "doth"},     {"is", "be"},          {"are", "be"},        {"often", "oft"},
        {"before", "ere"},    {"among", "amongst"},  {"while", "whilst"},  {"also", "likewise"},
        {"shows", "showeth"}, {"show", "shew"},      {"gives", "giveth"},  {"makes", "maketh"},
        {"uses", "useth"},    {"can", "may"},        {"will", "shall"},    {"nothing", "naught"},
        {"perhaps", "mayhap"}, {"very", "exceeding"}, {"until", "till"},   {"here", "hither"},
        {"there", "thither"}, {"why", "wherefore"},  {"however", "howbeit"}, {"indeed", "verily"},
    };
    static const char* const kOpeners[] = {"Verily, ", "Behold, ", "And lo, "};

    const auto text = utf8::decode(sentence);
    std::u32string out;
    std::size_t pos = 0;
    for (const auto& w : words_of(std::u32string_view(text))) {
      out.append(text, pos, w.start - pos);
      const auto it = kTable.find(utf8::lower(w.text));
      if (it == kTable.end()) {
        out.append(text, w.start, w.size());
      } else {
        auto rep = utf8::decode(it->second);
        if (utf8::is_upper(text[w.start])) rep[0] = utf8::to_upper(rep[0]);
        out += rep;
      }
      pos = w.end;
    }
    out.append(text, pos, std::u32string::npos);

    std::size_t lead = 0;
    while (lead < out.size() && utf8::is_space(out[lead])) ++lead;
    if (lead == out.size()) return sentence;
    // Lower-case the old first letter unless it starts an acronym.
    if (utf8::is_upper(out[lead]) && !(lead + 1 < out.size() && utf8::is_upper(out[lead + 1]))) {
      out[lead] = utf8::to_lower(out[lead]);
    }
    const auto opener = kOpeners[fnv1a64(sentence) % std::size(kOpeners)];
    out.insert(lead, utf8::decode(opener));
    return utf8::encode(out);
  }

  std::string name() const override { return "builtin:rule"; }
};

class SimilarityScorer {
 public:
  virtual ~SimilarityScorer() = default;
  virtual double score(const std::string& a, const std::string& b) const = 0;
  virtual std::string name() const = 0;
};

/// Cosine similarity of lower-cased unigram count vectors, hashed into 2^20
/// buckets.
class OverlapScorer : public SimilarityScorer {
 public:
  static constexpr std::uint64_t kBuckets = 1u << 20;

  double score(const std::string& a, const std::string& b) const override {
    const auto x = bag(a);
    const auto y = bag(b);
    if (x.empty() || y.empty()) return x.empty() && y.empty() ? 1.0 : 0.0;
    double dot = 0;
    for (const auto& [k, c] : x) {
      auto it = y.find(k);
      if (it != y.end()) dot += static_cast<double>(c) * it->second;
    }
    const double r = dot / (norm(x) * norm(y));
    return std::min(1.0, r);
  }

  std::string name() const override { return "builtin:overlap"; }

 private:
  using Bag = std::unordered_map<std::uint64_t, std::size_t>;

  static Bag bag(const std::string& s) {
    Bag b;
    for (const auto& w : words_of(std::string_view(s))) ++b[fnv1a64(utf8::lower(w.text)) % kBuckets];
    return b;
  }

  static double norm(const Bag& b) {
    double s = 0;
    for (const auto& [k, c] : b) s += static_cast<double>(c) * c;
    return std::sqrt(s);
  }
};

}  // namespace paperattack

#endif  // PAPERATTACK_PROVIDERS_HPP
