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

// Review-quality metrics (aspect coverage, ROUGE, reference matching) and
// robustness metrics (success rate, shifts, modification rate, Wilcoxon).

#ifndef PAPERATTACK_METRICS_HPP
#define PAPERATTACK_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "paperattack/aspects.hpp"
#include "paperattack/corpus.hpp"
#include "paperattack/errors.hpp"
#include "paperattack/lcs.hpp"
#include "paperattack/providers.hpp"
#include "paperattack/review_format.hpp"
#include "paperattack/search.hpp"
#include "paperattack/segmenter.hpp"
#include "paperattack/utf8.hpp"

namespace paperattack {

inline constexpr std::size_t kAcovDenominator = 15;

/// Distinct non-NONE tags over the size of the non-NONE typology.
inline double acov(const std::vector<AspectTag>& tags, std::size_t denominator = kAcovDenominator) {
  std::set<AspectTag> distinct;
  for (auto t : tags) {
    if (t != AspectTag::None) distinct.insert(t);
  }
  return static_cast<double>(distinct.size()) / static_cast<double>(denominator);
}

namespace detail {

inline std::vector<std::string> lower_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& w : words_of(text)) out.push_back(utf8::lower(w.text));
  return out;
}

inline double f1(double overlap, double cand_n, double ref_n) {
  if (overlap == 0) return 0.0;
  const double p = overlap / cand_n;
  const double r = overlap / ref_n;
  return 2 * p * r / (p + r);
}

}  // namespace detail

/// F1 of clipped n-gram overlap over lower-cased word tokens.
inline double rouge_n(std::string_view cand, std::string_view ref, std::size_t n) {
  if (n < 1) throw Error("rouge_n needs n >= 1");
  const auto c = detail::lower_tokens(cand);
  const auto r = detail::lower_tokens(ref);
  if (c.size() < n || r.size() < n) throw TooShort("text shorter than " + std::to_string(n) + " words");
  auto grams = [n](const std::vector<std::string>& t) {
    std::map<std::vector<std::string>, std::size_t> m;
    for (std::size_t i = 0; i + n <= t.size(); ++i) ++m[std::vector<std::string>(t.begin() + i, t.begin() + i + n)];
    return m;
  };
  const auto cg = grams(c);
  const auto rg = grams(r);
  std::size_t overlap = 0;
  for (const auto& [g, k] : cg) {
    auto it = rg.find(g);
    if (it != rg.end()) overlap += std::min(k, it->second);
  }
  return detail::f1(static_cast<double>(overlap), static_cast<double>(c.size() - n + 1),
                    static_cast<double>(r.size() - n + 1));
}

/// F1 from the word-level LCS length.
inline double rouge_l(std::string_view cand, std::string_view ref) {
  const auto c = words_of(cand);
  const auto r = words_of(ref);
  if (c.empty() || r.empty()) return 0.0;
  const auto l = lcs_length(c, r);
  return detail::f1(static_cast<double>(l), static_cast<double>(c.size()), static_cast<double>(r.size()));
}

using TextMetric = std::function<double(std::string_view, std::string_view)>;

inline double best_against_refs(std::string_view cand, const std::vector<std::string>& refs, const TextMetric& metric) {
  if (refs.empty()) throw NoReferences("no reference reviews");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : refs) best = std::max(best, metric(cand, r));
  return best;
}

enum class PairMode { WithinPaper, AcrossPaper, VsLLM };

inline std::string_view pair_mode_name(PairMode m) {
  switch (m) {
    case PairMode::WithinPaper:
      return "within_paper";
    case PairMode::AcrossPaper:
      return "across_paper";
    case PairMode::VsLLM:
      return "vs_llm";
  }
  return "?";
}

struct ReviewPair {
  std::string paper_a;
  std::string paper_b;
  std::size_t review_a = 0;
  std::size_t review_b = 0;
  std::string a;
  std::string b;
};

/// Human-review pairs. WithinPaper: every unordered pair of one paper's
/// reviews. AcrossPaper: a seeded uniform sample of round(rate * N) (at least
/// one) of the N pairs whose reviews belong to different papers.
inline std::vector<ReviewPair> build_pairs(const Dataset& ds, PairMode mode, double sample_rate, std::uint64_t seed) {
  if (!(sample_rate > 0 && sample_rate <= 1)) throw Error("sample_rate must be in (0, 1]");
  std::vector<ReviewPair> out;
  if (mode == PairMode::WithinPaper) {
    for (const auto& p : ds.papers) {
      for (std::size_t i = 0; i < p.human_reviews.size(); ++i) {
        for (std::size_t j = i + 1; j < p.human_reviews.size(); ++j) {
          out.push_back({p.id, p.id, i, j, p.human_reviews[i].text, p.human_reviews[j].text});
        }
      }
    }
    return out;
  }
  if (mode != PairMode::AcrossPaper) throw Error("build_pairs supports within- and across-paper modes");
  struct Ref {
    std::uint32_t paper;
    std::uint32_t review;
  };
  std::vector<Ref> refs;
  for (std::size_t p = 0; p < ds.papers.size(); ++p) {
    for (std::size_t r = 0; r < ds.papers[p].human_reviews.size(); ++r) {
      refs.push_back({static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(r)});
    }
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> all;
  for (std::uint32_t i = 0; i < refs.size(); ++i) {
    for (std::uint32_t j = i + 1; j < refs.size(); ++j) {
      if (refs[i].paper != refs[j].paper) all.emplace_back(i, j);
    }
  }
  if (all.empty()) return out;
  const auto want = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sample_rate * all.size())));
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < want && i + 1 < all.size(); ++i) {
    std::swap(all[i], all[i + static_cast<std::size_t>(rng() % (all.size() - i))]);
  }
  all.resize(std::min(want, all.size()));
  std::sort(all.begin(), all.end());
  for (const auto& [i, j] : all) {
    const auto& pa = ds.papers[refs[i].paper];
    const auto& pb = ds.papers[refs[j].paper];
    out.push_back({pa.id, pb.id, refs[i].review, refs[j].review, pa.human_reviews[refs[i].review].text,
                   pb.human_reviews[refs[j].review].text});
  }
  return out;
}

/// Fraction of shifts at or above the threshold.
inline double asr(const std::vector<double>& shifts, double threshold = 1.0) {
  if (shifts.empty()) throw NoRuns("asr over no runs");
  const auto hit = std::count_if(shifts.begin(), shifts.end(), [&](double s) { return s >= threshold; });
  return static_cast<double>(hit) / static_cast<double>(shifts.size());
}

inline double asr(const std::vector<AttackRun>& runs, double threshold = 1.0) {
  std::vector<double> s;
  for (const auto& r : runs) s.push_back(r.score_shift);
  return asr(s, threshold);
}

struct TagShift {
  double pos = 0;
  double neg = 0;
};

inline TagShift tag_shift(const ReviewResult& clean, const ReviewResult& adv) {
  auto count = [](const ReviewResult& r, bool positive) {
    const auto tags = r.tags();
    return static_cast<double>(std::count_if(tags.begin(), tags.end(), [&](AspectTag t) {
      return positive ? is_positive(t) : is_negative(t);
    }));
  };
  return {count(adv, true) - count(clean, true), count(adv, false) - count(clean, false)};
}

/// Unit-cost insert/delete/substitute distance over scalars.
inline std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const auto up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

struct SentencePair {
  std::string clean;
  std::string adv;
};

/// Sentences paired by position; only differing pairs are kept. A sentence
/// without a counterpart is paired with the empty string.
inline std::vector<SentencePair> differing_sentences(std::string_view x_clean, std::string_view x_adv) {
  auto sents = [](std::string_view t) {
    std::vector<std::string> out;
    if (detail::only_space(utf8::decode(t))) return out;
    for (auto& u : split(t, Granularity::Sentence)) out.push_back(std::move(u.text));
    return out;
  };
  const auto c = sents(x_clean);
  const auto a = sents(x_adv);
  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < std::max(c.size(), a.size()); ++i) {
    std::string sc = i < c.size() ? c[i] : std::string();
    std::string sa = i < a.size() ? a[i] : std::string();
    if (sc != sa) out.push_back({std::move(sc), std::move(sa)});
  }
  return out;
}

/// Mean over differing sentence pairs of edit distance / mean pair length.
inline double modification_rate(std::string_view x_clean, std::string_view x_adv) {
  const auto pairs = differing_sentences(x_clean, x_adv);
  if (pairs.empty()) return 0.0;
  double sum = 0;
  for (const auto& p : pairs) {
    const auto c = utf8::decode(p.clean);
    const auto a = utf8::decode(p.adv);
    sum += static_cast<double>(edit_distance(c, a)) / ((static_cast<double>(c.size()) + a.size()) / 2.0);
  }
  return sum / static_cast<double>(pairs.size());
}

/// Mean scorer value over differing sentence pairs; 1 when nothing changed.
inline double sentence_similarity(std::string_view x_clean, std::string_view x_adv, const SimilarityScorer& scorer) {
  const auto pairs = differing_sentences(x_clean, x_adv);
  if (pairs.empty()) return 1.0;
  double sum = 0;
  for (const auto& p : pairs) sum += scorer.score(p.clean, p.adv);
  return sum / static_cast<double>(pairs.size());
}

struct WilcoxonResult {
  double statistic = 0;  // W+, the rank sum of positive differences
  double p_value = 1;
  std::size_t n = 0;     // non-zero differences
  bool exact = false;
};

inline constexpr std::size_t kWilcoxonExactMax = 20;

namespace detail {

/// Ranks of |d| with ties averaged.
inline std::vector<double> average_ranks(const std::vector<double>& absd) {
  std::vector<std::size_t> idx(absd.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return absd[x] < absd[y]; });
  std::vector<double> ranks(absd.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && absd[idx[j + 1]] == absd[idx[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// P(W+ >= w) under the sign-flip null, by counting over doubled ranks.
inline double exact_upper_tail(const std::vector<double>& ranks, double w) {
  std::vector<std::size_t> twice;
  std::size_t total = 0;
  for (double r : ranks) {
    twice.push_back(static_cast<std::size_t>(std::llround(2 * r)));
    total += twice.back();
  }
  std::vector<double> dist(total + 1, 0.0);
  dist[0] = 1.0;
  std::size_t reach = 0;
  for (auto t : twice) {
    for (std::size_t s = reach + 1; s-- > 0;) {
      if (dist[s] != 0) dist[s + t] += dist[s];
    }
    reach += t;
  }
  const auto target = static_cast<std::size_t>(std::llround(2 * w));
  double tail = 0;
  for (std::size_t s = target; s <= total; ++s) tail += dist[s];
  return std::ldexp(tail, -static_cast<int>(ranks.size()));
}

}  // namespace detail

/// One-sided signed-rank test of post > pre. Zero differences are dropped;
/// exact for up to 20 remaining pairs, else normal with continuity and tie
/// corrections.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& pre, const std::vector<double>& post) {
  if (pre.size() != post.size()) throw Error("wilcoxon: samples differ in length");
  std::vector<double> d;
  for (std::size_t i = 0; i < pre.size(); ++i) {
    const double x = post[i] - pre[i];
    if (x != 0) d.push_back(x);
  }
  if (d.size() < 5) throw TooFewPairs("need at least 5 non-zero differences, have " + std::to_string(d.size()));
  std::vector<double> absd;
  for (double x : d) absd.push_back(std::fabs(x));
  const auto ranks = detail::average_ranks(absd);
  WilcoxonResult res;
  res.n = d.size();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0) res.statistic += ranks[i];
  }
  if (res.n <= kWilcoxonExactMax) {
    res.exact = true;
    res.p_value = std::min(1.0, detail::exact_upper_tail(ranks, res.statistic));
    return res;
  }
  const double n = static_cast<double>(res.n);
  const double mean = n * (n + 1) / 4;
  double tie = 0;
  auto sorted = absd;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie += t * t * t - t;
    i = j;
  }
  const double var = n * (n + 1) * (2 * n + 1) / 24 - tie / 48;
  if (var <= 0) {
    res.p_value = 1.0;
    return res;
  }
  const double z = (res.statistic - mean - 0.5) / std::sqrt(var);
  res.p_value = std::clamp(0.5 * std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
  return res;
}

struct RobustnessReport {
  std::string attack;
  std::size_t runs = 0;
  double asr = 0;
  double avg_score_shift = 0;
  double avg_pos_tag_shift = 0;
  double avg_neg_tag_shift = 0;
  double avg_queries = 0;
  std::optional<double> wilcoxon_stat;
  std::optional<double> p_value;
  double modification_rate = 0;
  double semantic_similarity = 0;
};

inline RobustnessReport robustness_report(const std::string& attack, const std::vector<AttackRun>& runs,
                                          double threshold, const SimilarityScorer& scorer) {
  if (runs.empty()) throw NoRuns("no attack runs for " + attack);
  RobustnessReport rep;
  rep.attack = attack;
  rep.runs = runs.size();
  rep.asr = asr(runs, threshold);
  std::vector<double> pre, post;
  for (const auto& r : runs) {
    rep.avg_score_shift += r.score_shift;
    const auto ts = tag_shift(r.clean_review, r.adv_review);
    rep.avg_pos_tag_shift += ts.pos;
    rep.avg_neg_tag_shift += ts.neg;
    rep.avg_queries += static_cast<double>(r.queries);
    const auto clean = reconstruct_clean(r.x_adv, r.perturbation_log);
    rep.modification_rate += modification_rate(clean, r.x_adv);
    rep.semantic_similarity += sentence_similarity(clean, r.x_adv, scorer);
    pre.push_back(total_score(r.clean_review.scores));
    post.push_back(total_score(r.adv_review.scores));
  }
  const double n = static_cast<double>(runs.size());
  rep.avg_score_shift /= n;
  rep.avg_pos_tag_shift /= n;
  rep.avg_neg_tag_shift /= n;
  rep.avg_queries /= n;
  rep.modification_rate /= n;
  rep.semantic_similarity /= n;
  try {
    const auto w = wilcoxon_signed_rank(pre, post);
    rep.wilcoxon_stat = w.statistic;
    rep.p_value = w.p_value;
  } catch (const TooFewPairs&) {
  }
  return rep;
}

struct QualityRow {
  std::string reviewer;
  PairMode pair_mode = PairMode::VsLLM;
  std::size_t n = 0;
  std::optional<double> acov;
  double rouge1 = 0;
  double rouge2 = 0;
  double rougeL = 0;
  double similarity = 0;
};

struct QualityReport {
  std::vector<QualityRow> rows;
  std::string scorer;
};

namespace detail {

inline double safe_rouge_n(std::string_view a, std::string_view b, std::size_t n) {
  try {
    return rouge_n(a, b, n);
  } catch (const TooShort&) {
    return 0.0;
  }
}

}  // namespace detail

/// Generated reviews against the human references of each paper (best over
/// references), plus human-human baselines.
inline QualityReport quality_report(const Dataset& ds, const std::map<std::string, ReviewResult>& generated,
                                    const std::string& reviewer, const SimilarityScorer& scorer,
                                    double across_rate = 0.1, std::uint64_t seed = 0) {
  QualityReport rep;
  rep.scorer = scorer.name();
  QualityRow llm;
  llm.reviewer = reviewer;
  double acov_sum = 0;
  std::size_t acov_n = 0;
  for (const auto& p : ds.papers) {
    auto it = generated.find(p.id);
    if (it == generated.end()) continue;
    if (it->second.has_tags) {
      acov_sum += acov(it->second.tags());
      ++acov_n;
    }
    std::vector<std::string> refs;
    for (const auto& h : p.human_reviews) refs.push_back(h.text);
    if (refs.empty()) continue;
    const auto text = it->second.text();
    llm.rouge1 += best_against_refs(text, refs, [](auto a, auto b) { return detail::safe_rouge_n(a, b, 1); });
    llm.rouge2 += best_against_refs(text, refs, [](auto a, auto b) { return detail::safe_rouge_n(a, b, 2); });
    llm.rougeL += best_against_refs(text, refs, [](auto a, auto b) { return rouge_l(a, b); });
    llm.similarity += best_against_refs(
        text, refs, [&](auto a, auto b) { return scorer.score(std::string(a), std::string(b)); });
    ++llm.n;
  }
  if (llm.n) {
    llm.rouge1 /= static_cast<double>(llm.n);
    llm.rouge2 /= static_cast<double>(llm.n);
    llm.rougeL /= static_cast<double>(llm.n);
    llm.similarity /= static_cast<double>(llm.n);
  }
  if (acov_n) llm.acov = acov_sum / static_cast<double>(acov_n);
  rep.rows.push_back(llm);

  for (auto mode : {PairMode::WithinPaper, PairMode::AcrossPaper}) {
    QualityRow row;
    row.reviewer = mode == PairMode::WithinPaper ? "Human (within-paper)" : "Human (across-paper)";
    row.pair_mode = mode;
    const auto pairs = build_pairs(ds, mode, mode == PairMode::WithinPaper ? 1.0 : across_rate, seed);
    for (const auto& pr : pairs) {
      row.rouge1 += detail::safe_rouge_n(pr.a, pr.b, 1);
      row.rouge2 += detail::safe_rouge_n(pr.a, pr.b, 2);
      row.rougeL += rouge_l(pr.a, pr.b);
      row.similarity += scorer.score(pr.a, pr.b);
    }
    row.n = pairs.size();
    if (row.n) {
      row.rouge1 /= static_cast<double>(row.n);
      row.rouge2 /= static_cast<double>(row.n);
      row.rougeL /= static_cast<double>(row.n);
      row.similarity /= static_cast<double>(row.n);
    }
    double hs = 0;
    std::size_t hn = 0;
    for (const auto& p : ds.papers) {
      for (const auto& h : p.human_reviews) {
        if (h.aspect_tags) {
          hs += acov(*h.aspect_tags);
          ++hn;
        }
      }
    }
    if (hn) row.acov = hs / static_cast<double>(hn);
    rep.rows.push_back(row);
  }
  return rep;
}

namespace detail {

inline std::string fmt(double v, int digits = 4) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

inline nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

}  // namespace detail

inline nlohmann::json to_json(const RobustnessReport& r) {
  return {{"attack", r.attack},
          {"runs", r.runs},
          {"asr", r.asr},
          {"avg_score_shift", r.avg_score_shift},
          {"avg_pos_tag_shift", r.avg_pos_tag_shift},
          {"avg_neg_tag_shift", r.avg_neg_tag_shift},
          {"avg_queries", r.avg_queries},
          {"wilcoxon_stat", detail::opt(r.wilcoxon_stat)},
          {"p_value", detail::opt(r.p_value)},
          {"modification_rate", r.modification_rate},
          {"semantic_similarity", r.semantic_similarity}};
}

inline nlohmann::json to_json(const QualityReport& q) {
  auto rows = nlohmann::json::array();
  for (const auto& r : q.rows) {
    rows.push_back({{"reviewer", r.reviewer},
                    {"pair_mode", std::string(pair_mode_name(r.pair_mode))},
                    {"n", r.n},
                    {"acov", detail::opt(r.acov)},
                    {"rouge1", r.rouge1},
                    {"rouge2", r.rouge2},
                    {"rougeL", r.rougeL},
                    {"similarity", r.similarity}});
  }
  return {{"scorer", q.scorer}, {"rows", rows}};
}

/// Attack | ASR | Score | #Pos | #Neg | #Queries | p
inline std::string robustness_markdown(const std::vector<RobustnessReport>& reps) {
  std::string out = "| Attack | ASR | Score | #Pos | #Neg | #Queries | p |\n|---|---|---|---|---|---|---|\n";
  for (const auto& r : reps) {
    out += "| " + r.attack + " | " + detail::fmt(r.asr, 2) + " | " + detail::fmt(r.avg_score_shift, 2) + " | " +
           detail::fmt(r.avg_pos_tag_shift, 2) + " | " + detail::fmt(r.avg_neg_tag_shift, 2) + " | " +
           detail::fmt(r.avg_queries, 1) + " | " + (r.p_value ? detail::fmt(*r.p_value, 4) : "n/a") + " |\n";
  }
  return out;
}

/// Attack | Modification Rate | Semantic Similarity
inline std::string modification_markdown(const std::vector<RobustnessReport>& reps) {
  std::string out = "| Attack | Modification Rate | Semantic Similarity |\n|---|---|---|\n";
  for (const auto& r : reps) {
    out += "| " + r.attack + " | " + detail::fmt(r.modification_rate) + " | " +
           detail::fmt(r.semantic_similarity) + " |\n";
  }
  return out;
}

inline std::string quality_markdown(const QualityReport& q) {
  std::string out = "| Reviewer | ACOV | R-1 | R-2 | R-L | Sim | n |\n|---|---|---|---|---|---|---|\n";
  for (const auto& r : q.rows) {
    out += "| " + r.reviewer + " | " + (r.acov ? detail::fmt(*r.acov) : "n/a") + " | " + detail::fmt(r.rouge1) +
           " | " + detail::fmt(r.rouge2) + " | " + detail::fmt(r.rougeL) + " | " + detail::fmt(r.similarity) +
           " | " + std::to_string(r.n) + " |\n";
  }
  return out;
}

}  // namespace paperattack

#endif  // PAPERATTACK_METRICS_HPP
