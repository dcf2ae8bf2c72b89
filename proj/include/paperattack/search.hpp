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

// Black-box score-inflation search.
//
// Greedy engines rank the eligible words inside the modifiable spans by how
// much deleting each one lowers the total score, then walk the ranking and
// keep, per word, the candidate with the largest strictly positive shift. The
// sentence engine rewrites span sentences one at a time and keeps any rewrite
// that does not lower the total. Every reviewer call, including parse retries,
// counts against the per-paper query budget.

#ifndef PAPERATTACK_SEARCH_HPP
#define PAPERATTACK_SEARCH_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "paperattack/errors.hpp"
#include "paperattack/localizer.hpp"
#include "paperattack/perturb.hpp"
#include "paperattack/providers.hpp"
#include "paperattack/review_format.hpp"
#include "paperattack/reviewer.hpp"
#include "paperattack/segmenter.hpp"
#include "paperattack/utf8.hpp"

namespace paperattack {

enum class AttackKind { DeepWordBugLike, PuncAttackLike, SynonymSwap, EmbeddingSwap, StyleRewrite };

inline constexpr std::array<AttackKind, 5> kAllAttackKinds = {AttackKind::DeepWordBugLike, AttackKind::PuncAttackLike,
                                                               AttackKind::SynonymSwap, AttackKind::EmbeddingSwap,
                                                               AttackKind::StyleRewrite};

inline std::string_view attack_name(AttackKind a) {
  switch (a) {
    case AttackKind::DeepWordBugLike:
      return "deepwordbug";
    case AttackKind::PuncAttackLike:
      return "puncattack";
    case AttackKind::SynonymSwap:
      return "synonym";
    case AttackKind::EmbeddingSwap:
      return "embedding";
    case AttackKind::StyleRewrite:
      return "style";
  }
  return "?";
}

inline AttackKind parse_attack(std::string_view s) {
  for (auto a : kAllAttackKinds) {
    if (attack_name(a) == s) return a;
  }
  throw ConfigError("unknown attack: " + std::string(s));
}

/// Span granularity each engine works at unless configured otherwise.
inline Granularity default_granularity(AttackKind a) {
  switch (a) {
    case AttackKind::DeepWordBugLike:
    case AttackKind::PuncAttackLike:
      return Granularity::Character;
    case AttackKind::StyleRewrite:
      return Granularity::Sentence;
    default:
      return Granularity::Word;
  }
}

enum class Localization { AFL, FullDocument };

inline std::string_view localization_name(Localization l) { return l == Localization::AFL ? "afl" : "full"; }

inline Localization parse_localization(std::string_view s) {
  if (s == "afl") return Localization::AFL;
  if (s == "full") return Localization::FullDocument;
  throw ConfigError("unknown localization: " + std::string(s));
}

struct AttackConfig {
  AttackKind attack = AttackKind::SynonymSwap;
  Granularity granularity = Granularity::Word;
  std::size_t top_k_words = 50;
  std::size_t candidate_cap = kDefaultCandidateCap;
  double success_threshold = 1.0;
  std::size_t query_budget = 120;
  std::size_t min_run = 0;  // 0: granularity default
  std::uint64_t seed = 0;
  Localization localization = Localization::AFL;
  bool stop_on_success = true;
  /// With stop_on_success, stop once the run has succeeded and this many
  /// consecutive candidate queries brought no improvement.
  std::size_t patience = 5;
  double similarity_threshold = 0.8;
  /// Sentence engine only: keep every rewrite regardless of its effect.
  bool replace_all = false;

  std::size_t effective_min_run() const { return min_run ? min_run : default_min_run(granularity); }

  void validate() const {
    if (top_k_words < 1) throw ConfigError("top_k_words must be >= 1");
    if (!(success_threshold > 0)) throw ConfigError("success_threshold must be > 0");
    if (query_budget < 2) throw ConfigError("query_budget must be >= 2");
    if (candidate_cap < 1 || candidate_cap > kDefaultCandidateCap) {
      throw ConfigError("candidate_cap must be in [1, " + std::to_string(kDefaultCandidateCap) + "]");
    }
  }

  friend bool operator==(const AttackConfig&, const AttackConfig&) = default;
};

inline nlohmann::json to_json(const AttackConfig& c) {
  return {{"attack", std::string(attack_name(c.attack))},
          {"granularity", std::string(granularity_name(c.granularity))},
          {"top_k_words", c.top_k_words},
          {"candidate_cap", c.candidate_cap},
          {"success_threshold", c.success_threshold},
          {"query_budget", c.query_budget},
          {"min_run", c.min_run},
          {"seed", c.seed},
          {"localization", std::string(localization_name(c.localization))},
          {"stop_on_success", c.stop_on_success},
          {"patience", c.patience},
          {"similarity_threshold", c.similarity_threshold},
          {"replace_all", c.replace_all}};
}

/// Reads the keys present in `j` over the values already in `base`.
inline AttackConfig attack_config_from_json(const nlohmann::json& j, AttackConfig base = {}) {
  if (j.contains("attack")) {
    base.attack = parse_attack(j.at("attack").get<std::string>());
    if (!j.contains("granularity")) base.granularity = default_granularity(base.attack);
  }
  if (j.contains("granularity")) base.granularity = parse_granularity(j.at("granularity").get<std::string>());
  base.top_k_words = j.value("top_k_words", base.top_k_words);
  base.candidate_cap = j.value("candidate_cap", base.candidate_cap);
  base.success_threshold = j.value("success_threshold", base.success_threshold);
  base.query_budget = j.value("query_budget", base.query_budget);
  base.min_run = j.value("min_run", base.min_run);
  base.seed = j.value("seed", base.seed);
  if (j.contains("localization")) base.localization = parse_localization(j.at("localization").get<std::string>());
  base.stop_on_success = j.value("stop_on_success", base.stop_on_success);
  base.patience = j.value("patience", base.patience);
  base.similarity_threshold = j.value("similarity_threshold", base.similarity_threshold);
  base.replace_all = j.value("replace_all", base.replace_all);
  return base;
}

struct AttackProviders {
  std::shared_ptr<const SynonymLexicon> lexicon;
  std::shared_ptr<const EmbeddingTable> embeddings;
  std::shared_ptr<const SentenceRewriter> rewriter = std::make_shared<RuleRewriter>();
  std::shared_ptr<const SimilarityScorer> scorer = std::make_shared<OverlapScorer>();
};

struct AttackRun {
  std::string paper_id;
  AttackConfig config;
  ReviewResult clean_review;
  ReviewResult adv_review;
  std::string x_adv;
  std::vector<Perturbation> perturbation_log;
  std::size_t queries = 0;
  std::size_t baseline_queries = 0;
  std::size_t probe_queries = 0;
  std::size_t candidate_queries = 0;
  bool success = false;
  double score_shift = 0;
  bool budget_exhausted = false;

  const AspectScores& clean_scores() const { return clean_review.scores; }
  const AspectScores& adv_scores() const { return adv_review.scores; }

  friend bool operator==(const AttackRun&, const AttackRun&) = default;
};

/// Σ of per-run score shifts.
inline double total_score_shift(const std::vector<AttackRun>& runs) {
  double s = 0;
  for (const auto& r : runs) s += r.score_shift;
  return s;
}

/// Undoes the perturbation log on x_adv.
inline std::string reconstruct_clean(std::string_view x_adv, const std::vector<Perturbation>& log) {
  auto doc = utf8::decode(x_adv);
  for (auto it = log.rbegin(); it != log.rend(); ++it) paperattack::apply(doc, inverse(*it));
  return utf8::encode(doc);
}

/// One span over the whole document.
inline ModifiableSpanSet full_document_spans(std::string_view doc, std::string paper_id, Granularity g) {
  const auto n = utf8::length(doc);
  ModifiableSpanSet s{std::move(paper_id), g, {}};
  if (n > 0) s.spans.push_back(ModifiableSpan{0, n, g, MatchRun{0, n, 0, 0, 0, 0, 0}});
  return s;
}

struct WordRanking {
  std::vector<Unit> words;
  std::vector<double> importance;
  std::size_t queries = 0;
  bool budget_exhausted = false;
};

namespace detail {

enum class Phase { Baseline, Probe, Candidate };

struct QueryMeter {
  std::size_t budget = 0;
  std::size_t baseline = 0;
  std::size_t probes = 0;
  std::size_t candidates = 0;
  bool exhausted = false;

  std::size_t used() const { return baseline + probes + candidates; }
  std::size_t remaining() const { return budget > used() ? budget - used() : 0; }

  void charge(Phase p, std::size_t n) {
    (p == Phase::Baseline ? baseline : p == Phase::Probe ? probes : candidates) += n;
  }
};

/// Reviews `doc` within the remaining budget. Returns nullopt when the budget
/// runs out or, outside the baseline, when the output cannot be parsed.
inline std::optional<ReviewResult> query(const ReviewerClient& client, std::u32string_view doc, QueryMeter& m,
                                         Phase phase) {
  if (m.remaining() == 0) {
    m.exhausted = true;
    return std::nullopt;
  }
  std::size_t used = 0;
  try {
    auto r = client.review_text(utf8::encode(doc), m.remaining(), &used);
    m.charge(phase, used);
    return r;
  } catch (const BudgetExhausted&) {
    m.charge(phase, used);
    m.exhausted = true;
    return std::nullopt;
  } catch (const ParseFailure&) {
    m.charge(phase, used);
    if (phase == Phase::Baseline) throw;
    return std::nullopt;
  } catch (...) {
    m.charge(phase, used);
    throw;
  }
}

/// Removes the word and one adjacent whitespace character.
inline std::u32string delete_word(std::u32string_view doc, const Unit& w) {
  std::size_t b = w.start;
  std::size_t e = w.end;
  if (e < doc.size() && utf8::is_space(doc[e])) {
    ++e;
  } else if (b > 0 && utf8::is_space(doc[b - 1])) {
    --b;
  }
  std::u32string out(doc.substr(0, b));
  out.append(doc.substr(e));
  return out;
}

inline std::vector<Unit> eligible_words(std::u32string_view doc, const ModifiableSpanSet& spans) {
  std::vector<Unit> out;
  for (auto& w : words_of(doc)) {
    if (eligible_word(w.text) && spans.covers(w.start, w.end)) out.push_back(std::move(w));
  }
  return out;
}

inline WordRanking rank(const ReviewerClient& client, std::u32string_view doc, const ModifiableSpanSet& spans,
                        const AttackConfig& cfg, int baseline_total, QueryMeter& m) {
  auto words = eligible_words(doc, spans);
  if (words.empty()) throw NoEligibleWords("no eligible words inside the modifiable spans");
  std::vector<std::size_t> order;
  std::vector<double> imp;
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto r = query(client, delete_word(doc, words[i]), m, Phase::Probe);
    if (!r) {
      if (m.exhausted) break;
      continue;
    }
    order.push_back(i);
    imp.push_back(static_cast<double>(baseline_total - total_score(r->scores)));
  }
  std::vector<std::size_t> idx(order.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return imp[x] > imp[y]; });
  WordRanking out;
  out.budget_exhausted = m.exhausted;
  for (std::size_t k = 0; k < idx.size() && k < cfg.top_k_words; ++k) {
    out.words.push_back(words[order[idx[k]]]);
    out.importance.push_back(imp[idx[k]]);
  }
  return out;
}

inline CandidateSet candidates_for(const Unit& w, const AttackConfig& cfg, const AttackProviders& prov) {
  switch (cfg.attack) {
    case AttackKind::DeepWordBugLike:
      return char_candidates(w, cfg.seed, cfg.candidate_cap);
    case AttackKind::PuncAttackLike:
      return punct_candidates(w, cfg.seed, cfg.candidate_cap);
    case AttackKind::SynonymSwap:
      if (!prov.lexicon) throw ConfigError("synonym attack needs a lexicon");
      return word_candidates(w, *prov.lexicon, cfg.candidate_cap);
    case AttackKind::EmbeddingSwap:
      if (!prov.embeddings) throw ConfigError("embedding attack needs an embedding table");
      return word_candidates(w, *prov.embeddings, cfg.candidate_cap);
    case AttackKind::StyleRewrite:
      break;
  }
  throw ConfigError("attack is not a word-level engine");
}

inline ModifiableSpanSet working_spans(std::string_view x_clean, const ModifiableSpanSet& spans,
                                       const AttackConfig& cfg) {
  if (cfg.localization == Localization::FullDocument) {
    return full_document_spans(x_clean, spans.paper_id, cfg.granularity);
  }
  return spans;
}

/// Stop-on-success bookkeeping shared by both engines.
struct StopRule {
  const AttackConfig& cfg;
  std::size_t stale = 0;

  /// Records one evaluated candidate; true when the search should stop.
  bool after_query(int committed_total, int clean_total, int candidate_total) {
    if (candidate_total > committed_total) {
      stale = 0;
      return false;
    }
    if (committed_total - clean_total >= cfg.success_threshold) ++stale;
    return cfg.stop_on_success && stale >= cfg.patience;
  }
};

inline void finish(AttackRun& run, const QueryMeter& m, std::u32string_view doc) {
  run.x_adv = utf8::encode(doc);
  run.baseline_queries = m.baseline;
  run.probe_queries = m.probes;
  run.candidate_queries = m.candidates;
  run.queries = m.used();
  run.budget_exhausted = m.exhausted;
  run.score_shift = static_cast<double>(total_score(run.adv_review.scores) - total_score(run.clean_review.scores));
  run.success = run.score_shift >= run.config.success_threshold;
}

}  // namespace detail

/// Ranks eligible words in the spans by deletion importance. One query for the
/// baseline plus one per probed word; a partial ranking is returned with
/// `budget_exhausted` set when the budget runs out.
inline WordRanking rank_word_importance(const ReviewerClient& client, std::string_view doc,
                                        const ModifiableSpanSet& spans, const AttackConfig& cfg) {
  cfg.validate();
  if (spans.empty()) throw NoEligibleWords("empty span set");
  const auto d = utf8::decode(doc);
  detail::QueryMeter m{cfg.query_budget};
  auto base = detail::query(client, d, m, detail::Phase::Baseline);
  if (!base) return WordRanking{{}, {}, m.used(), true};
  auto r = detail::rank(client, d, spans, cfg, total_score(base->scores), m);
  r.queries = m.used();
  return r;
}

inline AttackRun greedy_attack(const ReviewerClient& client, std::string_view x_clean, const ModifiableSpanSet& spans,
                               const AttackConfig& cfg, const AttackProviders& providers = {}) {
  cfg.validate();
  if (cfg.attack == AttackKind::StyleRewrite) throw ConfigError("greedy search needs a word- or char-level attack");
  AttackRun run;
  run.paper_id = spans.paper_id;
  run.config = cfg;
  auto doc = utf8::decode(x_clean);
  auto cur_spans = detail::working_spans(x_clean, spans, cfg);
  detail::QueryMeter m{cfg.query_budget};

  auto clean = detail::query(client, doc, m, detail::Phase::Baseline);
  if (!clean) {
    detail::finish(run, m, doc);
    return run;
  }
  run.clean_review = *clean;
  run.adv_review = *clean;
  const int clean_total = total_score(clean->scores);
  int committed = clean_total;

  WordRanking ranking;
  try {
    ranking = detail::rank(client, doc, cur_spans, cfg, clean_total, m);
  } catch (const NoEligibleWords&) {
    detail::finish(run, m, doc);
    return run;
  }

  // Ranked offsets refer to x_clean; earlier accepted edits shift them.
  std::vector<std::pair<std::size_t, std::ptrdiff_t>> shifts;
  auto current_start = [&](std::size_t clean_start) {
    std::ptrdiff_t d = 0;
    for (const auto& [at, delta] : shifts) {
      if (at < clean_start) d += delta;
    }
    return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(clean_start) + d);
  };

  detail::StopRule stop{cfg};
  bool stopped = m.exhausted;
  for (const auto& clean_word : ranking.words) {
    if (stopped) break;
    Unit w = clean_word;
    w.start = current_start(clean_word.start);
    w.end = w.start + clean_word.size();

    CandidateSet set;
    try {
      set = detail::candidates_for(w, cfg, providers);
    } catch (const WordTooShort&) {
      continue;
    } catch (const UnknownWord&) {
      continue;
    }
    const auto sentence = sentence_of(w.start, std::u32string_view(doc));
    std::optional<Perturbation> best;
    std::optional<ReviewResult> best_review;
    int best_total = committed;
    for (const auto& p : set.candidates) {
      guard_span(p, cur_spans);
      if (providers.scorer && p.span_start >= sentence.start && p.span_end <= sentence.end) {
        auto s = utf8::decode(sentence.text);
        s.replace(p.span_start - sentence.start, p.span_end - p.span_start, utf8::decode(p.replacement));
        if (!similarity_ok(sentence.text, utf8::encode(s), *providers.scorer, cfg.similarity_threshold)) continue;
      }
      auto cand = doc;
      paperattack::apply(cand, p);
      auto r = detail::query(client, cand, m, detail::Phase::Candidate);
      if (!r) {
        if (m.exhausted) {
          stopped = true;
          break;
        }
        continue;
      }
      const int t = total_score(r->scores);
      const bool halt = stop.after_query(best_total, clean_total, t);
      if (t > best_total) {
        best_total = t;
        best = p;
        best_review = std::move(*r);
      }
      if (halt) {
        stopped = true;
        break;
      }
    }
    if (best) {
      paperattack::apply(doc, *best);
      shift_spans(cur_spans, *best);
      shifts.emplace_back(clean_word.start, best->delta());
      run.perturbation_log.push_back(*best);
      run.adv_review = std::move(*best_review);
      committed = best_total;
    }
  }
  detail::finish(run, m, doc);
  return run;
}

/// Rewrites span sentences in order, keeping rewrites that do not lower the
/// total score (all rewrites with `replace_all`). At most one query per
/// sentence plus the baseline.
inline AttackRun sentence_bruteforce_attack(const ReviewerClient& client, std::string_view x_clean,
                                            const ModifiableSpanSet& spans, const AttackConfig& cfg,
                                            const AttackProviders& providers = {}) {
  cfg.validate();
  if (cfg.attack != AttackKind::StyleRewrite) throw ConfigError("sentence search needs the style attack");
  if (!providers.rewriter) throw RewriterUnavailable("no sentence rewriter configured");
  AttackRun run;
  run.paper_id = spans.paper_id;
  run.config = cfg;
  auto doc = utf8::decode(x_clean);
  auto cur_spans = extend_sentence_spans(detail::working_spans(x_clean, spans, cfg), std::u32string_view(doc));
  detail::QueryMeter m{cfg.query_budget};

  auto clean = detail::query(client, doc, m, detail::Phase::Baseline);
  if (!clean) {
    detail::finish(run, m, doc);
    return run;
  }
  run.clean_review = *clean;
  run.adv_review = *clean;
  const int clean_total = total_score(clean->scores);
  int committed = clean_total;

  std::vector<Unit> targets;
  if (!detail::only_space(doc)) {
    for (auto& s : split(std::u32string_view(doc), Granularity::Sentence)) {
      if (cur_spans.covers(s.start, s.end)) targets.push_back(std::move(s));
    }
  }

  std::ptrdiff_t offset = 0;  // sentences are disjoint and visited left to right
  detail::StopRule stop{cfg};
  for (const auto& clean_sentence : targets) {
    Unit s = clean_sentence;
    s.start = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s.start) + offset);
    s.end = s.start + clean_sentence.size();
    Perturbation p;
    try {
      p = rewrite_sentence(s, *providers.rewriter);
    } catch (const EmptyRewrite&) {
      continue;
    }
    guard_span(p, cur_spans);
    auto cand = doc;
    paperattack::apply(cand, p);
    auto r = detail::query(client, cand, m, detail::Phase::Candidate);
    if (!r) {
      if (m.exhausted) break;
      continue;
    }
    const int t = total_score(r->scores);
    const bool keep = cfg.replace_all || t >= committed;
    const bool halt = stop.after_query(committed, clean_total, t);
    if (keep) {
      doc = std::move(cand);
      shift_spans(cur_spans, p);
      offset += p.delta();
      run.perturbation_log.push_back(std::move(p));
      run.adv_review = std::move(*r);
      committed = t;
    }
    if (halt) break;
  }
  detail::finish(run, m, doc);
  return run;
}

inline AttackRun run_attack(const ReviewerClient& client, std::string_view x_clean, const ModifiableSpanSet& spans,
                            const AttackConfig& cfg, const AttackProviders& providers = {}) {
  if (cfg.attack == AttackKind::StyleRewrite) return sentence_bruteforce_attack(client, x_clean, spans, cfg, providers);
  return greedy_attack(client, x_clean, spans, cfg, providers);
}

inline nlohmann::json to_json(const AttackRun& r) {
  auto log = nlohmann::json::array();
  for (const auto& p : r.perturbation_log) log.push_back(to_json(p));
  return {{"paper_id", r.paper_id},
          {"config", to_json(r.config)},
          {"clean_scores", to_json(r.clean_review.scores)},
          {"adv_scores", to_json(r.adv_review.scores)},
          {"clean_review", to_json(r.clean_review)},
          {"adv_review", to_json(r.adv_review)},
          {"x_adv", r.x_adv},
          {"perturbation_log", log},
          {"queries", r.queries},
          {"baseline_queries", r.baseline_queries},
          {"probe_queries", r.probe_queries},
          {"candidate_queries", r.candidate_queries},
          {"success", r.success},
          {"score_shift", r.score_shift},
          {"budget_exhausted", r.budget_exhausted}};
}

inline AttackRun attack_run_from_json(const nlohmann::json& j) {
  AttackRun r;
  r.paper_id = j.at("paper_id").get<std::string>();
  r.config = attack_config_from_json(j.at("config"));
  r.clean_review = review_result_from_json(j.at("clean_review"));
  r.adv_review = review_result_from_json(j.at("adv_review"));
  r.x_adv = j.at("x_adv").get<std::string>();
  for (const auto& p : j.at("perturbation_log")) r.perturbation_log.push_back(perturbation_from_json(p));
  r.queries = j.at("queries").get<std::size_t>();
  r.baseline_queries = j.value("baseline_queries", std::size_t{0});
  r.probe_queries = j.value("probe_queries", std::size_t{0});
  r.candidate_queries = j.value("candidate_queries", std::size_t{0});
  r.success = j.at("success").get<bool>();
  r.score_shift = j.at("score_shift").get<double>();
  r.budget_exhausted = j.value("budget_exhausted", false);
  return r;
}

}  // namespace paperattack

#endif  // PAPERATTACK_SEARCH_HPP
