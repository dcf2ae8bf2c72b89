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

#include <gtest/gtest.h>

#include "attack_fixture.hpp"
#include "edit_oracles.hpp"
#include "paperattack/search.hpp"

namespace pa = paperattack;
using testing_support::make_attack_fixture;

namespace {

pa::ReviewerClient mock_client(const pa::SensitivityProfile& p) {
  return pa::ReviewerClient(std::make_shared<pa::MockChatBackend>(p), {});
}

pa::AttackConfig synonym_config() {
  pa::AttackConfig c;
  c.attack = pa::AttackKind::SynonymSwap;
  c.top_k_words = 50;
  c.candidate_cap = 15;
  c.success_threshold = 1.0;
  return c;
}

pa::AttackProviders providers_for(const testing_support::AttackFixture& f) {
  pa::AttackProviders p;
  p.lexicon = std::make_shared<pa::SynonymLexicon>(f.lexicon);
  return p;
}

}  // namespace

TEST(Fixture, SpansCoverOnlyFocusSentence) {
  const auto f = make_attack_fixture(3);
  const auto client = mock_client(f.profile);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto x = pa::clean_content(f.dataset.papers[i]);
    const auto spans = testing_support::afl_spans(client, f.dataset.papers[i]);
    ASSERT_EQ(spans.size(), 1u);
    const auto u = pa::utf8::decode(x);
    const auto text = pa::utf8::encode(std::u32string_view(u).substr(spans.spans[0].start, spans.spans[0].end - spans.spans[0].start));
    EXPECT_EQ(text + ".", testing_support::focus_sentence(testing_support::kSources[i]));
  }
}

TEST(Rank, TriggerRanksFirst) {
  const auto f = make_attack_fixture(1);
  const auto client = mock_client(f.profile);
  const auto& paper = f.dataset.papers[0];
  const auto x = pa::clean_content(paper);
  const auto spans = testing_support::afl_spans(client, paper);
  const auto r = pa::rank_word_importance(client, x, spans, synonym_config());
  ASSERT_FALSE(r.words.empty());
  EXPECT_EQ(r.words[0].text, "robust");
  EXPECT_DOUBLE_EQ(r.importance[0], 1.0);
  // baseline plus one probe per eligible span word
  EXPECT_EQ(r.queries, 1 + r.words.size());
  // ties keep document order
  for (std::size_t k = 2; k < r.words.size(); ++k) EXPECT_LT(r.words[k - 1].start, r.words[k].start);
}

TEST(Rank, StopwordOnlySpans) {
  const auto client = mock_client({});
  const std::string x = "it is the one and only way";
  pa::ModifiableSpanSet spans{"p", pa::Granularity::Word, {{0, 9, pa::Granularity::Word, {}}}};
  EXPECT_THROW(pa::rank_word_importance(client, x, spans, synonym_config()), pa::NoEligibleWords);
}

TEST(Rank, BudgetGivesPartialRanking) {
  const auto f = make_attack_fixture(1);
  const auto client = mock_client(f.profile);
  const auto x = pa::clean_content(f.dataset.papers[0]);
  auto cfg = synonym_config();
  cfg.query_budget = 3;
  const auto r = pa::rank_word_importance(client, x, pa::full_document_spans(x, "p", pa::Granularity::Word), cfg);
  EXPECT_TRUE(r.budget_exhausted);
  EXPECT_EQ(r.words.size(), 2u);
  EXPECT_EQ(r.queries, 3u);
}

TEST(Greedy, PlantedTriggerSucceeds) {
  const auto f = make_attack_fixture(1);
  const auto client = mock_client(f.profile);
  const auto& paper = f.dataset.papers[0];
  const auto x = pa::clean_content(paper);
  const auto spans = testing_support::afl_spans(client, paper);
  const auto run = pa::greedy_attack(client, x, spans, synonym_config(), providers_for(f));
  EXPECT_TRUE(run.success);
  EXPECT_GE(run.score_shift, 1.0);
  ASSERT_EQ(run.perturbation_log.size(), 1u);
  EXPECT_EQ(run.perturbation_log[0].original, "robust");
  EXPECT_EQ(run.perturbation_log[0].replacement, "sturdy");
  EXPECT_EQ(run.queries, run.baseline_queries + run.probe_queries + run.candidate_queries);
  EXPECT_EQ(run.baseline_queries, 1u);
  EXPECT_EQ(run.candidate_queries, 5u);
  EXPECT_FALSE(run.budget_exhausted);
  EXPECT_TRUE(pa::log_within_spans(x, run.perturbation_log, spans));
  EXPECT_EQ(pa::reconstruct_clean(run.x_adv, run.perturbation_log), x);
  EXPECT_EQ(run.adv_review.raw, pa::mock_review(run.x_adv, f.profile).raw);
}

TEST(Greedy, BudgetTwoIsExhausted) {
  const auto f = make_attack_fixture(1);
  const auto client = mock_client(f.profile);
  const auto x = pa::clean_content(f.dataset.papers[0]);
  auto cfg = synonym_config();
  cfg.query_budget = 2;
  const auto run = pa::greedy_attack(client, x, testing_support::afl_spans(client, f.dataset.papers[0]), cfg,
                                     providers_for(f));
  EXPECT_TRUE(run.budget_exhausted);
  EXPECT_FALSE(run.success);
  EXPECT_EQ(run.queries, 2u);
  EXPECT_TRUE(run.perturbation_log.empty());
}

TEST(Greedy, FullDocumentUsesMoreQueries) {
  const auto f = make_attack_fixture(1);
  const auto client = mock_client(f.profile);
  const auto& paper = f.dataset.papers[0];
  const auto x = pa::clean_content(paper);
  const auto spans = testing_support::afl_spans(client, paper);
  auto cfg = synonym_config();
  cfg.query_budget = 1000;
  const auto afl = pa::greedy_attack(client, x, spans, cfg, providers_for(f));
  cfg.localization = pa::Localization::FullDocument;
  const auto full = pa::greedy_attack(client, x, spans, cfg, providers_for(f));
  EXPECT_EQ(afl.success, full.success);
  EXPECT_GE(full.queries, afl.queries);
  EXPECT_GT(full.probe_queries, 60u);
}

TEST(Greedy, Deterministic) {
  const auto f = make_attack_fixture(2);
  const auto client = mock_client(f.profile);
  for (auto kind : {pa::AttackKind::DeepWordBugLike, pa::AttackKind::PuncAttackLike, pa::AttackKind::SynonymSwap}) {
    auto cfg = synonym_config();
    cfg.attack = kind;
    cfg.seed = 42;
    const auto& paper = f.dataset.papers[1];
    const auto x = pa::clean_content(paper);
    const auto spans = testing_support::afl_spans(client, paper);
    const auto a = pa::greedy_attack(client, x, spans, cfg, providers_for(f));
    const auto b = pa::greedy_attack(client, x, spans, cfg, providers_for(f));
    EXPECT_EQ(pa::to_json(a).dump(), pa::to_json(b).dump());
    EXPECT_TRUE(pa::log_within_spans(x, a.perturbation_log, spans));
  }
}

TEST(Greedy, CharAttackEditsStayOneEditAndInSpans) {
  pa::SensitivityProfile p;
  p.triggers.push_back({"signal", pa::ScoreAspect::Clarity, -2, std::nullopt});
  p.focus = {"signal"};
  const auto client = mock_client(p);
  const std::string x = "Alpha beta gamma. The signal processing pipeline is elaborate. Delta epsilon.";
  const auto spans = pa::localize(x, client.review_text(x).text(), pa::Granularity::Character, 10, "c");
  auto cfg = synonym_config();
  cfg.attack = pa::AttackKind::DeepWordBugLike;
  cfg.granularity = pa::Granularity::Character;
  const auto run = pa::greedy_attack(client, x, spans, cfg);
  EXPECT_TRUE(run.success);
  ASSERT_FALSE(run.perturbation_log.empty());
  EXPECT_EQ(run.perturbation_log[0].original, "signal");
  EXPECT_TRUE(testing_support::is_one_char_edit("signal", run.perturbation_log[0].replacement));
  EXPECT_TRUE(pa::log_within_spans(x, run.perturbation_log, spans));
}

TEST(Greedy, MissingProviderIsConfigError) {
  const auto f = make_attack_fixture(1);
  const auto client = mock_client(f.profile);
  const auto x = pa::clean_content(f.dataset.papers[0]);
  EXPECT_THROW(pa::greedy_attack(client, x, testing_support::afl_spans(client, f.dataset.papers[0]), synonym_config()),
               pa::ConfigError);
}

namespace {

class EchoRewriter : public pa::SentenceRewriter {
 public:
  std::string rewrite(const std::string& s) const override { return s; }
  std::string name() const override { return "echo"; }
};

}  // namespace

TEST(Bruteforce, RewriteTripsTrigger) {
  pa::SensitivityProfile p;
  p.triggers.push_back({"likewise", pa::ScoreAspect::Originality, 2, std::nullopt});
  p.focus = {"method"};
  const auto client = mock_client(p);
  const std::string x = "We collect data. The method can also be used for graphs. Results follow.";
  const auto spans = pa::localize(x, client.review_text(x).text(), pa::Granularity::Sentence, 3, "b");
  ASSERT_EQ(spans.size(), 1u);
  pa::AttackConfig cfg;
  cfg.attack = pa::AttackKind::StyleRewrite;
  cfg.granularity = pa::Granularity::Sentence;
  const auto run = pa::sentence_bruteforce_attack(client, x, spans, cfg);
  EXPECT_TRUE(run.success);
  ASSERT_EQ(run.perturbation_log.size(), 1u);
  EXPECT_EQ(run.perturbation_log[0].original, "The method can also be used for graphs.");
  EXPECT_EQ(run.queries, 2u);
  EXPECT_TRUE(pa::log_within_spans(x, run.perturbation_log, spans));
}

TEST(Bruteforce, EchoRewriterChangesNothing) {
  const auto client = mock_client({});
  const std::string x = "One sentence here. Another sentence there.";
  pa::AttackConfig cfg;
  cfg.attack = pa::AttackKind::StyleRewrite;
  cfg.granularity = pa::Granularity::Sentence;
  cfg.localization = pa::Localization::FullDocument;
  pa::AttackProviders prov;
  prov.rewriter = std::make_shared<EchoRewriter>();
  const auto run = pa::sentence_bruteforce_attack(client, x, {"e", pa::Granularity::Sentence, {}}, cfg, prov);
  EXPECT_TRUE(run.perturbation_log.empty());
  EXPECT_EQ(run.score_shift, 0.0);
  EXPECT_EQ(run.x_adv, x);
}

TEST(Bruteforce, KeepsNonDecreasingRewritesOnly) {
  pa::SensitivityProfile p;
  p.triggers.push_back({"verily", pa::ScoreAspect::Clarity, -1, std::nullopt});
  p.triggers.push_back({"behold", pa::ScoreAspect::Clarity, -1, std::nullopt});
  p.triggers.push_back({"lo", pa::ScoreAspect::Clarity, -1, std::nullopt});
  const auto client = mock_client(p);
  const std::string x = "One sentence here. Another sentence there.";
  pa::AttackConfig cfg;
  cfg.attack = pa::AttackKind::StyleRewrite;
  cfg.granularity = pa::Granularity::Sentence;
  cfg.localization = pa::Localization::FullDocument;
  auto run = pa::sentence_bruteforce_attack(client, x, {"k", pa::Granularity::Sentence, {}}, cfg);
  EXPECT_TRUE(run.perturbation_log.empty());
  EXPECT_EQ(run.queries, 3u);
  cfg.replace_all = true;
  run = pa::sentence_bruteforce_attack(client, x, {"k", pa::Granularity::Sentence, {}}, cfg);
  EXPECT_EQ(run.perturbation_log.size(), 2u);
  EXPECT_EQ(run.score_shift, -2.0);
}

TEST(Search, TotalScoreShift) {
  std::vector<pa::AttackRun> runs(2);
  runs[0].score_shift = 2;
  runs[1].score_shift = 3;
  EXPECT_EQ(pa::total_score_shift(runs), 5.0);
  runs[0].score_shift = runs[1].score_shift = 0;
  EXPECT_EQ(pa::total_score_shift(runs), 0.0);
}

TEST(Search, RunJsonRoundTrip) {
  const auto f = make_attack_fixture(1);
  const auto client = mock_client(f.profile);
  const auto x = pa::clean_content(f.dataset.papers[0]);
  const auto run = pa::greedy_attack(client, x, testing_support::afl_spans(client, f.dataset.papers[0]),
                                     synonym_config(), providers_for(f));
  const auto back = pa::attack_run_from_json(pa::to_json(run));
  EXPECT_EQ(pa::to_json(back).dump(), pa::to_json(run).dump());
}

TEST(Search, ConfigParsingAndValidation) {
  EXPECT_EQ(pa::parse_attack("deepwordbug"), pa::AttackKind::DeepWordBugLike);
  EXPECT_THROW(pa::parse_attack("nope"), pa::ConfigError);
  EXPECT_EQ(pa::default_granularity(pa::AttackKind::StyleRewrite), pa::Granularity::Sentence);
  const auto c = pa::attack_config_from_json({{"attack", "puncattack"}, {"query_budget", 60}});
  EXPECT_EQ(c.granularity, pa::Granularity::Character);
  EXPECT_EQ(c.query_budget, 60u);
  EXPECT_EQ(pa::attack_config_from_json(pa::to_json(c)), c);
  auto bad = c;
  bad.candidate_cap = 16;
  EXPECT_THROW(bad.validate(), pa::ConfigError);
}
