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

#include <random>

#include "edit_oracles.hpp"
#include "paperattack/perturb.hpp"
#include "support.hpp"

namespace pa = paperattack;
using pa::Unit;

namespace {

Unit unit(const std::string& w, std::size_t start = 0) { return {w, start, start + pa::utf8::length(w)}; }

bool contains(const pa::CandidateSet& s, const std::string& r) {
  for (const auto& c : s.candidates) {
    if (c.replacement == r) return true;
  }
  return false;
}

}  // namespace

TEST(CharCandidates, ConjunctionOneEditVariants) {
  const auto s = pa::char_candidates(unit("conjunction"), 3);
  EXPECT_EQ(s.size(), 15u);
  for (const auto& c : s.candidates) {
    EXPECT_TRUE(testing_support::is_one_char_edit("conjunction", c.replacement)) << c.replacement;
    EXPECT_EQ(c.kind, pa::PerturbKind::CharEdit);
  }
  // the interior-insertion pool is always represented
  bool insertion = false;
  for (const auto& c : s.candidates) insertion |= pa::utf8::length(c.replacement) == 12;
  EXPECT_TRUE(insertion);
}

TEST(CharCandidates, InsertionPoolContainsTableExample) {
  const auto s = pa::char_candidates(unit("conjunction"), 3, 10000);
  EXPECT_TRUE(contains(s, "conjufnction"));
}

TEST(CharCandidates, TooShort) {
  EXPECT_THROW(pa::char_candidates(unit("ab"), 1), pa::WordTooShort);
}

TEST(CharCandidates, Deterministic) {
  const auto a = pa::char_candidates(unit("representation", 40), 17);
  const auto b = pa::char_candidates(unit("representation", 40), 17);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.candidates[i], b.candidates[i]);
}

TEST(PunctCandidates, Conjunction) {
  const auto s = pa::punct_candidates(unit("conjunction"), 1, 10000);
  EXPECT_TRUE(contains(s, "c&onjunction"));
  for (const auto& c : s.candidates) EXPECT_TRUE(testing_support::is_one_punct_insert("conjunction", c.replacement));
  EXPECT_LE(pa::punct_candidates(unit("conjunction"), 1).size(), 15u);
  EXPECT_THROW(pa::punct_candidates(unit("a"), 1), pa::WordTooShort);
}

TEST(WordCandidates, Lexicon) {
  const auto lex = pa::SynonymLexicon::parse("model\tparagon,framework,Model,exemplar\n");
  const auto s = pa::word_candidates(unit("model"), lex, 2);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.candidates[0].replacement, "paragon");
  EXPECT_EQ(s.candidates[1].replacement, "framework");
  EXPECT_EQ(s.candidates[0].kind, pa::PerturbKind::SynonymSwap);
  const auto t = pa::word_candidates(unit("model"), lex, 3);
  EXPECT_EQ(t.candidates[2].replacement, "exemplar");
  EXPECT_THROW(pa::word_candidates(unit("absent"), lex, 2), pa::UnknownWord);
  EXPECT_THROW(pa::word_candidates(unit("model"), lex, 16), pa::Error);
}

TEST(WordCandidates, CasingReapplied) {
  const auto lex = pa::SynonymLexicon::parse("model\tparagon\n");
  EXPECT_EQ(pa::word_candidates(unit("Model"), lex, 1).candidates[0].replacement, "Paragon");
  EXPECT_EQ(pa::word_candidates(unit("MODEL"), lex, 1).candidates[0].replacement, "PARAGON");
}

TEST(WordCandidates, MultiTokenDropped) {
  const auto lex = pa::SynonymLexicon::parse("model\tgood example,paragon\n");
  const auto s = pa::word_candidates(unit("model"), lex, 2);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.candidates[0].replacement, "paragon");
}

TEST(WordCandidates, EmbeddingMutualNeighbours) {
  const auto t = pa::EmbeddingTable::parse("3 2\nimplicit 1 0.1\nexplicit 1 0.12\ngraph 0 1\n");
  const auto s = pa::word_candidates(unit("implicit"), t, 1);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.candidates[0].replacement, "explicit");
  EXPECT_EQ(s.candidates[0].kind, pa::PerturbKind::EmbeddingSwap);
}

TEST(RewriteSentence, Builtin) {
  const pa::RuleRewriter r;
  const auto p = pa::rewrite_sentence(unit("The model can also be used."), r);
  EXPECT_NE(p.replacement, p.original);
  EXPECT_EQ(p.kind, pa::PerturbKind::SentenceRewrite);
}

namespace {

class EchoRewriter : public pa::SentenceRewriter {
 public:
  std::string rewrite(const std::string& s) const override { return " " + s + " "; }
  std::string name() const override { return "echo"; }
};

}  // namespace

TEST(RewriteSentence, EchoIsEmptyRewrite) {
  EXPECT_THROW(pa::rewrite_sentence(unit("Same text."), EchoRewriter{}), pa::EmptyRewrite);
}

TEST(Apply, ReplacesOnlySlice) {
  const std::string doc = "the model works";
  const pa::Perturbation p{4, 9, "model", "paragon", pa::PerturbKind::SynonymSwap};
  EXPECT_EQ(pa::apply(std::string_view(doc), p), "the paragon works");
  EXPECT_EQ(p.delta(), 2);
  EXPECT_EQ(pa::apply(std::string_view("the paragon works"), pa::inverse(p)), doc);
}

TEST(Apply, StaleAndOutOfBounds) {
  const pa::Perturbation stale{4, 9, "mode1", "x", pa::PerturbKind::SynonymSwap};
  EXPECT_THROW(pa::apply(std::string_view("the model works"), stale), pa::StaleSpan);
  const pa::Perturbation oob{10, 30, "x", "y", pa::PerturbKind::SynonymSwap};
  EXPECT_THROW(pa::apply(std::string_view("the model works"), oob), pa::OutOfBounds);
}

TEST(Similarity, Cases) {
  const pa::OverlapScorer s;
  EXPECT_TRUE(pa::similarity_ok("a b c", "a b c", s, 1.0));
  EXPECT_FALSE(pa::similarity_ok("alpha beta", "gamma delta", s, 0.01));
  std::string orig, adv;
  for (int i = 0; i < 20; ++i) {
    const std::string w = "word" + std::string(1, static_cast<char>('a' + i));
    orig += w + " ";
    adv += (i == 7 ? std::string("swapped") : w) + " ";
  }
  // 19 shared of 20 distinct: cosine 19/20
  EXPECT_NEAR(s.score(orig, adv), 0.95, 1e-12);
  EXPECT_TRUE(pa::similarity_ok(orig, adv, s, 0.8));
}

TEST(Spans, GuardAndShift) {
  pa::ModifiableSpanSet set{"p", pa::Granularity::Word, {{4, 9, pa::Granularity::Word, {}}, {20, 30, pa::Granularity::Word, {}}}};
  const pa::Perturbation inside{4, 9, "model", "paragon", pa::PerturbKind::SynonymSwap};
  EXPECT_NO_THROW(pa::guard_span(inside, set));
  EXPECT_THROW(pa::guard_span(pa::Perturbation{10, 12, "ab", "cd", pa::PerturbKind::CharEdit}, set),
               pa::SpanViolation);
  pa::shift_spans(set, inside);
  EXPECT_EQ(set.spans[0].end, 11u);
  EXPECT_EQ(set.spans[1].start, 22u);
  EXPECT_EQ(set.spans[1].end, 32u);
}

TEST(Eligibility, Words) {
  EXPECT_TRUE(pa::eligible_word("model"));
  EXPECT_FALSE(pa::eligible_word("the"));
  EXPECT_FALSE(pa::eligible_word("ab"));
  EXPECT_FALSE(pa::eligible_word("2024"));
  EXPECT_FALSE(pa::eligible_word("However"));
}

TEST(PerturbationJson, RoundTrip) {
  const pa::Perturbation p{3, 8, "model", "paragon", pa::PerturbKind::EmbeddingSwap};
  EXPECT_EQ(pa::perturbation_from_json(pa::to_json(p)), p);
}

// Property: disjoint perturbations commute.
TEST(PerturbProperty, DisjointApplyCommutes) {
  std::mt19937_64 rng(31);
  for (int iter = 0; iter < 300; ++iter) {
    std::string doc;
    for (int k = 0; k < 12; ++k) doc += testing_support::random_word(rng, 3, 8) + " ";
    const auto words = pa::words_of(std::string_view(doc));
    std::size_t i = rng() % words.size();
    std::size_t j = rng() % words.size();
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    const pa::Perturbation p{words[i].start, words[i].end, words[i].text, testing_support::random_word(rng, 1, 9),
                             pa::PerturbKind::SynonymSwap};
    const pa::Perturbation q{words[j].start, words[j].end, words[j].text, testing_support::random_word(rng, 1, 9),
                             pa::PerturbKind::SynonymSwap};
    // q first leaves p's offsets untouched; p first shifts q by p's delta
    const auto a = pa::apply(std::string_view(pa::apply(std::string_view(doc), q)), p);
    auto q_shifted = q;
    q_shifted.span_start = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(q.span_start) + p.delta());
    q_shifted.span_end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(q.span_end) + p.delta());
    const auto b = pa::apply(std::string_view(pa::apply(std::string_view(doc), p)), q_shifted);
    ASSERT_EQ(a, b);
  }
}

// Property: every generated candidate satisfies its edit contract and the
// cap, for random words and seeds.
TEST(PerturbProperty, CandidateContracts) {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 400; ++iter) {
    auto w = testing_support::random_word(rng, 3, 14);
    if (rng() % 3 == 0) w[0] = static_cast<char>(std::toupper(w[0]));
    const auto seed = rng();
    for (const auto& c : pa::char_candidates(unit(w), seed).candidates) {
      ASSERT_TRUE(testing_support::is_one_char_edit(w, c.replacement)) << w << " -> " << c.replacement;
    }
    const auto ps = pa::punct_candidates(unit(w), seed);
    ASSERT_LE(ps.size(), 15u);
    for (const auto& c : ps.candidates) ASSERT_TRUE(testing_support::is_one_punct_insert(w, c.replacement));
  }
}
