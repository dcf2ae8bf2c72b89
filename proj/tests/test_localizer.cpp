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

#include "paperattack/localizer.hpp"

namespace pa = paperattack;
using pa::Granularity;

namespace {

std::string slice(std::string_view text, const pa::ModifiableSpan& s) {
  const auto u = pa::utf8::decode(text);
  return pa::utf8::encode(std::u32string_view(u).substr(s.start, s.end - s.start));
}

}  // namespace

TEST(Localize, HandRunWordExample) {
  const std::string_view x = "the model improves accuracy on benchmarks";
  const auto m = pa::localize(x, "the model improves results", Granularity::Word, 3, "p");
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(slice(x, m.spans[0]), "the model improves");
  EXPECT_EQ(m.paper_id, "p");
}

TEST(Localize, VerbatimQuote) {
  const std::string_view x = "We study graphs. Our method scales linearly in the number of edges. It is simple.";
  const auto m = pa::localize(x, "The authors claim our method scales linearly in the number of edges, which is nice.",
                              Granularity::Word, 3);
  ASSERT_FALSE(m.empty());
  bool found = false;
  for (const auto& s : m.spans) found |= slice(x, s).find("method scales linearly in the number of edges") != std::string::npos;
  EXPECT_TRUE(found);
}

TEST(Localize, NoSharedWords) {
  const auto m = pa::localize("alpha beta gamma", "delta epsilon", Granularity::Word, 1);
  EXPECT_TRUE(m.empty());
}

TEST(Localize, MinRunFilters) {
  const auto m = pa::localize("a b c d e f", "a b x d e f", Granularity::Word, 3);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.spans[0].start, 6u);
}

TEST(Localize, DefaultsAndErrors) {
  EXPECT_EQ(pa::default_min_run(Granularity::Character), 10u);
  EXPECT_EQ(pa::default_min_run(Granularity::Word), 3u);
  EXPECT_THROW(pa::localize("a", "a", Granularity::Word, 0), pa::Error);
  EXPECT_THROW(pa::localize("  ", "a", Granularity::Word, 1), pa::EmptyInput);
}

TEST(Localize, CharacterSpansSnapToWords) {
  const std::string_view x = "prefix transformers are powerful suffix";
  const auto m = pa::localize(x, "xx ansformers are powerf yy", Granularity::Character, 10);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(slice(x, m.spans[0]), "transformers are powerful");
}

TEST(Localize, SentenceGranularityExtends) {
  const std::string_view x = "First one here. The model improves accuracy a lot. Last one.";
  const auto m = pa::localize(x, "I think the model improves things", Granularity::Sentence, 3);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(slice(x, m.spans[0]), "The model improves accuracy a lot.");
  EXPECT_EQ(m.granularity, Granularity::Sentence);
}

TEST(ExtendSentences, Cases) {
  const std::string_view x = "Alpha beta gamma. Delta epsilon zeta. Eta theta.";
  pa::ModifiableSpanSet mid{"p", Granularity::Word, {{6, 10, Granularity::Word, {}}}};
  auto e = pa::extend_sentence_spans(mid, x);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(slice(x, e.spans[0]), "Alpha beta gamma.");

  pa::ModifiableSpanSet straddle{"p", Granularity::Word, {{12, 24, Granularity::Word, {}}}};
  e = pa::extend_sentence_spans(straddle, x);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(slice(x, e.spans[0]), "Alpha beta gamma. Delta epsilon zeta.");

  auto again = pa::extend_sentence_spans(e, x);
  EXPECT_EQ(again, e);
}

TEST(SpanSet, CoversAndJson) {
  pa::ModifiableSpanSet s{"p", Granularity::Word, {{0, 5, Granularity::Word, {}}, {10, 20, Granularity::Word, {}}}};
  EXPECT_TRUE(s.covers(0, 5));
  EXPECT_TRUE(s.covers(12, 15));
  EXPECT_FALSE(s.covers(4, 11));
  EXPECT_FALSE(s.covers(6, 8));
  const auto j = pa::to_json(s);
  EXPECT_EQ(pa::span_set_from_json(j), s);
}

// Property: spans are sorted, disjoint, within bounds, and their word content
// occurs in the review in order.
TEST(LocalizeProperty, SpansAreOrderedAndInBounds) {
  std::mt19937_64 rng(5);
  const char* vocab[] = {"model", "data", "we", "show", "results", "improve", "the", "a", "graph", "loss"};
  for (int iter = 0; iter < 200; ++iter) {
    std::string x, r;
    for (int k = 0, n = 5 + static_cast<int>(rng() % 60); k < n; ++k) x += std::string(vocab[rng() % 10]) + (rng() % 7 ? " " : ". ");
    for (int k = 0, n = 1 + static_cast<int>(rng() % 30); k < n; ++k) r += std::string(vocab[rng() % 10]) + " ";
    for (auto g : {Granularity::Word, Granularity::Character, Granularity::Sentence}) {
      const auto m = pa::localize(x, r, g, g == Granularity::Character ? 10 : 2);
      std::size_t prev = 0;
      for (const auto& s : m.spans) {
        ASSERT_LT(s.start, s.end);
        ASSERT_GE(s.start, prev);
        ASSERT_LE(s.end, pa::utf8::length(x));
        prev = s.end;
      }
    }
  }
}
