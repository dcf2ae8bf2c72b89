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

#include <thread>

#include "paperattack/reviewer.hpp"
#include "parse_fixtures.hpp"
#include "support.hpp"

namespace pa = paperattack;
using testing_support::TempDir;

namespace {

// Replies from a fixed script, one entry per call; the last entry repeats.
class ScriptedBackend : public pa::ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> script) : script_(std::move(script)) {}
  std::string complete(const pa::ChatRequest&, std::size_t attempt) override {
    attempts.push_back(attempt);
    const auto i = std::min(calls++, script_.size() - 1);
    return script_[i];
  }
  std::size_t calls = 0;
  std::vector<std::size_t> attempts;

 private:
  std::vector<std::string> script_;
};

pa::PaperDocument fixture_paper() {
  return {"p1", {{"Intro", "We study remarkable graphs."}, {"Results", "Accuracy improves."}}, std::nullopt, {}};
}

pa::SensitivityProfile profile() {
  pa::SensitivityProfile p;
  p.triggers.push_back({"remarkable", pa::ScoreAspect::Overall, 2, std::nullopt});
  return p;
}

}  // namespace

TEST(Reviewer, MockIsDeterministicOneQuery) {
  pa::ReviewerClient client(std::make_shared<pa::MockChatBackend>(profile()), {});
  const auto a = client.review(fixture_paper());
  const auto b = client.review(fixture_paper());
  EXPECT_EQ(a.queries_consumed, 1u);
  EXPECT_EQ(a.raw, b.raw);
  EXPECT_EQ(a.scores[pa::ScoreAspect::Overall], 7);
  EXPECT_EQ(client.queries(), 2u);
}

TEST(Reviewer, RetryAccounting) {
  auto backend = std::make_shared<ScriptedBackend>(
      std::vector<std::string>{"garbage", "still garbage", testing_support::case_study_response()});
  pa::ReviewerClient client(backend, {});
  const auto r = client.review(fixture_paper());
  EXPECT_EQ(r.queries_consumed, 3u);
  EXPECT_EQ(pa::total_score(r.scores), 56);
  EXPECT_EQ(backend->attempts, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Reviewer, RetriesExhaustedRethrowsParseFailure) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"garbage"});
  pa::ReviewerClient client(backend, {});
  std::size_t used = 0;
  EXPECT_THROW(client.review_text("Some body.", pa::kUnlimited, &used), pa::ParseFailure);
  EXPECT_EQ(used, 3u);
}

TEST(Reviewer, BudgetLimitsAttempts) {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"garbage"});
  pa::ReviewerClient client(backend, {});
  std::size_t used = 0;
  EXPECT_THROW(client.review_text("Some body.", 2, &used), pa::BudgetExhausted);
  EXPECT_EQ(used, 2u);
  EXPECT_EQ(backend->calls, 2u);
}

TEST(Reviewer, EmptyDocument) {
  pa::ReviewerClient client(std::make_shared<pa::MockChatBackend>(profile()), {});
  EXPECT_THROW(client.review_text(" \n"), pa::EmptyInput);
}

TEST(Reviewer, ConfigValidation) {
  pa::ReviewerConfig c;
  c.temperature = -1;
  EXPECT_THROW(pa::ReviewerClient(std::make_shared<pa::MockChatBackend>(profile()), c), pa::ConfigError);
}

TEST(Cache, ReplayIsIdenticalWithoutInner) {
  TempDir dir;
  auto mock = std::make_shared<pa::MockChatBackend>(profile());
  auto live = std::make_shared<pa::CachingBackend>(mock, dir.path());
  const auto first = pa::ReviewerClient(live, {}).review(fixture_paper());
  EXPECT_EQ(live->live_calls(), 1u);

  auto replay = std::make_shared<pa::CachingBackend>(nullptr, dir.path());
  const auto again = pa::ReviewerClient(replay, {}).review(fixture_paper());
  EXPECT_EQ(again.raw, first.raw);
  EXPECT_EQ(again.scores.scores, first.scores.scores);
  EXPECT_EQ(replay->live_calls(), 0u);
  EXPECT_EQ(replay->replay_calls(), 1u);
  EXPECT_EQ(mock->calls(), 1u);
}

TEST(Cache, MissWithoutInnerIsEndpointError) {
  TempDir dir;
  auto replay = std::make_shared<pa::CachingBackend>(nullptr, dir.path());
  EXPECT_THROW(pa::ReviewerClient(replay, {}).review(fixture_paper()), pa::EndpointError);
}

TEST(Cache, KeyDependsOnAttemptAndRequest) {
  pa::ReviewerClient client(std::make_shared<pa::MockChatBackend>(profile()), {});
  const auto req = client.request_for("Body one.");
  EXPECT_NE(pa::CachingBackend::key_of(req, 0), pa::CachingBackend::key_of(req, 1));
  EXPECT_NE(pa::CachingBackend::key_of(req, 0), pa::CachingBackend::key_of(client.request_for("Body two."), 0));
  EXPECT_EQ(pa::CachingBackend::key_of(req, 0), pa::CachingBackend::key_of(client.request_for("Body one."), 0));
}

TEST(Cache, RetriesAreCachedPerAttempt) {
  TempDir dir;
  auto scripted = std::make_shared<ScriptedBackend>(
      std::vector<std::string>{"garbage", testing_support::case_study_response()});
  auto live = std::make_shared<pa::CachingBackend>(scripted, dir.path());
  EXPECT_EQ(pa::ReviewerClient(live, {}).review(fixture_paper()).queries_consumed, 2u);
  auto replay = std::make_shared<pa::CachingBackend>(nullptr, dir.path());
  const auto r = pa::ReviewerClient(replay, {}).review(fixture_paper());
  EXPECT_EQ(r.queries_consumed, 2u);
  EXPECT_EQ(replay->replay_calls(), 2u);
}

TEST(Cache, QueryCountMatchesCallLog) {
  TempDir dir;
  auto cache = std::make_shared<pa::CachingBackend>(std::make_shared<pa::MockChatBackend>(profile()), dir.path());
  pa::ReviewerClient client(cache, {});
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&client, t] {
      for (int k = 0; k < 5; ++k) client.review_text("Document " + std::to_string(t * 10 + k % 3) + ".");
    });
  }
  for (auto& th : pool) th.join();
  EXPECT_EQ(client.queries(), 20u);
  EXPECT_EQ(cache->call_log().size(), 20u);
  EXPECT_EQ(cache->live_calls() + cache->replay_calls(), 20u);
}
