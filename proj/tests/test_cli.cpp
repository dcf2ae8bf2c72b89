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

#include <spdlog/spdlog.h>

#include "attack_fixture.hpp"
#include "mock_endpoint.hpp"
#include "paperattack/cli.hpp"
#include "support.hpp"

namespace pa = paperattack;
namespace cli = paperattack::cli;
namespace fs = std::filesystem;
using testing_support::read_file;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

struct Workspace {
  TempDir dir;
  testing_support::AttackFixture fixture;
  cli::RunConfig cfg;

  explicit Workspace(std::size_t papers = 3) : fixture(testing_support::make_attack_fixture(papers)) {
    spdlog::set_level(spdlog::level::warn);
    pa::save_dataset(fixture.dataset, dir / "data.json");
    write_file(dir / "profile.json", fixture.profile_json.dump());
    write_file(dir / "lexicon.tsv", fixture.lexicon_tsv);
    cfg.dataset = (dir / "data.json").string();
    cfg.mock_profile = (dir / "profile.json").string();
    cfg.providers.lexicon = (dir / "lexicon.tsv").string();
    cfg.out_dir = (dir / "out").string();
    cfg.attack.top_k_words = 5;
  }
};

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return out;
}

std::map<std::string, std::string> without_cache(std::map<std::string, std::string> files) {
  std::erase_if(files, [](const auto& kv) { return kv.first.rfind("cache", 0) == 0; });
  return files;
}

}  // namespace

TEST(Config, MissingDatasetIsConfigError) {
  cli::RunConfig c;
  c.dataset = "/nonexistent/data.json";
  EXPECT_THROW(cli::Session{c}, pa::ConfigError);
  c.dataset.clear();
  EXPECT_THROW(cli::Session{c}, pa::ConfigError);
}

TEST(Config, FileThenEnvPrecedence) {
  TempDir d;
  write_file(d / "c.json", R"({"dataset": "a.json", "workers": 3, "attack": {"query_budget": 40}})");
  auto c = cli::load_config_file(d / "c.json");
  EXPECT_EQ(c.dataset, "a.json");
  EXPECT_EQ(c.workers, 3u);
  EXPECT_EQ(c.attack.query_budget, 40u);
  auto env = [](const char* name) -> const char* {
    if (std::string_view(name) == "PAPERATTACK_DATASET") return "b.json";
    if (std::string_view(name) == "PAPERATTACK_WORKERS") return "5";
    return nullptr;
  };
  c = cli::apply_env(c, env);
  EXPECT_EQ(c.dataset, "b.json");
  EXPECT_EQ(c.workers, 5u);
}

TEST(Config, UndefinedVariableIsConfigError) {
  nlohmann::json j = {{"dataset", "${PAPERATTACK_SURELY_UNDEFINED_VAR}"}};
  EXPECT_THROW(cli::config_from_json(j), pa::ConfigError);
}

TEST(Config, BadValues) {
  Workspace w;
  w.cfg.attack.query_budget = 1;
  EXPECT_THROW(cli::Session{w.cfg}, pa::ConfigError);
  EXPECT_THROW(cli::parse_backend("carrier-pigeon"), pa::ConfigError);
}

TEST(Review, MockReviewsArePersistedAndDeterministic) {
  Workspace w;
  cli::Session s(w.cfg);
  ASSERT_EQ(cli::cmd_review(s), cli::kOk);
  for (const auto& p : w.fixture.dataset.papers) {
    const auto j = cli::read_json(s.layout().review(p.id));
    EXPECT_EQ(j.at("paper_id"), p.id);
    const auto r = pa::review_result_from_json(j.at("review"));
    EXPECT_EQ(pa::total_score(r.scores), 41);  // base 5 x 8 plus the source trigger
  }
  EXPECT_TRUE(fs::exists(s.layout().reports() / "quality.json"));
  EXPECT_TRUE(fs::exists(s.layout().reports() / "quality.md"));

  const auto first = without_cache(snapshot(w.cfg.out_dir));
  w.cfg.force = true;
  cli::Session again(w.cfg);
  ASSERT_EQ(cli::cmd_review(again), cli::kOk);
  EXPECT_EQ(without_cache(snapshot(w.cfg.out_dir)), first);
}

TEST(Review, ExistingReviewsAreNotRequeried) {
  Workspace w;
  {
    cli::Session s(w.cfg);
    ASSERT_EQ(cli::cmd_review(s), cli::kOk);
    EXPECT_EQ(s.cache().live_calls(), 3u);
  }
  cli::Session s(w.cfg);
  ASSERT_EQ(cli::cmd_review(s), cli::kOk);
  EXPECT_EQ(s.cache().live_calls(), 0u);
}

TEST(Localize, RerunIsByteIdentical) {
  Workspace w;
  {
    cli::Session s(w.cfg);
    ASSERT_EQ(cli::cmd_localize(s), cli::kOk);
  }
  const auto first = snapshot(fs::path(w.cfg.out_dir) / "spans");
  ASSERT_EQ(first.size(), 3u);
  w.cfg.force = true;
  cli::Session s(w.cfg);
  ASSERT_EQ(cli::cmd_localize(s), cli::kOk);
  EXPECT_EQ(snapshot(fs::path(w.cfg.out_dir) / "spans"), first);
  const auto spans = pa::span_set_from_json(cli::read_json(s.layout().spans(pa::Granularity::Word, "syn0")));
  EXPECT_EQ(spans.size(), 1u);
}

TEST(Attack, EndToEndPersistsRuns) {
  Workspace w;
  cli::Session s(w.cfg);
  ASSERT_EQ(cli::cmd_attack(s), cli::kOk);
  for (const auto& p : w.fixture.dataset.papers) {
    const auto run = pa::attack_run_from_json(cli::read_json(s.layout().run(w.cfg.attack, p.id)));
    EXPECT_TRUE(run.success) << p.id;
    EXPECT_EQ(run.score_shift, 1.0);
    EXPECT_EQ(pa::reconstruct_clean(run.x_adv, run.perturbation_log), pa::clean_content(p));
  }
}

TEST(Attack, ResumeLeavesCompletedRunsUntouched) {
  Workspace w;
  {
    cli::Session s(w.cfg);
    ASSERT_EQ(cli::cmd_attack(s), cli::kOk);
  }
  cli::Session s(w.cfg);
  const auto done = s.layout().run(w.cfg.attack, "syn0");
  const auto removed = s.layout().run(w.cfg.attack, "syn1");
  // A sentinel proves the completed file is skipped, not rewritten.
  write_file(done, read_file(done) + " ");
  const auto sentinel = read_file(done);
  fs::remove(removed);
  ASSERT_EQ(cli::cmd_attack(s), cli::kOk);
  EXPECT_EQ(read_file(done), sentinel);
  EXPECT_TRUE(fs::exists(removed));
}

TEST(Attack, BudgetExhaustionIsPersisted) {
  Workspace w(1);
  w.cfg.attack.query_budget = 2;
  cli::Session s(w.cfg);
  ASSERT_EQ(cli::cmd_attack(s), cli::kOk);
  const auto j = cli::read_json(s.layout().run(w.cfg.attack, "syn0"));
  EXPECT_TRUE(j.at("budget_exhausted").get<bool>());
  EXPECT_EQ(j.at("queries").get<std::size_t>(), 2u);
}

TEST(Attack, FullDocumentUsesSeparateDirectory) {
  Workspace w(1);
  w.cfg.attack.localization = pa::Localization::FullDocument;
  cli::Session s(w.cfg);
  ASSERT_EQ(cli::cmd_attack(s), cli::kOk);
  EXPECT_EQ(s.layout().runs(w.cfg.attack).filename(), "synonym_full");
  EXPECT_TRUE(fs::exists(s.layout().run(w.cfg.attack, "syn0")));
}

TEST(Report, AsrFromPersistedShifts) {
  Workspace w(4);
  cli::Session s(w.cfg);
  ASSERT_EQ(cli::cmd_attack(s), cli::kOk);
  const std::vector<double> shifts = {2, 0.5, -1, 1};
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    const auto path = s.layout().run(w.cfg.attack, "syn" + std::to_string(i));
    auto j = cli::read_json(path);
    j["score_shift"] = shifts[i];
    cli::write_json_atomic(path, j);
  }
  ASSERT_EQ(cli::cmd_report(s), cli::kOk);
  const auto rep = cli::read_json(s.layout().reports() / "report.json");
  ASSERT_EQ(rep.at("attacks").size(), 1u);
  EXPECT_DOUBLE_EQ(rep.at("attacks")[0].at("asr").get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(rep.at("attacks")[0].at("avg_score_shift").get<double>(), 0.625);
  EXPECT_EQ(rep.at("provenance").at("runs_sha256").size(), 4u);
}

TEST(Report, EmptyRunDirectoryIsNoData) {
  Workspace w(1);
  cli::Session s(w.cfg);
  EXPECT_EQ(cli::cmd_report(s), cli::kNoData);
  fs::create_directories(s.layout().runs(w.cfg.attack));
  EXPECT_EQ(cli::cmd_report(s), cli::kNoData);
}

TEST(Report, MarkdownColumnOrder) {
  Workspace w(2);
  cli::Session s(w.cfg);
  ASSERT_EQ(cli::cmd_attack(s), cli::kOk);
  ASSERT_EQ(cli::cmd_report(s), cli::kOk);
  const auto md = read_file(s.layout().reports() / "report.md");
  EXPECT_NE(md.find("| Attack | ASR | Score | #Pos | #Neg | #Queries | p |"), std::string::npos);
  EXPECT_NE(md.find("| Attack | Modification Rate | Semantic Similarity |"), std::string::npos);
  EXPECT_NE(md.find("| synonym | 1.00 | 1.00 |"), std::string::npos);
  EXPECT_LT(md.find("## Robustness"), md.find("## Modification"));
}

TEST(Metrics, NoReviewsIsNoData) {
  Workspace w(1);
  cli::Session s(w.cfg);
  EXPECT_EQ(cli::cmd_metrics(s), cli::kNoData);
  ASSERT_EQ(cli::cmd_review(s), cli::kOk);
  EXPECT_EQ(cli::cmd_metrics(s), cli::kOk);
}

TEST(Batch, FailuresAreCollected) {
  const auto failed = cli::for_each_paper(10, 4, [](std::size_t i) {
    if (i % 3 == 0) throw std::runtime_error("boom");
  });
  EXPECT_EQ(failed, (std::vector<std::size_t>{0, 3, 6, 9}));
}

TEST(Replay, RecordedSessionReplaysWithoutLiveCalls) {
  Workspace w(2);
  testing_support::MockEndpoint endpoint(w.fixture.profile);
  w.cfg.backend = cli::Backend::Http;
  w.cfg.reviewer.endpoint = endpoint.url();
  std::map<std::string, std::string> live;
  {
    cli::Session s(w.cfg);
    ASSERT_EQ(cli::cmd_review(s), cli::kOk);
    ASSERT_EQ(cli::cmd_attack(s), cli::kOk);
    ASSERT_EQ(cli::cmd_report(s), cli::kOk);
    EXPECT_GT(endpoint.hits(), 0u);
    EXPECT_EQ(s.cache().live_calls(), endpoint.hits());
    live = snapshot(s.layout().reports());
  }
  const auto recorded = endpoint.hits();

  w.cfg.backend = cli::Backend::Replay;
  w.cfg.force = true;
  cli::Session s(w.cfg);
  ASSERT_EQ(cli::cmd_review(s), cli::kOk);
  ASSERT_EQ(cli::cmd_attack(s), cli::kOk);
  ASSERT_EQ(cli::cmd_report(s), cli::kOk);
  EXPECT_EQ(s.cache().live_calls(), 0u);
  EXPECT_GT(s.cache().replay_calls(), 0u);
  EXPECT_EQ(endpoint.hits(), recorded);
  EXPECT_EQ(snapshot(s.layout().reports()), live);
}

TEST(Replay, MissWithoutBackendFails) {
  Workspace w(1);
  w.cfg.backend = cli::Backend::Replay;
  cli::Session s(w.cfg);
  EXPECT_EQ(cli::cmd_review(s), cli::kPartialFailure);
}
