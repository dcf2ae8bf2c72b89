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

#include <CLI11.hpp>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "paperattack/cli.hpp"

namespace {

using namespace paperattack;
using namespace paperattack::cli;

struct Flags {
  std::string config;
  std::optional<std::string> dataset, out, cache_dir, backend, mock_profile;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  bool force = false;
  bool verbose = false;

  std::optional<std::string> prompt_mode, model, endpoint;
  std::optional<std::string> attack, localization, granularity;
  std::optional<std::size_t> budget, top_k, candidates, min_run;
  std::optional<double> threshold;
  std::optional<std::string> lexicon, embeddings, rewriter_url, scorer_url;
};

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) c = load_config_file(f.config);
  c = apply_env(std::move(c));
  if (f.dataset) c.dataset = *f.dataset;
  if (f.out) c.out_dir = *f.out;
  if (f.cache_dir) c.cache_dir = *f.cache_dir;
  if (f.backend) c.backend = parse_backend(*f.backend);
  if (f.mock_profile) c.mock_profile = *f.mock_profile;
  if (f.workers) c.workers = *f.workers;
  if (f.seed) c.seed = c.attack.seed = *f.seed;
  c.force = f.force;
  if (f.prompt_mode) c.reviewer.prompt_mode = parse_prompt_mode(*f.prompt_mode);
  if (f.model) c.reviewer.model = *f.model;
  if (f.endpoint) c.reviewer.endpoint = *f.endpoint;
  if (f.attack) {
    c.attack.attack = parse_attack(*f.attack);
    if (!f.granularity) c.attack.granularity = default_granularity(c.attack.attack);
  }
  if (f.localization) c.attack.localization = parse_localization(*f.localization);
  if (f.granularity) c.attack.granularity = parse_granularity(*f.granularity);
  if (f.budget) c.attack.query_budget = *f.budget;
  if (f.top_k) c.attack.top_k_words = *f.top_k;
  if (f.candidates) c.attack.candidate_cap = *f.candidates;
  if (f.min_run) c.attack.min_run = *f.min_run;
  if (f.threshold) c.attack.success_threshold = *f.threshold;
  if (f.lexicon) c.providers.lexicon = *f.lexicon;
  if (f.embeddings) c.providers.embeddings = *f.embeddings;
  if (f.rewriter_url) c.providers.rewriter_url = *f.rewriter_url;
  if (f.scorer_url) c.providers.scorer_url = *f.scorer_url;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluate and attack LLM paper reviewers"};
  app.require_subcommand(1);
  Flags f;

  app.add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--dataset", f.dataset, "Dataset JSON");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--cache-dir", f.cache_dir, "Reviewer response cache");
  app.add_option("--backend", f.backend, "mock, http or replay");
  app.add_option("--mock-profile", f.mock_profile, "Sensitivity profile for the mock reviewer");
  app.add_option("--workers", f.workers, "Papers processed in parallel");
  app.add_option("--seed", f.seed, "Seed for candidate generation and sampling");
  app.add_flag("--force", f.force, "Overwrite existing artifacts");
  app.add_flag("-v,--verbose", f.verbose, "Debug logging");
  app.add_option("--prompt-mode", f.prompt_mode, "tagged or untagged");
  app.add_option("--model", f.model, "Reviewer model name");
  app.add_option("--endpoint", f.endpoint, "Chat completions URL");

  auto* review = app.add_subcommand("review", "Generate and persist reviews, then score them against human reviews");
  auto* localize = app.add_subcommand("localize", "Persist modifiable spans for each paper");
  auto* attack = app.add_subcommand("attack", "Run the configured attack on each paper");
  auto* metrics = app.add_subcommand("metrics", "Quality report from persisted reviews");
  auto* report = app.add_subcommand("report", "Robustness and quality reports from persisted runs");

  for (auto* sub : {localize, attack}) {
    sub->add_option("--granularity", f.granularity, "character, word or sentence");
    sub->add_option("--min-run", f.min_run, "Minimum matched run length");
  }
  attack->add_option("--attack", f.attack, "deepwordbug, puncattack, synonym, embedding or style");
  attack->add_option("--localization", f.localization, "afl or full");
  attack->add_option("--budget", f.budget, "Query budget per paper");
  attack->add_option("--top-k", f.top_k, "Ranked words to try");
  attack->add_option("--candidates", f.candidates, "Candidates per word");
  attack->add_option("--threshold", f.threshold, "Score shift counted as success");
  attack->add_option("--lexicon", f.lexicon, "Synonym lexicon file");
  attack->add_option("--embeddings", f.embeddings, "Embedding table file");
  attack->add_option("--rewriter-url", f.rewriter_url, "Sentence rewriter endpoint");
  for (auto* sub : {attack, report, review, metrics}) sub->add_option("--scorer-url", f.scorer_url, "Similarity endpoint");
  report->add_option("--threshold", f.threshold, "Score shift counted as success");

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("paperattack");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(f.verbose ? spdlog::level::debug : spdlog::level::info);

  std::unique_ptr<Session> session;
  try {
    session = std::make_unique<Session>(resolve(f));
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  }

  try {
    if (*review) return cmd_review(*session);
    if (*localize) return cmd_localize(*session);
    if (*attack) return cmd_attack(*session);
    if (*metrics) return cmd_metrics(*session);
    if (*report) return cmd_report(*session);
  } catch (const NoRuns& e) {
    spdlog::error("{}", e.what());
    return kNoData;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kPartialFailure;
  }
  return kOk;
}
