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

// Run configuration and the review / localize / attack / metrics / report
// commands. Artifacts live under the output directory:
//
//   reviews/{dataset}/{paper_id}.json
//   spans/{dataset}/{granularity}/{paper_id}.json
//   runs/{dataset}/{attack}[_full]/{paper_id}.json
//   reports/{dataset}/{quality,report}.{json,md}
//
// Existing artifacts are never overwritten without `force`; rerunning a
// command therefore resumes where an interrupted run stopped.

#ifndef PAPERATTACK_CLI_HPP
#define PAPERATTACK_CLI_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "paperattack/corpus.hpp"
#include "paperattack/errors.hpp"
#include "paperattack/hashing.hpp"
#include "paperattack/http.hpp"
#include "paperattack/localizer.hpp"
#include "paperattack/metrics.hpp"
#include "paperattack/mock_reviewer.hpp"
#include "paperattack/providers.hpp"
#include "paperattack/reviewer.hpp"
#include "paperattack/search.hpp"
#include "paperattack/version.hpp"

namespace paperattack::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kConfigError = 1, kPartialFailure = 2, kNoData = 3 };

enum class Backend { Mock, Http, Replay };

inline std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Mock:
      return "mock";
    case Backend::Http:
      return "http";
    case Backend::Replay:
      return "replay";
  }
  return "?";
}

inline Backend parse_backend(std::string_view s) {
  if (s == "mock") return Backend::Mock;
  if (s == "http") return Backend::Http;
  if (s == "replay") return Backend::Replay;
  throw ConfigError("unknown backend: " + std::string(s));
}

struct ProviderConfig {
  std::string lexicon;
  std::string embeddings;
  std::string rewriter_url;  // empty: builtin rule rewriter
  std::string scorer_url;    // empty: builtin overlap scorer
};

struct RunConfig {
  std::string dataset;
  Backend backend = Backend::Mock;
  std::string mock_profile;  // empty: default profile
  ReviewerConfig reviewer;
  AttackConfig attack;
  ProviderConfig providers;
  std::size_t workers = 1;
  std::string out_dir = "out";
  std::string cache_dir;  // empty: {out_dir}/cache
  std::uint64_t seed = 0;
  bool force = false;
  double across_sample_rate = 0.1;

  fs::path cache_path() const { return cache_dir.empty() ? fs::path(out_dir) / "cache" : fs::path(cache_dir); }

  void validate() const {
    if (dataset.empty()) throw ConfigError("no dataset configured");
    if (!fs::exists(dataset)) throw ConfigError("dataset not found: " + dataset);
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (!mock_profile.empty() && !fs::exists(mock_profile)) {
      throw ConfigError("mock profile not found: " + mock_profile);
    }
    for (const auto& p : {providers.lexicon, providers.embeddings}) {
      if (!p.empty() && !fs::exists(p)) throw ConfigError("provider file not found: " + p);
    }
    reviewer.validate();
    attack.validate();
  }
};

/// Replaces ${NAME} in every string value with the environment variable.
inline void interpolate_env(nlohmann::json& j) {
  static const std::regex var(R"(\$\{([A-Za-z_][A-Za-z0-9_]*)\})");
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    std::string out;
    auto begin = std::sregex_iterator(s.begin(), s.end(), var);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
      const auto& m = *it;
      out.append(s, last, static_cast<std::size_t>(m.position()) - last);
      const char* v = std::getenv(m[1].str().c_str());
      if (!v) throw ConfigError("undefined environment variable in config: " + m[1].str());
      out += v;
      last = static_cast<std::size_t>(m.position() + m.length());
    }
    out.append(s, last, std::string::npos);
    j = out;
  } else if (j.is_structured()) {
    for (auto& v : j) interpolate_env(v);
  }
}

inline ReviewerConfig reviewer_config_from_json(const nlohmann::json& j, ReviewerConfig c) {
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.temperature = j.value("temperature", c.temperature);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  if (j.contains("prompt_mode")) c.prompt_mode = parse_prompt_mode(j.at("prompt_mode").get<std::string>());
  c.max_parse_retries = j.value("max_parse_retries", c.max_parse_retries);
  c.persona_in_system = j.value("persona_in_system", c.persona_in_system);
  c.strict_parse = j.value("strict_parse", c.strict_parse);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  return c;
}

/// File values over defaults.
inline RunConfig config_from_json(nlohmann::json j, RunConfig c = {}) {
  interpolate_env(j);
  try {
    c.dataset = j.value("dataset", c.dataset);
    if (j.contains("backend")) c.backend = parse_backend(j.at("backend").get<std::string>());
    c.mock_profile = j.value("mock_profile", c.mock_profile);
    if (j.contains("reviewer")) c.reviewer = reviewer_config_from_json(j.at("reviewer"), c.reviewer);
    if (j.contains("attack")) c.attack = attack_config_from_json(j.at("attack"), c.attack);
    if (j.contains("providers")) {
      const auto& p = j.at("providers");
      c.providers.lexicon = p.value("lexicon", c.providers.lexicon);
      c.providers.embeddings = p.value("embeddings", c.providers.embeddings);
      c.providers.rewriter_url = p.value("rewriter_url", c.providers.rewriter_url);
      c.providers.scorer_url = p.value("scorer_url", c.providers.scorer_url);
    }
    c.workers = j.value("workers", c.workers);
    c.out_dir = j.value("out", c.out_dir);
    c.cache_dir = j.value("cache_dir", c.cache_dir);
    if (j.contains("seed")) {
      c.seed = j.at("seed").get<std::uint64_t>();
      c.attack.seed = c.seed;
    }
    c.across_sample_rate = j.value("across_sample_rate", c.across_sample_rate);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

inline RunConfig load_config_file(const fs::path& path, RunConfig base = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config file not found: " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config is not a JSON object: " + path.string());
  return config_from_json(std::move(j), std::move(base));
}

/// PAPERATTACK_* (and REVIEWER_ENDPOINT / REVIEWER_MODEL) over file values.
inline RunConfig apply_env(RunConfig c, const std::function<const char*(const char*)>& getenv = ::getenv) {
  auto str = [&](const char* name, std::string& field) {
    if (const char* v = getenv(name)) field = v;
  };
  auto num = [&](const char* name, auto& field) {
    if (const char* v = getenv(name)) {
      try {
        field = static_cast<std::remove_reference_t<decltype(field)>>(std::stoull(v));
      } catch (const std::exception&) {
        throw ConfigError(std::string("bad integer in ") + name + ": " + v);
      }
    }
  };
  str("PAPERATTACK_DATASET", c.dataset);
  str("PAPERATTACK_OUT", c.out_dir);
  str("PAPERATTACK_CACHE_DIR", c.cache_dir);
  str("PAPERATTACK_MOCK_PROFILE", c.mock_profile);
  if (const char* v = getenv("PAPERATTACK_BACKEND")) c.backend = parse_backend(v);
  num("PAPERATTACK_WORKERS", c.workers);
  if (getenv("PAPERATTACK_SEED")) {
    num("PAPERATTACK_SEED", c.seed);
    c.attack.seed = c.seed;
  }
  str("REVIEWER_ENDPOINT", c.reviewer.endpoint);
  str("REVIEWER_MODEL", c.reviewer.model);
  return c;
}

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"dataset", c.dataset},
          {"backend", std::string(backend_name(c.backend))},
          {"mock_profile", c.mock_profile},
          {"reviewer", to_json(c.reviewer)},
          {"attack", to_json(c.attack)},
          {"providers",
           {{"lexicon", c.providers.lexicon},
            {"embeddings", c.providers.embeddings},
            {"rewriter_url", c.providers.rewriter_url},
            {"scorer_url", c.providers.scorer_url}}},
          {"seed", c.seed},
          {"across_sample_rate", c.across_sample_rate}};
}

/// Hash of the settings that determine results. The backend is left out so a
/// replayed session reports the same digest as the live one it recorded.
inline std::string config_digest(const RunConfig& c) {
  auto j = to_json(c);
  j.erase("backend");
  return sha256_hex(j.dump());
}

/// Paths of every artifact kind for one dataset.
struct Layout {
  fs::path out;
  std::string dataset;

  fs::path review(const std::string& id) const { return out / "reviews" / dataset / (id + ".json"); }
  fs::path spans(Granularity g, const std::string& id) const {
    return out / "spans" / dataset / std::string(granularity_name(g)) / (id + ".json");
  }
  fs::path runs_root() const { return out / "runs" / dataset; }
  fs::path runs(const AttackConfig& a) const {
    auto name = std::string(attack_name(a.attack));
    if (a.localization == Localization::FullDocument) name += "_full";
    return runs_root() / name;
  }
  fs::path run(const AttackConfig& a, const std::string& id) const { return runs(a) / (id + ".json"); }
  fs::path reports() const { return out / "reports" / dataset; }
};

inline void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

inline void write_json_atomic(const fs::path& path, const nlohmann::json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

inline nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  return nlohmann::json::parse(in);
}

/// Everything a command needs, built once from a validated RunConfig.
class Session {
 public:
  explicit Session(RunConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    dataset_ = load_dataset(cfg_.dataset);
    layout_ = Layout{cfg_.out_dir, dataset_.name};

    std::shared_ptr<ChatBackend> inner;
    switch (cfg_.backend) {
      case Backend::Mock:
        inner = std::make_shared<MockChatBackend>(cfg_.mock_profile.empty() ? SensitivityProfile{}
                                                                            : load_profile(cfg_.mock_profile));
        break;
      case Backend::Http: {
        auto key = HttpChatBackend::api_key_from_env();
        if (key.empty()) spdlog::warn("REVIEWER_API_KEY is not set; sending requests without authorization");
        inner = std::make_shared<HttpChatBackend>(cfg_.reviewer.endpoint, std::move(key), cfg_.reviewer.timeout_seconds);
        break;
      }
      case Backend::Replay:
        break;
    }
    cache_ = std::make_shared<CachingBackend>(inner, cfg_.cache_path());
    client_ = std::make_unique<ReviewerClient>(cache_, cfg_.reviewer);

    if (!cfg_.providers.lexicon.empty()) {
      providers_.lexicon = std::make_shared<SynonymLexicon>(SynonymLexicon::load(cfg_.providers.lexicon));
    }
    if (!cfg_.providers.embeddings.empty()) {
      providers_.embeddings = std::make_shared<EmbeddingTable>(EmbeddingTable::load(cfg_.providers.embeddings));
    }
    if (!cfg_.providers.rewriter_url.empty()) {
      providers_.rewriter = std::make_shared<HttpRewriter>(cfg_.providers.rewriter_url);
    }
    if (!cfg_.providers.scorer_url.empty()) {
      providers_.scorer = std::make_shared<HttpScorer>(cfg_.providers.scorer_url);
    }
  }

  const RunConfig& config() const { return cfg_; }
  const Dataset& dataset() const { return dataset_; }
  const Layout& layout() const { return layout_; }
  const ReviewerClient& client() const { return *client_; }
  const CachingBackend& cache() const { return *cache_; }
  const AttackProviders& providers() const { return providers_; }

  /// Persisted review, or a fresh one that is then persisted.
  ReviewResult review_for(const PaperDocument& p) const {
    const auto path = layout_.review(p.id);
    if (fs::exists(path) && !cfg_.force) return review_result_from_json(read_json(path).at("review"));
    auto r = client_->review(p);
    write_json_atomic(path, {{"paper_id", p.id},
                             {"model", cfg_.reviewer.model},
                             {"prompt_mode", std::string(prompt_mode_name(cfg_.reviewer.prompt_mode))},
                             {"review", to_json(r)}});
    return r;
  }

  /// Provider identities for the report provenance block.
  nlohmann::json provider_snapshot() const {
    nlohmann::json j = nlohmann::json::object();
    auto file = [&](const char* key, const std::string& path) {
      if (!path.empty()) j[key] = {{"path", path}, {"sha256", sha256_file(path)}};
    };
    file("lexicon", cfg_.providers.lexicon);
    file("embeddings", cfg_.providers.embeddings);
    file("mock_profile", cfg_.mock_profile);
    j["rewriter"] = providers_.rewriter->name();
    j["scorer"] = providers_.scorer->name();
    return j;
  }

 private:
  RunConfig cfg_;
  Dataset dataset_;
  Layout layout_;
  std::shared_ptr<CachingBackend> cache_;
  std::unique_ptr<ReviewerClient> client_;
  AttackProviders providers_;
};

/// Runs `fn(i)` for i in [0, n) on `workers` threads; returns the indices
/// that threw, in order.
inline std::vector<std::size_t> for_each_paper(std::size_t n, std::size_t workers,
                                               const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::vector<std::size_t> failed;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        spdlog::error("paper #{}: {}", i, e.what());
        std::lock_guard lock(mu);
        failed.push_back(i);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(workers, n); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  std::sort(failed.begin(), failed.end());
  return failed;
}

inline int finish_batch(const Session& s, const char* what, const std::vector<std::size_t>& failed) {
  if (failed.empty()) return kOk;
  std::string ids;
  for (auto i : failed) ids += (ids.empty() ? "" : ", ") + s.dataset().papers[i].id;
  spdlog::error("{}: {} of {} papers failed: {}", what, failed.size(), s.dataset().papers.size(), ids);
  return kPartialFailure;
}

inline std::map<std::string, ReviewResult> persisted_reviews(const Session& s) {
  std::map<std::string, ReviewResult> out;
  for (const auto& p : s.dataset().papers) {
    const auto path = s.layout().review(p.id);
    if (fs::exists(path)) out.emplace(p.id, review_result_from_json(read_json(path).at("review")));
  }
  return out;
}

inline nlohmann::json provenance(const Session& s) {
  return {{"version", PAPERATTACK_VERSION},
          {"config_sha256", config_digest(s.config())},
          {"dataset_sha256", sha256_file(s.config().dataset)},
          {"providers", s.provider_snapshot()}};
}

inline void write_quality(const Session& s, const std::map<std::string, ReviewResult>& reviews) {
  const auto q = quality_report(s.dataset(), reviews, s.config().reviewer.model, *s.providers().scorer,
                                s.config().across_sample_rate, s.config().seed);
  auto j = to_json(q);
  j["provenance"] = provenance(s);
  write_json_atomic(s.layout().reports() / "quality.json", j);
  std::string md = "# Review quality: " + s.dataset().name + "\n\n" + quality_markdown(q);
  if (s.providers().scorer->name().rfind("builtin:", 0) == 0) {
    md += "\nSim uses the builtin overlap scorer; it is not an embedding similarity.\n";
  }
  write_text_atomic(s.layout().reports() / "quality.md", md);
}

inline int cmd_review(const Session& s) {
  const auto& papers = s.dataset().papers;
  if (papers.empty()) return kNoData;
  const auto failed = for_each_paper(papers.size(), s.config().workers, [&](std::size_t i) {
    const auto r = s.review_for(papers[i]);
    spdlog::info("review {}: total {}", papers[i].id, total_score(r.scores));
  });
  write_quality(s, persisted_reviews(s));
  return finish_batch(s, "review", failed);
}

inline ModifiableSpanSet spans_for(const Session& s, const PaperDocument& p, Granularity g, std::size_t min_run) {
  const auto path = s.layout().spans(g, p.id);
  if (fs::exists(path) && !s.config().force) return span_set_from_json(read_json(path));
  const auto review = s.review_for(p);
  auto spans = localize(clean_content(p), review.text(), g, min_run, p.id);
  write_json_atomic(path, to_json(spans));
  return spans;
}

inline int cmd_localize(const Session& s) {
  const auto& papers = s.dataset().papers;
  if (papers.empty()) return kNoData;
  const auto& a = s.config().attack;
  const auto failed = for_each_paper(papers.size(), s.config().workers, [&](std::size_t i) {
    const auto spans = spans_for(s, papers[i], a.granularity, a.effective_min_run());
    spdlog::info("localize {}: {} spans", papers[i].id, spans.size());
  });
  return finish_batch(s, "localize", failed);
}

inline int cmd_attack(const Session& s) {
  const auto& papers = s.dataset().papers;
  if (papers.empty()) return kNoData;
  const auto& a = s.config().attack;
  const auto failed = for_each_paper(papers.size(), s.config().workers, [&](std::size_t i) {
    const auto& p = papers[i];
    const auto path = s.layout().run(a, p.id);
    if (fs::exists(path) && !s.config().force) {
      spdlog::info("attack {}: already done, skipping", p.id);
      return;
    }
    const auto x_clean = clean_content(p);
    const auto spans = a.localization == Localization::AFL
                           ? spans_for(s, p, a.granularity, a.effective_min_run())
                           : full_document_spans(x_clean, p.id, a.granularity);
    auto run = run_attack(s.client(), x_clean, spans, a, s.providers());
    auto j = to_json(run);
    j["dataset"] = s.dataset().name;
    write_json_atomic(path, j);
    spdlog::info("attack {}: shift {:+}, {} queries{}", p.id, run.score_shift, run.queries,
                 run.budget_exhausted ? " (budget exhausted)" : "");
  });
  return finish_batch(s, "attack", failed);
}

inline int cmd_metrics(const Session& s) {
  const auto reviews = persisted_reviews(s);
  if (reviews.empty()) {
    spdlog::error("no persisted reviews under {}", (s.layout().out / "reviews" / s.dataset().name).string());
    return kNoData;
  }
  write_quality(s, reviews);
  return kOk;
}

/// Loads every run of one attack directory, ordered by paper id.
inline std::vector<AttackRun> load_runs(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<AttackRun> runs;
  for (const auto& f : files) runs.push_back(attack_run_from_json(read_json(f)));
  return runs;
}

inline int cmd_report(const Session& s) {
  const auto root = s.layout().runs_root();
  std::vector<fs::path> dirs;
  if (fs::exists(root)) {
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.is_directory()) dirs.push_back(e.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<RobustnessReport> reps;
  nlohmann::json run_files = nlohmann::json::object();
  for (const auto& d : dirs) {
    const auto runs = load_runs(d);
    if (runs.empty()) continue;
    reps.push_back(robustness_report(d.filename().string(), runs, s.config().attack.success_threshold,
                                     *s.providers().scorer));
    for (const auto& r : runs) {
      run_files[d.filename().string() + "/" + r.paper_id] = sha256_file(d / (r.paper_id + ".json"));
    }
  }
  if (reps.empty()) {
    spdlog::error("no attack runs under {}", root.string());
    return kNoData;
  }
  nlohmann::json j;
  j["dataset"] = s.dataset().name;
  j["success_threshold"] = s.config().attack.success_threshold;
  j["attacks"] = nlohmann::json::array();
  for (const auto& r : reps) j["attacks"].push_back(to_json(r));
  j["provenance"] = provenance(s);
  j["provenance"]["runs_sha256"] = run_files;
  write_json_atomic(s.layout().reports() / "report.json", j);

  std::string md = "# Attack report: " + s.dataset().name + "\n\n## Robustness\n\n" + robustness_markdown(reps) +
                   "\n## Modification\n\n" + modification_markdown(reps) + "\n## Provenance\n\n" + "- version: " +
                   PAPERATTACK_VERSION + "\n- config sha256: " + j["provenance"]["config_sha256"].get<std::string>() +
                   "\n- dataset sha256: " + j["provenance"]["dataset_sha256"].get<std::string>() + "\n";
  write_text_atomic(s.layout().reports() / "report.md", md);

  if (!persisted_reviews(s).empty()) write_quality(s, persisted_reviews(s));
  return kOk;
}

}  // namespace paperattack::cli

#endif  // PAPERATTACK_CLI_HPP
