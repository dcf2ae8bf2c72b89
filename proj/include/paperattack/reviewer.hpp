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

// Reviewer client: prompt -> chat backend -> parsed ReviewResult.
//
// Backends are stacked: a CachingBackend in front of an HTTP or mock backend
// records every call in its call log, serves repeated requests from disk and
// keeps separate live/replay counters. The ReviewerClient itself counts every
// backend call, cached or not, as one query.

#ifndef PAPERATTACK_REVIEWER_HPP
#define PAPERATTACK_REVIEWER_HPP

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "paperattack/corpus.hpp"
#include "paperattack/errors.hpp"
#include "paperattack/hashing.hpp"
#include "paperattack/mock_reviewer.hpp"
#include "paperattack/prompt.hpp"
#include "paperattack/review_format.hpp"

namespace paperattack {

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.3;
  int max_tokens = 2048;

  nlohmann::json wire() const {
    auto msgs = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    return {{"model", model}, {"messages", msgs}, {"temperature", temperature}, {"max_tokens", max_tokens}};
  }
};

/// One completion per call. `attempt` is the parse-retry index of the request.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const ChatRequest& request, std::size_t attempt) = 0;
};

class MockChatBackend : public ChatBackend {
 public:
  explicit MockChatBackend(SensitivityProfile profile) : profile_(std::move(profile)) {}

  std::string complete(const ChatRequest& request, std::size_t) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return mock_review(extract_body(request.messages), profile_).raw;
  }

  std::size_t calls() const { return calls_.load(); }
  const SensitivityProfile& profile() const { return profile_; }

 private:
  SensitivityProfile profile_;
  std::atomic<std::size_t> calls_{0};
};

struct CallRecord {
  std::string key;
  bool live = false;
};

/// Disk cache keyed by SHA-256 of (model, messages, temperature, max_tokens,
/// attempt). One JSON file per key. Without an inner backend it is a pure
/// replayer and a miss is an EndpointError.
class CachingBackend : public ChatBackend {
 public:
  CachingBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path dir)
      : inner_(std::move(inner)), dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  static std::string key_of(const ChatRequest& request, std::size_t attempt) {
    auto material = request.wire();
    material["attempt"] = attempt;
    return sha256_hex(material.dump());
  }

  std::string complete(const ChatRequest& request, std::size_t attempt) override {
    const auto key = key_of(request, attempt);
    const auto path = dir_ / (key + ".json");
    {
      std::shared_lock lock(mutex_);
      std::ifstream in(path, std::ios::binary);
      if (in) {
        const auto j = nlohmann::json::parse(in, nullptr, false);
        if (!j.is_discarded() && j.contains("response")) {
          replay_.fetch_add(1);
          record(key, false);
          return j.at("response").get<std::string>();
        }
      }
    }
    if (!inner_) throw EndpointError(0, "cache miss with no live backend (key " + key + ")");
    auto response = inner_->complete(request, attempt);
    live_.fetch_add(1);
    record(key, true);
    {
      std::unique_lock lock(mutex_);
      auto material = request.wire();
      material["attempt"] = attempt;
      const nlohmann::json entry{{"request", material}, {"response", response}};
      const auto tmp = dir_ / (key + ".json.tmp");
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << entry.dump(2) << '\n';
      }
      std::filesystem::rename(tmp, path);
    }
    return response;
  }

  std::size_t live_calls() const { return live_.load(); }
  std::size_t replay_calls() const { return replay_.load(); }

  std::vector<CallRecord> call_log() const {
    std::lock_guard lock(log_mutex_);
    return log_;
  }

 private:
  void record(const std::string& key, bool live) {
    std::lock_guard lock(log_mutex_);
    log_.push_back(CallRecord{key, live});
  }

  std::shared_ptr<ChatBackend> inner_;
  std::filesystem::path dir_;
  std::shared_mutex mutex_;
  mutable std::mutex log_mutex_;
  std::vector<CallRecord> log_;
  std::atomic<std::size_t> live_{0};
  std::atomic<std::size_t> replay_{0};
};

struct ReviewerConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  double temperature = 0.3;
  int max_tokens = 2048;
  PromptMode prompt_mode = PromptMode::Tagged;
  std::size_t max_parse_retries = 2;
  bool persona_in_system = true;
  bool strict_parse = false;
  int timeout_seconds = 120;

  void validate() const {
    if (temperature < 0) throw ConfigError("temperature must be >= 0");
    if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  }
};

inline nlohmann::json to_json(const ReviewerConfig& c) {
  return {{"endpoint", c.endpoint},
          {"model", c.model},
          {"temperature", c.temperature},
          {"max_tokens", c.max_tokens},
          {"prompt_mode", std::string(prompt_mode_name(c.prompt_mode))},
          {"max_parse_retries", c.max_parse_retries},
          {"persona_in_system", c.persona_in_system},
          {"strict_parse", c.strict_parse},
          {"timeout_seconds", c.timeout_seconds}};
}

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

class ReviewerClient {
 public:
  ReviewerClient(std::shared_ptr<ChatBackend> backend, ReviewerConfig config)
      : backend_(std::move(backend)), config_(std::move(config)) {
    config_.validate();
  }

  ChatRequest request_for(std::string_view body) const {
    return ChatRequest{config_.model,
                       build_messages(body, config_.prompt_mode, config_.persona_in_system),
                       config_.temperature, config_.max_tokens};
  }

  /// Reviews a document body. Parse failures are retried up to
  /// max_parse_retries times; every attempt is one query. At most
  /// `max_queries` attempts are made; running out before a parse succeeds is
  /// BudgetExhausted. `consumed`, when given, receives the attempts made even
  /// if the call throws.
  ReviewResult review_text(std::string_view body, std::size_t max_queries = kUnlimited,
                           std::size_t* consumed = nullptr) const {
    if (body.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      throw EmptyInput("cannot review an empty document");
    }
    const auto request = request_for(body);
    const ParseOptions opts{config_.strict_parse, config_.prompt_mode == PromptMode::Tagged};
    std::size_t used = 0;
    auto report = [&] {
      if (consumed) *consumed = used;
    };
    std::optional<ParseFailure> last;
    for (std::size_t attempt = 0; attempt <= config_.max_parse_retries; ++attempt) {
      if (used >= max_queries) {
        report();
        throw BudgetExhausted("query budget exhausted before a parseable review");
      }
      std::string raw;
      ++used;
      queries_.fetch_add(1, std::memory_order_relaxed);
      try {
        raw = backend_->complete(request, attempt);
      } catch (...) {
        report();
        throw;
      }
      try {
        auto r = parse_response(raw, opts);
        r.queries_consumed = used;
        report();
        return r;
      } catch (ParseFailure& e) {
        e.set_raw(raw);
        last = e;
      }
    }
    report();
    throw *last;
  }

  ReviewResult review(const PaperDocument& paper) const { return review_text(clean_content(paper)); }

  std::size_t queries() const { return queries_.load(); }
  const ReviewerConfig& config() const { return config_; }

 private:
  std::shared_ptr<ChatBackend> backend_;
  ReviewerConfig config_;
  mutable std::atomic<std::size_t> queries_{0};
};

}  // namespace paperattack

#endif  // PAPERATTACK_REVIEWER_HPP
