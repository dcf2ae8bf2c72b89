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

// HTTP-backed implementations: chat completions, sentence rewriting and
// similarity scoring. Kept apart from the rest of the library so that only
// translation units that talk to the network pull in cpp-httplib.

#ifndef PAPERATTACK_HTTP_HPP
#define PAPERATTACK_HTTP_HPP

#include <chrono>
#include <cstdlib>
#include <string>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "paperattack/errors.hpp"
#include "paperattack/providers.hpp"
#include "paperattack/reviewer.hpp"

namespace paperattack {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline Url split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("URL without scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

namespace detail {

inline httplib::Result post_json(const std::string& url, const nlohmann::json& body,
                                 const httplib::Headers& headers, int timeout_seconds) {
  const auto u = split_url(url);
  httplib::Client client(u.origin);
  client.set_connection_timeout(std::chrono::seconds(timeout_seconds));
  client.set_read_timeout(std::chrono::seconds(timeout_seconds));
  client.set_write_timeout(std::chrono::seconds(timeout_seconds));
  return client.Post(u.path, headers, body.dump(), "application/json");
}

}  // namespace detail

/// OpenAI-compatible chat completions endpoint.
class HttpChatBackend : public ChatBackend {
 public:
  HttpChatBackend(std::string endpoint, std::string api_key, int timeout_seconds = 120)
      : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), timeout_(timeout_seconds) {}

  /// Reads the key from REVIEWER_API_KEY (empty when unset).
  static std::string api_key_from_env() {
    const char* k = std::getenv("REVIEWER_API_KEY");
    return k ? std::string(k) : std::string();
  }

  std::string complete(const ChatRequest& request, std::size_t) override {
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = detail::post_json(endpoint_, request.wire(), headers, timeout_);
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
        throw Timeout("chat endpoint timed out: " + httplib::to_string(err));
      }
      throw EndpointError(0, httplib::to_string(err));
    }
    if (res->status != 200) throw EndpointError(res->status, res->body.substr(0, 200));
    const auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || j.at("choices").empty()) {
      throw EndpointError(res->status, "malformed completion payload");
    }
    const auto& msg = j.at("choices").at(0).at("message");
    if (!msg.contains("content") || !msg.at("content").is_string()) {
      throw EndpointError(res->status, "completion without text content");
    }
    return msg.at("content").get<std::string>();
  }

 private:
  std::string endpoint_;
  std::string api_key_;
  int timeout_;
};

/// POST {"sentence": s} -> {"rewritten": r}
class HttpRewriter : public SentenceRewriter {
 public:
  explicit HttpRewriter(std::string url, int timeout_seconds = 60)
      : url_(std::move(url)), timeout_(timeout_seconds) {}

  std::string rewrite(const std::string& sentence) const override {
    auto res = detail::post_json(url_, {{"sentence", sentence}}, {}, timeout_);
    if (!res || res->status != 200) {
      throw RewriterUnavailable("rewriter at " + url_ + " unavailable" +
                                (res ? " (status " + std::to_string(res->status) + ")"
                                     : ": " + httplib::to_string(res.error())));
    }
    const auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("rewritten") || !j.at("rewritten").is_string()) {
      throw RewriterUnavailable("rewriter returned a malformed payload");
    }
    return j.at("rewritten").get<std::string>();
  }

  std::string name() const override { return "http:" + url_; }

 private:
  std::string url_;
  int timeout_;
};

/// POST {"a": a, "b": b} -> {"score": s}
class HttpScorer : public SimilarityScorer {
 public:
  explicit HttpScorer(std::string url, int timeout_seconds = 60)
      : url_(std::move(url)), timeout_(timeout_seconds) {}

  double score(const std::string& a, const std::string& b) const override {
    auto res = detail::post_json(url_, {{"a", a}, {"b", b}}, {}, timeout_);
    if (!res || res->status != 200) throw ScorerUnavailable("similarity scorer at " + url_ + " unavailable");
    const auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("score") || !j.at("score").is_number()) {
      throw ScorerUnavailable("similarity scorer returned a malformed payload");
    }
    return j.at("score").get<double>();
  }

  std::string name() const override { return "http:" + url_; }

 private:
  std::string url_;
  int timeout_;
};

}  // namespace paperattack

#endif  // PAPERATTACK_HTTP_HPP
