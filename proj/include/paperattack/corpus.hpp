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

#ifndef PAPERATTACK_CORPUS_HPP
#define PAPERATTACK_CORPUS_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "paperattack/aspects.hpp"
#include "paperattack/errors.hpp"
#include "paperattack/segmenter.hpp"

namespace paperattack {

enum class Decision { Accept, Reject, Poster, Spotlight, Oral };

inline std::string_view decision_name(Decision d) {
  switch (d) {
    case Decision::Accept:
      return "accept";
    case Decision::Reject:
      return "reject";
    case Decision::Poster:
      return "poster";
    case Decision::Spotlight:
      return "spotlight";
    case Decision::Oral:
      return "oral";
  }
  return "reject";
}

inline std::optional<Decision> parse_decision(std::string_view s) {
  for (auto d : {Decision::Accept, Decision::Reject, Decision::Poster, Decision::Spotlight,
                 Decision::Oral}) {
    if (utf8::lower(s) == decision_name(d)) return d;
  }
  return std::nullopt;
}

struct HumanReview {
  std::string text;
  std::optional<std::vector<AspectTag>> aspect_tags;
  std::optional<std::map<ScoreAspect, double>> aspect_scores;

  friend bool operator==(const HumanReview&, const HumanReview&) = default;
};

struct Section {
  std::string name;
  std::string content;

  friend bool operator==(const Section&, const Section&) = default;
};

struct PaperDocument {
  std::string id;
  std::vector<Section> sections;
  std::optional<Decision> decision;
  std::vector<HumanReview> human_reviews;

  friend bool operator==(const PaperDocument&, const PaperDocument&) = default;
};

struct Dataset {
  std::string name;
  std::vector<PaperDocument> papers;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// The clean content of a paper: one "Section {name}: {content}\n" line per
/// section, in order.
inline std::string clean_content(const PaperDocument& paper) {
  std::string out;
  for (const auto& s : paper.sections) {
    out += "Section ";
    out += s.name;
    out += ": ";
    out += s.content;
    out += '\n';
  }
  return out;
}

namespace detail {

inline bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string::npos;
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, std::size_t rec,
                                     const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaViolation(rec, path + key, "missing");
  return obj.at(key);
}

inline std::string require_string(const nlohmann::json& obj, const char* key, std::size_t rec,
                                  const std::string& path) {
  const auto& v = require(obj, key, rec, path);
  if (!v.is_string()) throw SchemaViolation(rec, path + key, "expected string");
  return v.get<std::string>();
}

inline HumanReview parse_human_review(const nlohmann::json& j, std::size_t rec,
                                      const std::string& path) {
  if (!j.is_object()) throw SchemaViolation(rec, path, "expected object");
  HumanReview r;
  r.text = require_string(j, "text", rec, path);
  if (j.contains("aspect_tags") && !j.at("aspect_tags").is_null()) {
    const auto& tags = j.at("aspect_tags");
    if (!tags.is_array()) throw SchemaViolation(rec, path + "aspect_tags", "expected array");
    std::vector<AspectTag> parsed;
    for (const auto& t : tags) {
      if (!t.is_string()) throw SchemaViolation(rec, path + "aspect_tags", "expected string tags");
      auto tag = parse_tag(t.get<std::string>());
      if (!tag) throw SchemaViolation(rec, path + "aspect_tags", "unknown tag " + t.get<std::string>());
      parsed.push_back(*tag);
    }
    std::size_t sentences = 0;
    if (!blank(r.text)) sentences = split(r.text, Granularity::Sentence).size();
    if (parsed.size() != sentences) {
      throw SchemaViolation(rec, path + "aspect_tags",
                            "has " + std::to_string(parsed.size()) + " tags for " +
                                std::to_string(sentences) + " sentences");
    }
    r.aspect_tags = std::move(parsed);
  }
  if (j.contains("aspect_scores") && !j.at("aspect_scores").is_null()) {
    const auto& sc = j.at("aspect_scores");
    if (!sc.is_object()) throw SchemaViolation(rec, path + "aspect_scores", "expected object");
    std::map<ScoreAspect, double> scores;
    for (const auto& [k, v] : sc.items()) {
      auto aspect = parse_aspect(k);
      if (!aspect) throw SchemaViolation(rec, path + "aspect_scores", "unknown aspect " + k);
      if (!v.is_number()) throw SchemaViolation(rec, path + "aspect_scores." + k, "expected number");
      scores[*aspect] = v.get<double>();
    }
    r.aspect_scores = std::move(scores);
  }
  return r;
}

inline PaperDocument parse_paper(const nlohmann::json& j, std::size_t rec) {
  if (!j.is_object()) throw SchemaViolation(rec, "", "expected object");
  PaperDocument p;
  p.id = require_string(j, "id", rec, "");
  if (blank(p.id)) throw SchemaViolation(rec, "id", "empty");
  if (j.contains("decision") && !j.at("decision").is_null()) {
    if (!j.at("decision").is_string()) throw SchemaViolation(rec, "decision", "expected string");
    p.decision = parse_decision(j.at("decision").get<std::string>());
    if (!p.decision) throw SchemaViolation(rec, "decision", "unknown decision");
  }
  const auto& sections = require(j, "sections", rec, "");
  if (!sections.is_array()) throw SchemaViolation(rec, "sections", "expected array");
  if (sections.empty()) throw SchemaViolation(rec, "sections", "at least one section required");
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const auto path = "sections[" + std::to_string(i) + "].";
    if (!sections[i].is_object()) throw SchemaViolation(rec, path, "expected object");
    Section s{require_string(sections[i], "name", rec, path),
              require_string(sections[i], "content", rec, path)};
    if (blank(s.content)) throw SchemaViolation(rec, path + "content", "empty");
    p.sections.push_back(std::move(s));
  }
  if (j.contains("human_reviews") && !j.at("human_reviews").is_null()) {
    const auto& hr = j.at("human_reviews");
    if (!hr.is_array()) throw SchemaViolation(rec, "human_reviews", "expected array");
    for (std::size_t i = 0; i < hr.size(); ++i) {
      p.human_reviews.push_back(
          parse_human_review(hr[i], rec, "human_reviews[" + std::to_string(i) + "]."));
    }
  }
  return p;
}

}  // namespace detail

inline Dataset parse_dataset(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaViolation(0, "", "dataset must be an object");
  Dataset d;
  if (j.contains("name") && j.at("name").is_string()) d.name = j.at("name").get<std::string>();
  if (!j.contains("papers") || !j.at("papers").is_array()) {
    throw SchemaViolation(0, "papers", "missing papers array");
  }
  const auto& papers = j.at("papers");
  if (papers.empty()) throw SchemaViolation(0, "papers", "dataset is empty");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < papers.size(); ++i) {
    auto p = detail::parse_paper(papers[i], i);
    if (!seen.insert(p.id).second) throw DuplicateId(p.id);
    d.papers.push_back(std::move(p));
  }
  return d;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaViolation(0, "", std::string("invalid JSON: ") + e.what());
  }
  auto d = parse_dataset(j);
  if (d.name.empty()) d.name = path.stem().string();
  return d;
}

inline nlohmann::json to_json(const HumanReview& r) {
  nlohmann::json j;
  j["text"] = r.text;
  if (r.aspect_tags) {
    auto arr = nlohmann::json::array();
    for (auto t : *r.aspect_tags) arr.push_back(tag_name(t));
    j["aspect_tags"] = arr;
  } else {
    j["aspect_tags"] = nullptr;
  }
  if (r.aspect_scores) {
    nlohmann::json sc = nlohmann::json::object();
    for (const auto& [a, v] : *r.aspect_scores) sc[aspect_name(a)] = v;
    j["aspect_scores"] = sc;
  } else {
    j["aspect_scores"] = nullptr;
  }
  return j;
}

inline nlohmann::json to_json(const Dataset& d) {
  nlohmann::json papers = nlohmann::json::array();
  for (const auto& p : d.papers) {
    nlohmann::json jp;
    jp["id"] = p.id;
    jp["decision"] = p.decision ? nlohmann::json(std::string(decision_name(*p.decision))) : nlohmann::json();
    auto secs = nlohmann::json::array();
    for (const auto& s : p.sections) secs.push_back({{"name", s.name}, {"content", s.content}});
    jp["sections"] = secs;
    auto reviews = nlohmann::json::array();
    for (const auto& r : p.human_reviews) reviews.push_back(to_json(r));
    jp["human_reviews"] = reviews;
    papers.push_back(std::move(jp));
  }
  return {{"name", d.name}, {"papers", papers}};
}

inline void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json(d).dump(2) << '\n';
}

}  // namespace paperattack

#endif  // PAPERATTACK_CORPUS_HPP
