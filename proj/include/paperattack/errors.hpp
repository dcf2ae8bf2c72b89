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

#ifndef PAPERATTACK_ERRORS_HPP
#define PAPERATTACK_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace paperattack {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// corpus
class MissingFile : public Error {
 public:
  explicit MissingFile(std::string path)
      : Error("missing file: " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class SchemaViolation : public Error {
 public:
  SchemaViolation(std::size_t record, std::string field, const std::string& what)
      : Error("schema violation in record " + std::to_string(record) + ", field '" +
              field + "': " + what),
        record_(record),
        field_(std::move(field)) {}
  std::size_t record() const { return record_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t record_;
  std::string field_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(std::string id) : Error("duplicate paper id: " + id), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// segmenter / localizer / metrics
class EmptyInput : public Error {
 public:
  using Error::Error;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

class TooShort : public Error {
 public:
  using Error::Error;
};

class NoReferences : public Error {
 public:
  using Error::Error;
};

class TooFewPairs : public Error {
 public:
  using Error::Error;
};

// reviewer
class EndpointError : public Error {
 public:
  EndpointError(int status, const std::string& what)
      : Error("endpoint error (status " + std::to_string(status) + "): " + what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class Timeout : public Error {
 public:
  using Error::Error;
};

class ParseFailure : public Error {
 public:
  ParseFailure(const std::string& what, std::string region, std::string raw = {})
      : Error("parse failure: " + what + " near '" + region + "'"),
        region_(std::move(region)),
        raw_(std::move(raw)) {}
  const std::string& region() const { return region_; }
  const std::string& raw() const { return raw_; }
  void set_raw(std::string raw) { raw_ = std::move(raw); }

 private:
  std::string region_;
  std::string raw_;
};

// perturb
class WordTooShort : public Error {
 public:
  using Error::Error;
};

class UnknownWord : public Error {
 public:
  using Error::Error;
};

class RewriterUnavailable : public Error {
 public:
  using Error::Error;
};

class EmptyRewrite : public Error {
 public:
  using Error::Error;
};

class ScorerUnavailable : public Error {
 public:
  using Error::Error;
};

class StaleSpan : public Error {
 public:
  using Error::Error;
};

/// A perturbation fell outside the modifiable span set it was checked against.
class SpanViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// search
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

class NoEligibleWords : public Error {
 public:
  using Error::Error;
};

// cli
class ConfigError : public Error {
 public:
  using Error::Error;
};

class NoRuns : public Error {
 public:
  using Error::Error;
};

}  // namespace paperattack

#endif  // PAPERATTACK_ERRORS_HPP
