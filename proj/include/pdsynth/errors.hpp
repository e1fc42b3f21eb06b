// Copyright 2026 The pdsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PDSYNTH_ERRORS_HPP_
#define PDSYNTH_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace pdsynth {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Schema / config errors.

class SchemaError : public Error {
 public:
  using Error::Error;
};

// Malformed config text. `line` and `column` are 1-based.
class ConfigSyntaxError : public SchemaError {
 public:
  ConfigSyntaxError(std::size_t line, std::size_t column, const std::string& what)
      : SchemaError("syntax error at line " + std::to_string(line) + ", column " +
                    std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnknownFeature : public Error {
 public:
  explicit UnknownFeature(const std::string& name)
      : Error("unknown feature '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// ---------------------------------------------------------------------------
// Distribution validation errors.

class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnknownCategory : public ValidationError {
 public:
  explicit UnknownCategory(const std::string& label)
      : ValidationError("unknown category '" + label + "'"), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class DuplicateCategory : public ValidationError {
 public:
  explicit DuplicateCategory(const std::string& label)
      : ValidationError("category '" + label + "' given more than once"), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class InvalidWeight : public ValidationError {
 public:
  InvalidWeight(const std::string& label, double value)
      : ValidationError("invalid weight " + std::to_string(value) + " for category '" + label +
                        "'"),
        label_(label),
        value_(value) {}
  const std::string& label() const { return label_; }
  double value() const { return value_; }

 private:
  std::string label_;
  double value_;
};

class DegenerateDistribution : public ValidationError {
 public:
  DegenerateDistribution() : ValidationError("distribution has zero total weight") {}
};

class UnparsableRange : public ValidationError {
 public:
  explicit UnparsableRange(const std::string& label)
      : ValidationError("cannot parse numeric range '" + label + "'"), label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

// ---------------------------------------------------------------------------
// Response parsing errors. These are the failures the retry loop corrects.

class ResponseParseError : public Error {
 public:
  using Error::Error;
};

class NoJsonFound : public ResponseParseError {
 public:
  NoJsonFound() : ResponseParseError("no complete JSON value found in response") {}
};

class NonNumericWeight : public ResponseParseError {
 public:
  explicit NonNumericWeight(const std::string& key)
      : ResponseParseError("weight for '" + key + "' is not a number"), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class SchemaMismatch : public ResponseParseError {
 public:
  SchemaMismatch(std::size_t row, const std::string& column)
      : ResponseParseError("row " + std::to_string(row) + " has no usable value for column '" +
                           column + "'"),
        row_(row),
        column_(column) {}
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class NotACategory : public ResponseParseError {
 public:
  explicit NotACategory(const std::string& text)
      : ResponseParseError("response '" + text + "' is not one of the categories"), text_(text) {}
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

// ---------------------------------------------------------------------------
// Oracle errors.

class OracleError : public Error {
 public:
  using Error::Error;
};

// A single failed transport attempt. Retried with backoff by the query loop.
class TransportError : public OracleError {
 public:
  using OracleError::OracleError;
};

// Transport kept failing after every retry.
class OracleUnavailable : public OracleError {
 public:
  using OracleError::OracleError;
};

// Every attempt produced a response that could not be parsed.
class UnparsableResponse : public OracleError {
 public:
  UnparsableResponse(int attempts, const std::string& last_reason)
      : OracleError("response unparsable after " + std::to_string(attempts) +
                    " attempt(s): " + last_reason),
        attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

class FixtureMissingEntry : public OracleError {
 public:
  FixtureMissingEntry(const std::string& feature, const std::string& context)
      : OracleError("fixture has no entry for feature '" + feature + "' with context '" +
                    context + "'"),
        feature_(feature),
        context_(context) {}
  const std::string& feature() const { return feature_; }
  const std::string& context() const { return context_; }

 private:
  std::string feature_;
  std::string context_;
};

// ---------------------------------------------------------------------------
// Generation and evaluation errors.

// Failure of one (feature, context) during generation; aborts the run.
class GenerationError : public Error {
 public:
  GenerationError(std::string feature, std::string context, const std::string& cause)
      : Error("feature '" + feature + "', context '" + context + "': " + cause),
        feature_(std::move(feature)),
        context_(std::move(context)) {}
  const std::string& feature() const { return feature_; }
  const std::string& context() const { return context_; }

 private:
  std::string feature_;
  std::string context_;
};

class CategoryMismatch : public Error {
 public:
  using Error::Error;
};

class AllPooled : public Error {
 public:
  AllPooled() : Error("fewer than two categories remain after pooling expected counts < 5") {}
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace pdsynth

#endif  // PDSYNTH_ERRORS_HPP_
