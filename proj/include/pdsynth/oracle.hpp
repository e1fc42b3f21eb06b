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

#ifndef PDSYNTH_ORACLE_HPP_
#define PDSYNTH_ORACLE_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "pdsynth/distribution.hpp"
#include "pdsynth/prompts.hpp"
#include "pdsynth/schema.hpp"
#include "pdsynth/table.hpp"

namespace pdsynth {

struct ChatMessage {
  std::string role;
  std::string content;
};

// One completion request. `feature`, `context` and `rows_requested` are
// lookup metadata for deterministic oracles; network oracles send only the
// messages and temperature.
struct OracleRequest {
  PromptKind kind = PromptKind::kDistribution;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::string feature;
  std::string context;
  std::int64_t rows_requested = 0;
};

// Source of completions: an LLM endpoint or a fixture. Implementations must be
// callable from several threads at once.
class Oracle {
 public:
  virtual ~Oracle() = default;
  // Returns the response text. Throws TransportError for transient failures;
  // any other OracleError is treated as final.
  virtual std::string complete(const OracleRequest& request) = 0;
};

enum class CallOutcome { kOk, kParseFailure, kValidationFailure, kTransportFailure, kCacheHit };

std::string_view to_string(CallOutcome outcome);

struct CallRecord {
  PromptKind kind = PromptKind::kDistribution;
  std::string feature;
  std::string context_key;  // hex digest; empty for table prompts
  int attempt = 0;          // 1-based; 0 for cache hits
  CallOutcome outcome = CallOutcome::kOk;
  std::chrono::microseconds latency{0};
  std::string detail;
};

// Logical queries are first attempts; retries are later attempts. Cache hits
// are recorded with attempt 0 and never reach the oracle.
struct CallCounters {
  std::uint64_t distribution_queries = 0;
  std::uint64_t cell_queries = 0;
  std::uint64_t table_queries = 0;
  std::uint64_t retries = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t transport_calls = 0;

  CallCounters& operator+=(const CallCounters& other);
  friend bool operator==(const CallCounters&, const CallCounters&) = default;
};

CallCounters tally(const std::vector<CallRecord>& records);

class OracleCallLog {
 public:
  void append(CallRecord record);
  CallCounters counters() const;
  std::vector<CallRecord> records() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<CallRecord> records_;
  CallCounters counters_;
};

struct RetryPolicy {
  int max_retries = 2;
  std::chrono::milliseconds backoff_base{1000};
  double backoff_factor = 2.0;
  // Replaceable for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct QueryOptions {
  RetryPolicy retry;
  double temperature = 0.0;
  std::string feature;
  std::string context;
  std::int64_t rows_requested = 0;
};

// Text of the follow-up message sent after an unusable response.
std::string corrective_message(PromptKind kind, std::string_view reason,
                               std::span<const std::string> categories);

// Sends a distribution prompt and returns a response that parses and passes
// validate_and_normalize against `spec`. Parse and validation failures are
// retried with a corrective follow-up; transport failures with exponential
// backoff. Throws OracleUnavailable, UnparsableResponse, or the last
// ValidationError.
RawDistribution query_distribution(Oracle& oracle, const Prompt& prompt, const FeatureSpec& spec,
                                   const QueryOptions& options, OracleCallLog& log);

// Cell prompt; returns the matched category label. Throws OracleUnavailable or
// NotACategory once retries are spent.
std::string query_cell(Oracle& oracle, const Prompt& prompt, const FeatureSpec& spec,
                       const QueryOptions& options, OracleCallLog& log);

// Table prompt; returns the parsed rows. Throws OracleUnavailable or
// UnparsableResponse.
Table query_table(Oracle& oracle, const Prompt& prompt,
                  const std::shared_ptr<const DatasetSchema>& schema, const QueryOptions& options,
                  OracleCallLog& log);

}  // namespace pdsynth

#endif  // PDSYNTH_ORACLE_HPP_
