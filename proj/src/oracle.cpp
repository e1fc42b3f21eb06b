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

#include "pdsynth/oracle.hpp"

#include <cmath>
#include <exception>
#include <thread>

#include "pdsynth/errors.hpp"
#include "pdsynth/response_parser.hpp"

namespace pdsynth {

std::string_view to_string(CallOutcome outcome) {
  switch (outcome) {
    case CallOutcome::kOk:
      return "ok";
    case CallOutcome::kParseFailure:
      return "parse_failure";
    case CallOutcome::kValidationFailure:
      return "validation_failure";
    case CallOutcome::kTransportFailure:
      return "transport_failure";
    case CallOutcome::kCacheHit:
      return "cache_hit";
  }
  return "unknown";
}

CallCounters& CallCounters::operator+=(const CallCounters& other) {
  distribution_queries += other.distribution_queries;
  cell_queries += other.cell_queries;
  table_queries += other.table_queries;
  retries += other.retries;
  cache_hits += other.cache_hits;
  transport_calls += other.transport_calls;
  return *this;
}

namespace {

void count(const CallRecord& r, CallCounters& c) {
  if (r.outcome == CallOutcome::kCacheHit) {
    ++c.cache_hits;
    return;
  }
  ++c.transport_calls;
  if (r.attempt > 1) {
    ++c.retries;
    return;
  }
  switch (r.kind) {
    case PromptKind::kDistribution:
      ++c.distribution_queries;
      break;
    case PromptKind::kCellByCell:
      ++c.cell_queries;
      break;
    case PromptKind::kTableWide:
      ++c.table_queries;
      break;
  }
}

}  // namespace

CallCounters tally(const std::vector<CallRecord>& records) {
  CallCounters c;
  for (const auto& r : records) count(r, c);
  return c;
}

void OracleCallLog::append(CallRecord record) {
  std::lock_guard lock(mu_);
  count(record, counters_);
  records_.push_back(std::move(record));
}

CallCounters OracleCallLog::counters() const {
  std::lock_guard lock(mu_);
  return counters_;
}

std::vector<CallRecord> OracleCallLog::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::size_t OracleCallLog::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::string corrective_message(PromptKind kind, std::string_view reason,
                               std::span<const std::string> categories) {
  std::string text = "Your previous reply could not be used: " + std::string(reason) + ".\n";
  switch (kind) {
    case PromptKind::kDistribution:
      text += "Reply again with only a single flat JSON object that maps each of these "
              "categories to a probability, with the probabilities summing to 1: " +
              python_list_repr(categories) + "\n";
      break;
    case PromptKind::kCellByCell:
      text += "Reply again with exactly one of these categories and nothing else: " +
              python_list_repr(categories) + "\n";
      break;
    case PromptKind::kTableWide:
      text += "Reply again with only the JSON data: an array with one object per record, "
              "keyed by column name.\n";
      break;
  }
  return text;
}

namespace {

template <typename Parse>
auto run_with_retries(Oracle& oracle, const Prompt& prompt, const QueryOptions& options,
                      OracleCallLog& log, std::span<const std::string> categories, Parse parse)
    -> decltype(parse(std::string{})) {
  OracleRequest request;
  request.kind = prompt.kind;
  request.messages.push_back({"user", prompt.text});
  request.temperature = options.temperature;
  request.feature = options.feature;
  request.context = options.context;
  request.rows_requested = options.rows_requested;

  const std::string key =
      prompt.kind == PromptKind::kTableWide ? "" : context_key(options.feature, options.context).hex();
  const int attempts = std::max(0, options.retry.max_retries) + 1;
  auto sleep = options.retry.sleep ? options.retry.sleep : [](std::chrono::milliseconds d) {
    if (d.count() > 0) std::this_thread::sleep_for(d);
  };

  auto record = [&](int attempt, CallOutcome outcome, std::chrono::steady_clock::time_point start,
                    std::string detail) {
    log.append(CallRecord{prompt.kind, options.feature, key, attempt, outcome,
                          std::chrono::duration_cast<std::chrono::microseconds>(
                              std::chrono::steady_clock::now() - start),
                          std::move(detail)});
  };

  std::exception_ptr last_error;
  std::string last_reason;
  CallOutcome last_outcome = CallOutcome::kOk;
  int transport_failures = 0;

  for (int attempt = 1; attempt <= attempts; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    std::string text;
    try {
      text = oracle.complete(request);
    } catch (const TransportError& e) {
      record(attempt, CallOutcome::kTransportFailure, start, e.what());
      last_outcome = CallOutcome::kTransportFailure;
      last_reason = e.what();
      if (attempt < attempts) {
        const double scale = std::pow(options.retry.backoff_factor, transport_failures);
        sleep(std::chrono::milliseconds(
            static_cast<std::int64_t>(static_cast<double>(options.retry.backoff_base.count()) * scale)));
      }
      ++transport_failures;
      continue;
    } catch (const std::exception& e) {
      record(attempt, CallOutcome::kTransportFailure, start, e.what());
      throw;
    }

    try {
      auto result = parse(text);
      record(attempt, CallOutcome::kOk, start, {});
      return result;
    } catch (const ResponseParseError& e) {
      record(attempt, CallOutcome::kParseFailure, start, e.what());
      last_outcome = CallOutcome::kParseFailure;
      last_reason = e.what();
      last_error = std::current_exception();
    } catch (const ValidationError& e) {
      record(attempt, CallOutcome::kValidationFailure, start, e.what());
      last_outcome = CallOutcome::kValidationFailure;
      last_reason = e.what();
      last_error = std::current_exception();
    }
    if (attempt < attempts) {
      request.messages.push_back({"assistant", text});
      request.messages.push_back({"user", corrective_message(prompt.kind, last_reason, categories)});
    }
  }

  if (last_outcome == CallOutcome::kTransportFailure) {
    throw OracleUnavailable("oracle unavailable after " + std::to_string(attempts) +
                            " attempt(s): " + last_reason);
  }
  if (last_outcome == CallOutcome::kValidationFailure || prompt.kind == PromptKind::kCellByCell) {
    std::rethrow_exception(last_error);
  }
  throw UnparsableResponse(attempts, last_reason);
}

}  // namespace

RawDistribution query_distribution(Oracle& oracle, const Prompt& prompt, const FeatureSpec& spec,
                                   const QueryOptions& options, OracleCallLog& log) {
  return run_with_retries(oracle, prompt, options, log, spec.categories,
                          [&](const std::string& text) {
                            RawDistribution raw = parse_distribution_response(text, spec);
                            check_raw_distribution(raw, spec);
                            return raw;
                          });
}

std::string query_cell(Oracle& oracle, const Prompt& prompt, const FeatureSpec& spec,
                       const QueryOptions& options, OracleCallLog& log) {
  return run_with_retries(oracle, prompt, options, log, spec.categories,
                          [&](const std::string& text) { return parse_cell_response(text, spec); });
}

Table query_table(Oracle& oracle, const Prompt& prompt,
                  const std::shared_ptr<const DatasetSchema>& schema, const QueryOptions& options,
                  OracleCallLog& log) {
  return run_with_retries(oracle, prompt, options, log, {}, [&](const std::string& text) {
    return parse_table_response(text, schema);
  });
}

}  // namespace pdsynth
