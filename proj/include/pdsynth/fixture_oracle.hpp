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

#ifndef PDSYNTH_FIXTURE_ORACLE_HPP_
#define PDSYNTH_FIXTURE_ORACLE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdsynth/distribution.hpp"
#include "pdsynth/oracle.hpp"
#include "pdsynth/schema.hpp"

namespace pdsynth {

enum class FailKind { kMalformed, kTransport };

// Answer to a distribution prompt for one (feature, context string).
struct FixtureEntry {
  std::string feature;
  std::string context;
  RawDistribution distribution;
  // The first `fail_times` requests for this entry fail before it answers.
  int fail_times = 0;
  FailKind fail_kind = FailKind::kMalformed;
  std::string source;
};

// Scripted cell answers, cycled per script. No context means any context.
struct CellScript {
  std::string feature;
  std::optional<std::string> context;
  std::vector<std::string> responses;
};

struct FixtureData {
  std::string name;
  std::string note;
  std::uint64_t seed = 0;
  std::vector<FixtureEntry> entries;
  std::vector<CellScript> cell_scripts;
  // Answer unscripted cell prompts by sampling the matching entry.
  bool cell_sampling = false;
  // Table prompts: scripted responses in order (the last one repeats) ...
  std::vector<std::string> table_responses;
  // ... or, without scripts, synthesized from the entries at most this many
  // rows per call.
  std::optional<std::int64_t> table_rows_per_call;

  const FixtureEntry* find(std::string_view feature, std::string_view context) const;
};

// Throws ConfigSyntaxError or SchemaError.
FixtureData parse_fixture(std::string_view text);
FixtureData load_fixture(const std::filesystem::path& path);

// Deterministic oracle backed by FixtureData. Internally synchronized.
class FixtureOracle : public Oracle {
 public:
  // `schema` is needed only to synthesize table responses.
  FixtureOracle(std::shared_ptr<const FixtureData> data, std::uint64_t seed,
                std::shared_ptr<const DatasetSchema> schema = nullptr);

  // Throws FixtureMissingEntry for unknown keys; TransportError for scripted
  // transport failures.
  std::string complete(const OracleRequest& request) override;

  std::uint64_t calls() const;

 private:
  std::string answer_distribution(const OracleRequest& request);
  std::string answer_cell(const OracleRequest& request);
  std::string answer_table(const OracleRequest& request);
  std::string sample_entry_label(const FixtureEntry& entry);

  std::shared_ptr<const FixtureData> data_;
  std::shared_ptr<const DatasetSchema> schema_;
  mutable std::mutex mu_;
  Rng rng_;
  std::uint64_t calls_ = 0;
  std::uint64_t table_calls_ = 0;
  std::map<std::size_t, int> failures_served_;
  std::map<std::size_t, std::size_t> script_cursor_;
};

}  // namespace pdsynth

#endif  // PDSYNTH_FIXTURE_ORACLE_HPP_
