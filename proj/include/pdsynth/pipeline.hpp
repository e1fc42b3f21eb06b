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

#ifndef PDSYNTH_PIPELINE_HPP_
#define PDSYNTH_PIPELINE_HPP_

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "pdsynth/distribution.hpp"
#include "pdsynth/oracle.hpp"
#include "pdsynth/schema.hpp"
#include "pdsynth/table.hpp"

namespace pdsynth {

enum class Strategy { kProbabilityDriven, kTableWide, kCellByCell };

std::string_view to_string(Strategy strategy);
// Accepts "probability-driven", "table-wide", "cell-by-cell".
std::optional<Strategy> parse_strategy(std::string_view text);

// Context-keyed distributions. One entry per key; entries never change.
// Thread-safe.
class DistributionCache {
 public:
  std::shared_ptr<const CategoricalDistribution> find(const ContextKey& key) const;
  // Returns the stored entry, which is the existing one if `key` was present.
  std::shared_ptr<const CategoricalDistribution> insert(const ContextKey& key,
                                                        CategoricalDistribution dist);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<ContextKey, std::shared_ptr<const CategoricalDistribution>, ContextKeyHash>
      entries_;
};

struct PipelineOptions {
  RetryPolicy retry;
  double distribution_temperature = 0.0;
  double cell_temperature = 1.0;
  double table_temperature = 1.0;
  // Free text prepended to every context (seed data).
  std::string seed_text;
  // Distribution queries for distinct contexts issued concurrently.
  std::size_t fetch_concurrency = 1;
  // Table-wide: maximum oracle calls spent collecting `n` rows.
  std::size_t table_batch_cap = 32;
  // Cell-by-cell: abort the run on a row failure instead of skipping the row.
  bool cell_abort_on_failure = false;
  // Cell-by-cell rows run concurrently only when determinism is given up.
  bool deterministic = true;
  std::size_t cell_concurrency = 1;
};

struct GenerationRun {
  Strategy strategy = Strategy::kProbabilityDriven;
  std::uint64_t seed = 0;
  std::int64_t n_requested = 0;
  Table table;
  std::shared_ptr<OracleCallLog> call_log;
  std::uint64_t cache_entries = 0;
  std::uint64_t failed_rows = 0;
  // Set when the run finished with a non-fatal error (table-wide shortfall).
  std::optional<std::string> error;

  std::uint64_t invalid_labels() const { return table.flagged_count(); }
};

// Probability-driven generation. For each feature in schema order: a
// single-category feature is copied to every row without a query; otherwise one
// distribution is fetched per distinct context among the rows (cache first),
// each row is drawn from its context's distribution and numeric ranges are
// realized, then every context is extended with the drawn label.
// Draw order: feature-major, rows in order, one stream; a numeric realization
// draw follows its row's category draw. Throws GenerationError on any failed
// (feature, context); no partial table is returned.
GenerationRun generate_probability_driven(const std::shared_ptr<const DatasetSchema>& schema,
                                          Oracle& oracle, std::int64_t n, std::uint64_t seed,
                                          const PipelineOptions& options = {},
                                          DistributionCache* shared_cache = nullptr);

// Table-wide generation: table prompts for the rows still missing until `n`
// rows arrive or table_batch_cap calls are spent (then run.error reports the
// shortfall). A failed batch after some rows arrived ends the run with
// run.error set; a failed first batch throws the OracleError.
GenerationRun generate_table_wide(const std::shared_ptr<const DatasetSchema>& schema,
                                  Oracle& oracle, std::int64_t n, std::uint64_t seed,
                                  const PipelineOptions& options = {});

// Cell-by-cell generation: one cell prompt per row and multi-category feature,
// conditioned on the row's earlier cells. Rows whose cell stays unparsable are
// skipped and tallied (or abort the run, per options). Oracle failures abort
// the run with GenerationError.
GenerationRun generate_cell_by_cell(const std::shared_ptr<const DatasetSchema>& schema,
                                    Oracle& oracle, std::int64_t n, std::uint64_t seed,
                                    const PipelineOptions& options = {});

}  // namespace pdsynth

#endif  // PDSYNTH_PIPELINE_HPP_
