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

#ifndef PDSYNTH_FIDELITY_HPP_
#define PDSYNTH_FIDELITY_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdsynth/distribution.hpp"
#include "pdsynth/fixture_oracle.hpp"
#include "pdsynth/oracle.hpp"
#include "pdsynth/schema.hpp"
#include "pdsynth/table.hpp"

namespace pdsynth {

// Context label used by marginal (unconditioned) tables.
inline constexpr std::string_view kAllRows = "(all)";

// Percent of `target` categories within each context (a category of `given`,
// or kAllRows). Contexts without valid rows have support 0 and no values.
struct FrequencyTable {
  std::optional<std::string> given;
  std::string target;
  std::vector<std::string> contexts;
  std::vector<std::string> categories;
  std::vector<std::vector<std::uint64_t>> counts;
  std::vector<std::uint64_t> support;
  std::vector<std::vector<std::optional<double>>> percent;
  // Rows left out because the target or given cell is flagged.
  std::uint64_t invalid_rows = 0;

  std::uint64_t valid_rows() const;
  // Row `context` as a distribution; nullopt if the row has no values.
  std::optional<CategoricalDistribution> row_distribution(std::size_t context) const;
};

// Throws UnknownFeature.
FrequencyTable conditional_frequencies(const Table& table, std::string_view target,
                                       std::string_view given);
FrequencyTable marginal_frequencies(const Table& table, std::string_view target);

// Reference table from fixture entries: for each category g of `given`, the
// entry for `target` whose context contains "<given> is <g>.". Counts and
// support stay 0. Throws ShapeMismatch if a context matches several entries.
FrequencyTable reference_from_fixture(const FixtureData& fixture, const DatasetSchema& schema,
                                      std::string_view target, std::string_view given);

// ½ Σ |p_i − q_i| over matching labels. Throws CategoryMismatch.
double total_variation(const CategoricalDistribution& p, const CategoricalDistribution& q);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  // Categories with expected count < 5, merged into one bin; the bin is
  // dropped when its own expected count is still < 5.
  std::vector<std::string> pooled;
  bool pooled_bin_dropped = false;
  std::string note;
};

// Σ (O−E)²/E with E = n·p. `observed` is aligned with expected.categories().
// Throws AllPooled when fewer than two bins remain; CategoryMismatch on a
// length mismatch.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               const CategoricalDistribution& expected, std::uint64_t n);

struct CellAggregate {
  double mean = 0.0;
  double stddev = 0.0;   // sample (n − 1) standard deviation
  std::size_t present = 0;  // runs that had a value
};

struct RunAggregate {
  std::optional<std::string> given;
  std::string target;
  std::vector<std::string> contexts;
  std::vector<std::string> categories;
  std::vector<std::vector<CellAggregate>> cells;
  std::size_t run_count = 0;
  double mean_invalid_percent = 0.0;
};

// Per-cell mean and sample std over the runs where the cell has a value.
// Throws ShapeMismatch.
RunAggregate aggregate_runs(std::span<const FrequencyTable> tables);

// Mean over reference contexts of TV(reference row, aggregate mean row);
// contexts missing on either side are skipped. NaN if none overlap.
double mean_total_variation(const FrequencyTable& reference, const RunAggregate& aggregate);

struct StrategySummary {
  std::string name;
  std::optional<RunAggregate> aggregate;
  std::size_t runs = 0;
  CallCounters calls;  // summed over runs
  std::optional<std::string> failure;
};

struct ComparisonReport {
  std::string text;
  // Panel file name -> delimited data (given, target, percent, strategy).
  std::map<std::string, std::string> panels;
};

// Throws ShapeMismatch when an aggregate does not match the reference layout.
ComparisonReport comparison_report(const FrequencyTable& reference, std::string_view reference_name,
                                   std::span<const StrategySummary> strategies);

// One decimal, or "-" for a missing value.
std::string format_percent(std::optional<double> value);

}  // namespace pdsynth

#endif  // PDSYNTH_FIDELITY_HPP_
