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

#ifndef PDSYNTH_TABLE_HPP_
#define PDSYNTH_TABLE_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdsynth/schema.hpp"

namespace pdsynth {

// Distribution a cell was drawn from.
struct ProvenanceEntry {
  ContextKey key;
  std::string context;
};

// Generated rows, stored column-major as category codes. Cells whose label is
// not in the feature's category list carry kInvalid and keep the raw label in
// flags().
class Table {
 public:
  static constexpr std::int32_t kInvalid = -1;
  using CellRef = std::pair<std::size_t, std::size_t>;  // (row, column)

  explicit Table(std::shared_ptr<const DatasetSchema> schema);
  // Takes ownership of fully built columns; all must have equal length and
  // hold valid codes.
  Table(std::shared_ptr<const DatasetSchema> schema, std::vector<std::vector<std::int32_t>> columns);

  const DatasetSchema& schema() const { return *schema_; }
  const std::shared_ptr<const DatasetSchema>& schema_ptr() const { return schema_; }
  std::size_t num_rows() const { return columns_.empty() ? 0 : columns_.front().size(); }
  std::size_t num_columns() const { return columns_.size(); }

  void append_codes(std::span<const std::int32_t> codes);
  // Matches each label with FeatureSpec::match_category; misses are flagged.
  void append_labels(std::span<const std::string> labels);

  std::int32_t code(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  std::string_view label(std::size_t row, std::size_t col) const;
  bool flagged(std::size_t row, std::size_t col) const { return code(row, col) == kInvalid; }
  const std::map<CellRef, std::string>& flags() const { return flags_; }
  std::size_t flagged_count() const { return flags_.size(); }
  const std::vector<std::int32_t>& column(std::size_t col) const { return columns_[col]; }

  // Concrete values for a numeric_range column, one per row.
  void set_realized(std::size_t col, std::vector<std::int64_t> values);
  const std::vector<std::int64_t>* realized(std::size_t col) const;

  // Per-row index into `entries` naming the distribution each cell came from.
  void set_provenance(std::size_t col, std::vector<ProvenanceEntry> entries,
                      std::vector<std::uint32_t> row_entry);
  const ProvenanceEntry* provenance(std::size_t row, std::size_t col) const;

 private:
  struct Provenance {
    std::vector<ProvenanceEntry> entries;
    std::vector<std::uint32_t> row_entry;
  };

  std::shared_ptr<const DatasetSchema> schema_;
  std::vector<std::vector<std::int32_t>> columns_;
  std::map<CellRef, std::string> flags_;
  std::vector<std::optional<std::vector<std::int64_t>>> realized_;
  std::vector<std::optional<Provenance>> provenance_;
};

// Header = feature names in schema order. Numeric-range columns with realized
// values hold the integer; everything else the label (flagged cells verbatim).
// Fields are quoted when they contain a comma, quote, CR/LF or edge spaces.
std::string to_csv(const Table& table);

// Inverse of to_csv. Integers in numeric_range columns map back to the first
// containing bin. Throws ShapeMismatch when the header differs from the schema.
Table parse_csv(std::string_view text, std::shared_ptr<const DatasetSchema> schema);

// RFC 4180 style record splitting; exposed for tests.
std::vector<std::vector<std::string>> split_csv(std::string_view text);
std::string csv_escape(std::string_view field);

}  // namespace pdsynth

#endif  // PDSYNTH_TABLE_HPP_
