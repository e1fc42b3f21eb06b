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

#include "pdsynth/table.hpp"

#include <charconv>

#include "pdsynth/errors.hpp"

namespace pdsynth {

Table::Table(std::shared_ptr<const DatasetSchema> schema)
    : schema_(std::move(schema)),
      columns_(schema_->features.size()),
      realized_(schema_->features.size()),
      provenance_(schema_->features.size()) {}

Table::Table(std::shared_ptr<const DatasetSchema> schema,
             std::vector<std::vector<std::int32_t>> columns)
    : schema_(std::move(schema)),
      columns_(std::move(columns)),
      realized_(schema_->features.size()),
      provenance_(schema_->features.size()) {
  if (columns_.size() != schema_->features.size()) {
    throw ShapeMismatch("table needs one column per schema feature");
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].size() != columns_.front().size()) throw ShapeMismatch("ragged table columns");
    const auto limit = static_cast<std::int32_t>(schema_->features[c].categories.size());
    for (std::int32_t code : columns_[c]) {
      if (code < 0 || code >= limit) throw ShapeMismatch("category code out of range");
    }
  }
}

void Table::append_codes(std::span<const std::int32_t> codes) {
  if (codes.size() != columns_.size()) throw ShapeMismatch("row width differs from schema");
  for (std::size_t c = 0; c < codes.size(); ++c) {
    const auto limit = static_cast<std::int32_t>(schema_->features[c].categories.size());
    if (codes[c] < 0 || codes[c] >= limit) throw ShapeMismatch("category code out of range");
  }
  for (std::size_t c = 0; c < codes.size(); ++c) columns_[c].push_back(codes[c]);
}

void Table::append_labels(std::span<const std::string> labels) {
  if (labels.size() != columns_.size()) throw ShapeMismatch("row width differs from schema");
  const std::size_t row = num_rows();
  for (std::size_t c = 0; c < labels.size(); ++c) {
    auto index = schema_->features[c].match_category(labels[c]);
    if (index) {
      columns_[c].push_back(static_cast<std::int32_t>(*index));
    } else {
      columns_[c].push_back(kInvalid);
      flags_.emplace(CellRef{row, c}, labels[c]);
    }
  }
}

std::string_view Table::label(std::size_t row, std::size_t col) const {
  const std::int32_t c = code(row, col);
  if (c == kInvalid) return flags_.at({row, col});
  return schema_->features[col].categories[static_cast<std::size_t>(c)];
}

void Table::set_realized(std::size_t col, std::vector<std::int64_t> values) {
  if (values.size() != num_rows()) throw ShapeMismatch("realized column length differs");
  realized_[col] = std::move(values);
}

const std::vector<std::int64_t>* Table::realized(std::size_t col) const {
  return realized_[col] ? &*realized_[col] : nullptr;
}

void Table::set_provenance(std::size_t col, std::vector<ProvenanceEntry> entries,
                           std::vector<std::uint32_t> row_entry) {
  if (row_entry.size() != num_rows()) throw ShapeMismatch("provenance length differs");
  provenance_[col] = Provenance{std::move(entries), std::move(row_entry)};
}

const ProvenanceEntry* Table::provenance(std::size_t row, std::size_t col) const {
  if (!provenance_[col]) return nullptr;
  return &provenance_[col]->entries[provenance_[col]->row_entry[row]];
}

std::string csv_escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string_view::npos ||
      (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string to_csv(const Table& table) {
  const auto& features = table.schema().features;
  std::string out;
  for (std::size_t c = 0; c < features.size(); ++c) {
    if (c > 0) out += ',';
    out += csv_escape(features[c].name);
  }
  out += '\n';
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    for (std::size_t c = 0; c < features.size(); ++c) {
      if (c > 0) out += ',';
      const auto* realized = table.realized(c);
      if (realized != nullptr && !table.flagged(r, c)) {
        out += std::to_string((*realized)[r]);
      } else {
        out += csv_escape(table.label(r, c));
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw ShapeMismatch("unterminated quoted CSV field");
  if (field_started || !record.empty()) end_record();
  return records;
}

Table parse_csv(std::string_view text, std::shared_ptr<const DatasetSchema> schema) {
  const auto records = split_csv(text);
  if (records.empty()) throw ShapeMismatch("CSV has no header");
  const auto& features = schema->features;
  const auto& header = records.front();
  bool header_ok = header.size() == features.size();
  for (std::size_t c = 0; header_ok && c < features.size(); ++c) {
    header_ok = header[c] == features[c].name;
  }
  if (!header_ok) throw ShapeMismatch("CSV header does not match the schema features");

  Table table(schema);
  std::vector<std::vector<std::int64_t>> realized(features.size());
  std::vector<bool> has_realized(features.size(), false);
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto row = records[r];
    if (row.size() != features.size()) {
      throw ShapeMismatch("CSV record " + std::to_string(r) + " has " + std::to_string(row.size()) +
                          " fields, expected " + std::to_string(features.size()));
    }
    for (std::size_t c = 0; c < features.size(); ++c) {
      const auto& f = features[c];
      if (f.kind != FeatureKind::kNumericRange) continue;
      std::int64_t value = 0;
      const auto& s = row[c];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc() || ptr != s.data() + s.size()) continue;
      for (const auto& label : f.categories) {
        const RangeBounds b = parse_range_label(label, f.cap);
        if (value >= b.lo && value <= b.hi) {
          row[c] = label;
          if (!has_realized[c]) {
            realized[c].assign(r - 1, 0);
            has_realized[c] = true;
          }
          break;
        }
      }
      if (has_realized[c]) {
        realized[c].resize(r - 1, 0);
        realized[c].push_back(value);
      }
    }
    table.append_labels(row);
  }
  for (std::size_t c = 0; c < features.size(); ++c) {
    if (has_realized[c]) {
      realized[c].resize(table.num_rows(), 0);
      table.set_realized(c, std::move(realized[c]));
    }
  }
  return table;
}

}  // namespace pdsynth
