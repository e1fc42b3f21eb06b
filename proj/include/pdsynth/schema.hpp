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

#ifndef PDSYNTH_SCHEMA_HPP_
#define PDSYNTH_SCHEMA_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pdsynth {

enum class FeatureKind { kCategorical, kNumericRange };

std::string_view to_string(FeatureKind kind);

// Closed integer interval described by a numeric_range category label.
struct RangeBounds {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

// Parses "lo-hi" (closed) or "N+" (open, bounded above by `cap`).
// Throws UnparsableRange.
RangeBounds parse_range_label(std::string_view label, std::optional<std::int64_t> cap);

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kCategorical;
  std::vector<std::string> categories;
  std::string description;
  // Upper bound for open "N+" labels of a numeric_range feature.
  std::optional<std::int64_t> cap;

  std::optional<std::size_t> category_index(std::string_view label) const;
  bool single_category() const { return categories.size() == 1; }
  // Exact match first, then case-insensitive after trimming whitespace.
  std::optional<std::size_t> match_category(std::string_view text) const;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

// Ordered features; generation order is list order.
struct DatasetSchema {
  std::vector<FeatureSpec> features;
  std::string dataset_description;
  std::int64_t sample_size = 1;

  std::optional<std::size_t> feature_index(std::string_view name) const;
  // Throws UnknownFeature.
  const FeatureSpec& feature(std::string_view name) const;

  friend bool operator==(const DatasetSchema&, const DatasetSchema&) = default;
};

// Throws SchemaError if any feature or schema invariant is broken.
void validate_schema(const DatasetSchema& schema);

// Reads the schema keys of a config document. Keys used by fixtures and
// references ("entries", "cells", ...) are ignored, so one file may carry both.
// Throws ConfigSyntaxError or SchemaError.
DatasetSchema parse_schema(std::string_view config_text);
DatasetSchema load_schema(const std::filesystem::path& path);
std::string serialize_schema(const DatasetSchema& schema);

// Partial row assignment of already generated features.
struct Context {
  std::vector<std::pair<std::string, std::string>> assignments;
  std::string seed_text;

  friend bool operator==(const Context&, const Context&) = default;
};

// Throws SchemaError when assignments are out of schema order, repeat a
// feature, or use a label outside the feature's categories.
void validate_context(const Context& ctx, const DatasetSchema& schema);

// Canonical form: seed text, then "<feature> is <label>." clauses in schema
// order, single-space separated. The empty context renders to "".
std::string render_context(const Context& ctx, const DatasetSchema& schema);

// True if `rendered` contains the clause "<feature> is <label>." on a clause
// boundary.
bool context_has_clause(std::string_view rendered, std::string_view feature,
                        std::string_view label);

// 128-bit FNV-1a digest of (target feature, rendered context).
struct ContextKey {
  std::array<std::uint64_t, 2> digest{};  // {high, low}

  std::string hex() const;
  friend auto operator<=>(const ContextKey&, const ContextKey&) = default;
};

ContextKey context_key(std::string_view target_feature, std::string_view rendered);

struct ContextKeyHash {
  std::size_t operator()(const ContextKey& key) const noexcept {
    return static_cast<std::size_t>(key.digest[1] ^ (key.digest[0] * 0x9e3779b97f4a7c15ULL));
  }
};

}  // namespace pdsynth

#endif  // PDSYNTH_SCHEMA_HPP_
