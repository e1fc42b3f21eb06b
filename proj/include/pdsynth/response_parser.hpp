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

#ifndef PDSYNTH_RESPONSE_PARSER_HPP_
#define PDSYNTH_RESPONSE_PARSER_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "pdsynth/distribution.hpp"
#include "pdsynth/schema.hpp"
#include "pdsynth/table.hpp"

namespace pdsynth {

// First balanced JSON object (or array, when `allow_array`) in `text` that
// parses, skipping code fences and surrounding prose.
std::optional<std::string> extract_json(std::string_view text, bool allow_array);

// Flat object of label -> number. Keys map to categories by exact match, then
// case-insensitive trimmed match; unmatched keys are kept verbatim so that
// validation reports them. An object wrapping a single nested object (e.g.
// {"probabilities": {...}}) is unwrapped.
// Throws NoJsonFound, NonNumericWeight.
RawDistribution parse_distribution_response(std::string_view text, const FeatureSpec& spec);

// Accepts an array of row objects, an object of column -> array, or an object
// wrapping one such array. Off-list labels are kept and flagged.
// Throws NoJsonFound, SchemaMismatch.
Table parse_table_response(std::string_view text, std::shared_ptr<const DatasetSchema> schema);

// Strips whitespace, code fences and quotes, then matches a category.
// Throws NotACategory.
std::string parse_cell_response(std::string_view text, const FeatureSpec& spec);

}  // namespace pdsynth

#endif  // PDSYNTH_RESPONSE_PARSER_HPP_
