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

#ifndef PDSYNTH_PROMPTS_HPP_
#define PDSYNTH_PROMPTS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "pdsynth/schema.hpp"

namespace pdsynth {

enum class PromptKind { kTableWide, kCellByCell, kDistribution };

std::string_view to_string(PromptKind kind);

struct Prompt {
  PromptKind kind = PromptKind::kDistribution;
  std::string text;
};

// Renders labels the way a Python list prints: ['a', 'b'].
std::string python_list_repr(std::span<const std::string> items);

// Text substituted for {description}: dataset description followed by the
// feature's own description.
std::string feature_description(const FeatureSpec& feature, const DatasetSchema& schema);

// Instruction appended to the distribution template so the reply is a
// probability map rather than a single sampled value.
extern const std::string_view kDistributionResponseInstruction;

// Table-wide template instantiated for the schema and `rows` records.
Prompt build_table_prompt(const DatasetSchema& schema, std::int64_t rows);

// Cell-by-cell template: one value of `feature` given the rendered context.
Prompt build_cell_prompt(const FeatureSpec& feature, std::string_view context,
                         const DatasetSchema& schema);

// Distribution template plus kDistributionResponseInstruction.
Prompt build_distribution_prompt(const FeatureSpec& feature, std::string_view context,
                                 const DatasetSchema& schema);

}  // namespace pdsynth

#endif  // PDSYNTH_PROMPTS_HPP_
