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

#include "pdsynth/prompts.hpp"

#include <vector>

namespace pdsynth {

namespace {

std::string python_str_repr(std::string_view s) {
  const bool has_single = s.find('\'') != std::string_view::npos;
  const bool has_double = s.find('"') != std::string_view::npos;
  const char quote = (has_single && !has_double) ? '"' : '\'';
  std::string out(1, quote);
  for (char c : s) {
    if (c == '\\' || c == quote) out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += quote;
  return out;
}

std::string single_quoted(std::string_view name) { return "'" + std::string(name) + "'"; }

// 'A' / 'A' and 'B' / 'A', 'B', and 'C'
std::string column_list(const DatasetSchema& schema) {
  const auto& f = schema.features;
  if (f.size() == 1) return single_quoted(f[0].name);
  if (f.size() == 2) return single_quoted(f[0].name) + " and " + single_quoted(f[1].name);
  std::string out;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) out += single_quoted(f[i].name) + ", ";
  return out + "and " + single_quoted(f.back().name);
}

}  // namespace

std::string_view to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::kTableWide:
      return "table_wide";
    case PromptKind::kCellByCell:
      return "cell_by_cell";
    case PromptKind::kDistribution:
      return "distribution";
  }
  return "unknown";
}

std::string python_list_repr(std::span<const std::string> items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += python_str_repr(items[i]);
  }
  return out + "]";
}

std::string feature_description(const FeatureSpec& feature, const DatasetSchema& schema) {
  if (schema.dataset_description.empty()) return feature.description;
  if (feature.description.empty()) return schema.dataset_description;
  return schema.dataset_description + " " + feature.description;
}

const std::string_view kDistributionResponseInstruction =
    "Return a single flat JSON object that maps every category listed above to its "
    "probability for the given context. Each probability is a number between 0 and 1, "
    "and the probabilities must sum to 1.\n";

Prompt build_table_prompt(const DatasetSchema& schema, std::int64_t rows) {
  // The first single-category feature anchors the "reflecting population"
  // clause on the last sampled feature.
  const FeatureSpec* fixed = nullptr;
  const FeatureSpec* last_sampled = nullptr;
  for (const auto& f : schema.features) {
    if (f.single_category() && fixed == nullptr) fixed = &f;
    if (!f.single_category()) last_sampled = &f;
  }

  std::string text = "Generate a table with exactly " + std::to_string(rows) +
                     " records with columns\n" + column_list(schema) + ".\n\n";
  for (const auto& f : schema.features) {
    if (f.single_category()) {
      text += single_quoted(f.name) + " contains identical values, all set to " +
              single_quoted(f.categories.front()) + ".\n\n";
      continue;
    }
    text += single_quoted(f.name) + " should be sampled from the categories \n" +
            single_quoted(python_list_repr(f.categories));
    if (&f == last_sampled && fixed != nullptr) {
      text += " reflecting \npopulation in " + single_quoted(fixed->name) + " of " +
              fixed->categories.front();
    }
    text += ".\n\n";
  }
  text +=
      "Only return the JSON object. Do not include any additional text, \n"
      "explanations, or formatting.\n\n";
  return {PromptKind::kTableWide, std::move(text)};
}

Prompt build_cell_prompt(const FeatureSpec& feature, std::string_view context,
                         const DatasetSchema& schema) {
  std::string text =
      "Based on the provided context and data description, generate one \n"
      "random sample for the column " + feature.name + ".\n\n"
      "Sample from the following categories: " + python_list_repr(feature.categories) + "\n"
      "# Context: " + std::string(context) + "\n"
      "# Data Description: " + feature_description(feature, schema) + "\n\n"
      "The output should be limited strictly to the chosen category \n"
      "without any additional explanations or formatting.\n\n"
      "# Response:\n";
  return {PromptKind::kCellByCell, std::move(text)};
}

Prompt build_distribution_prompt(const FeatureSpec& feature, std::string_view context,
                                 const DatasetSchema& schema) {
  std::string text =
      "Based on the provided context and data description, generate one random sample\n"
      "for the column " + feature.name + ".\n"
      "Sample from the provided categories\n\n"
      "# Categories: " + python_list_repr(feature.categories) + "\n"
      "# Context: " + std::string(context) + "\n"
      "# Data Description: " + feature_description(feature, schema) + "\n\n"
      "The output should be limited strictly to the JSON structure without any \n"
      "additional explanations or formatting.\n\n";
  text += kDistributionResponseInstruction;
  return {PromptKind::kDistribution, std::move(text)};
}

}  // namespace pdsynth
