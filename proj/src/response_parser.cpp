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

#include "pdsynth/response_parser.hpp"

#include <cmath>
#include <vector>

#include "json.hpp"
#include "pdsynth/errors.hpp"
#include "pdsynth/text_util.hpp"

namespace pdsynth {

namespace {

using json = nlohmann::ordered_json;

// Index one past the bracket closing the one at `start`, or npos.
std::size_t matching_close(std::string_view text, std::size_t start) {
  std::vector<char> stack;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_string = true;
        break;
      case '{':
        stack.push_back('}');
        break;
      case '[':
        stack.push_back(']');
        break;
      case '}':
      case ']':
        if (stack.empty() || stack.back() != c) return std::string_view::npos;
        stack.pop_back();
        if (stack.empty()) return i + 1;
        break;
      default:
        break;
    }
  }
  return std::string_view::npos;
}

json parse_first_json(std::string_view text, bool allow_array) {
  auto found = extract_json(text, allow_array);
  if (!found) throw NoJsonFound();
  return json::parse(*found);
}

std::string cell_to_label(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  if (value.is_number()) return value.dump();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  return {};
}

const json* find_column(const json& row, const std::string& name) {
  if (auto it = row.find(name); it != row.end()) return &*it;
  for (auto it = row.begin(); it != row.end(); ++it) {
    if (iequals(trim(it.key()), trim(name))) return &*it;
  }
  return nullptr;
}

void append_row_objects(const json& rows, Table& table) {
  const auto& features = table.schema().features;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const json& row = rows[r];
    if (!row.is_object()) throw SchemaMismatch(r, features.front().name);
    std::vector<std::string> labels;
    labels.reserve(features.size());
    for (const auto& f : features) {
      const json* cell = find_column(row, f.name);
      if (cell == nullptr || cell->is_null() || cell->is_object() || cell->is_array()) {
        throw SchemaMismatch(r, f.name);
      }
      labels.push_back(cell_to_label(*cell));
    }
    table.append_labels(labels);
  }
}

bool is_columnar(const json& obj, const DatasetSchema& schema) {
  for (const auto& f : schema.features) {
    const json* col = find_column(obj, f.name);
    if (col == nullptr || !col->is_array()) return false;
  }
  return true;
}

std::string_view strip_fences(std::string_view text) {
  text = trim(text);
  if (text.starts_with("```")) {
    const auto newline = text.find('\n');
    text = newline == std::string_view::npos ? text.substr(3) : text.substr(newline + 1);
    if (text.ends_with("```")) text.remove_suffix(3);
  }
  return trim(text);
}

}  // namespace

std::optional<std::string> extract_json(std::string_view text, bool allow_array) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '{' && !(allow_array && c == '[')) continue;
    const std::size_t end = matching_close(text, i);
    if (end == std::string_view::npos) continue;
    std::string candidate(text.substr(i, end - i));
    if (json::accept(candidate)) return candidate;
  }
  return std::nullopt;
}

RawDistribution parse_distribution_response(std::string_view text, const FeatureSpec& spec) {
  json obj = parse_first_json(text, /*allow_array=*/false);
  if (obj.size() == 1 && obj.begin()->is_object() && !spec.match_category(obj.begin().key())) {
    json inner = *obj.begin();
    obj = std::move(inner);
  }

  RawDistribution raw;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!it->is_number()) throw NonNumericWeight(it.key());
    auto index = spec.match_category(it.key());
    std::string label = index ? spec.categories[*index] : it.key();
    raw.entries.emplace_back(std::move(label), it->get<double>());
  }
  return raw;
}

Table parse_table_response(std::string_view text, std::shared_ptr<const DatasetSchema> schema) {
  const json doc = parse_first_json(text, /*allow_array=*/true);
  Table table(schema);
  const auto& features = schema->features;

  if (doc.is_array()) {
    append_row_objects(doc, table);
    return table;
  }
  if (is_columnar(doc, *schema)) {
    std::size_t rows = find_column(doc, features.front().name)->size();
    for (const auto& f : features) rows = std::min(rows, find_column(doc, f.name)->size());
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<std::string> labels;
      for (const auto& f : features) {
        const json& cell = (*find_column(doc, f.name))[r];
        if (cell.is_null() || cell.is_object() || cell.is_array()) throw SchemaMismatch(r, f.name);
        labels.push_back(cell_to_label(cell));
      }
      table.append_labels(labels);
    }
    // Ragged columns: report the first row a shorter column is missing.
    for (const auto& f : features) {
      if (find_column(doc, f.name)->size() == rows) continue;
      for (const auto& g : features) {
        if (find_column(doc, g.name)->size() == rows) throw SchemaMismatch(rows, g.name);
      }
    }
    return table;
  }
  for (const auto& [key, value] : doc.items()) {
    if (value.is_array()) {
      append_row_objects(value, table);
      return table;
    }
  }
  throw SchemaMismatch(0, features.front().name);
}

std::string parse_cell_response(std::string_view text, const FeatureSpec& spec) {
  std::string_view value = strip_fences(text);
  while (value.size() >= 2) {
    const char q = value.front();
    if ((q == '"' || q == '\'' || q == '`') && value.back() == q) {
      value = trim(value.substr(1, value.size() - 2));
    } else {
      break;
    }
  }
  auto index = spec.match_category(value);
  if (!index) throw NotACategory(std::string(trim(text)));
  return spec.categories[*index];
}

}  // namespace pdsynth
