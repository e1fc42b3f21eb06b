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

#include "pdsynth/schema.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>

#include "config_json.hpp"
#include "json.hpp"
#include "pdsynth/errors.hpp"
#include "pdsynth/text_util.hpp"

namespace pdsynth {

namespace {

using json = nlohmann::ordered_json;
using internal::require_string;

bool parse_int(std::string_view text, std::int64_t& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

FeatureKind parse_kind(const std::string& text, const std::string& feature) {
  if (text == "categorical") return FeatureKind::kCategorical;
  if (text == "numeric_range") return FeatureKind::kNumericRange;
  throw SchemaError("feature '" + feature + "': unknown kind '" + text + "'");
}

FeatureSpec parse_feature(const json& obj, std::size_t index) {
  const std::string where = "feature #" + std::to_string(index + 1);
  if (!obj.is_object()) throw SchemaError(where + " must be an object");
  static const std::set<std::string> kKnownKeys = {"name", "kind", "categories", "description",
                                                   "cap"};
  for (const auto& [key, _] : obj.items()) {
    if (!kKnownKeys.contains(key)) throw SchemaError(where + ": unknown key '" + key + "'");
  }

  FeatureSpec spec;
  spec.name = require_string(obj, "name", where);
  if (obj.contains("kind")) spec.kind = parse_kind(require_string(obj, "kind", where), spec.name);
  if (obj.contains("description")) spec.description = require_string(obj, "description", where);

  auto cats = obj.find("categories");
  if (cats == obj.end() || !cats->is_array()) {
    throw SchemaError("feature '" + spec.name + "': 'categories' must be a list");
  }
  for (const auto& c : *cats) {
    if (!c.is_string()) throw SchemaError("feature '" + spec.name + "': categories must be strings");
    spec.categories.push_back(c.get<std::string>());
  }

  if (auto cap = obj.find("cap"); cap != obj.end()) {
    if (!cap->is_number_integer()) throw SchemaError("feature '" + spec.name + "': 'cap' must be an integer");
    spec.cap = cap->get<std::int64_t>();
  }
  return spec;
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::kNumericRange ? "numeric_range" : "categorical";
}

RangeBounds parse_range_label(std::string_view label, std::optional<std::int64_t> cap) {
  const std::string_view text = trim(label);
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  if (!text.empty() && text.back() == '+') {
    if (!parse_int(trim(text.substr(0, text.size() - 1)), lo) || lo < 0 || !cap || *cap < lo) {
      throw UnparsableRange(std::string(label));
    }
    return {lo, *cap};
  }
  const auto dash = text.find('-', 1);
  if (dash == std::string_view::npos || !parse_int(trim(text.substr(0, dash)), lo) ||
      !parse_int(trim(text.substr(dash + 1)), hi) || lo < 0 || lo > hi) {
    throw UnparsableRange(std::string(label));
  }
  return {lo, hi};
}

std::optional<std::size_t> FeatureSpec::category_index(std::string_view label) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == label) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> FeatureSpec::match_category(std::string_view text) const {
  if (auto exact = category_index(text)) return exact;
  const std::string_view trimmed = trim(text);
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (iequals(trim(categories[i]), trimmed)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> DatasetSchema::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].name == name) return i;
  }
  return std::nullopt;
}

const FeatureSpec& DatasetSchema::feature(std::string_view name) const {
  auto index = feature_index(name);
  if (!index) throw UnknownFeature(std::string(name));
  return features[*index];
}

void validate_schema(const DatasetSchema& schema) {
  if (schema.features.empty()) throw SchemaError("schema has no features");
  if (schema.sample_size < 1) throw SchemaError("sample_size must be positive");

  std::set<std::string> names;
  for (const auto& f : schema.features) {
    if (f.name.empty()) throw SchemaError("feature with empty name");
    if (!names.insert(f.name).second) throw SchemaError("duplicate feature '" + f.name + "'");
    if (f.categories.empty()) throw SchemaError("feature '" + f.name + "' has an empty category list");

    std::set<std::string> seen;
    for (const auto& c : f.categories) {
      if (!seen.insert(c).second) {
        throw SchemaError("feature '" + f.name + "' lists category '" + c + "' twice");
      }
      if (f.kind == FeatureKind::kNumericRange) {
        try {
          parse_range_label(c, f.cap);
        } catch (const UnparsableRange&) {
          throw SchemaError("feature '" + f.name + "': unparsable numeric range label '" + c + "'");
        }
      }
    }
  }
}

DatasetSchema parse_schema(std::string_view config_text) {
  const json doc = internal::parse_config_json(config_text);
  if (!doc.is_object()) throw SchemaError("config must be a JSON object");

  DatasetSchema schema;
  if (doc.contains("dataset_description")) {
    schema.dataset_description = require_string(doc, "dataset_description", "schema");
  }
  if (auto it = doc.find("sample_size"); it != doc.end()) {
    if (!it->is_number_integer()) throw SchemaError("sample_size must be an integer");
    schema.sample_size = it->get<std::int64_t>();
  }
  auto features = doc.find("features");
  if (features == doc.end() || !features->is_array()) {
    throw SchemaError("config has no 'features' list");
  }
  for (std::size_t i = 0; i < features->size(); ++i) {
    schema.features.push_back(parse_feature((*features)[i], i));
  }
  validate_schema(schema);
  return schema;
}

DatasetSchema load_schema(const std::filesystem::path& path) {
  return parse_schema(read_file(path));
}

std::string serialize_schema(const DatasetSchema& schema) {
  json doc = json::object();
  doc["dataset_description"] = schema.dataset_description;
  doc["sample_size"] = schema.sample_size;
  json features = json::array();
  for (const auto& f : schema.features) {
    json obj = json::object();
    obj["name"] = f.name;
    obj["kind"] = std::string(to_string(f.kind));
    obj["categories"] = f.categories;
    obj["description"] = f.description;
    if (f.cap) obj["cap"] = *f.cap;
    features.push_back(std::move(obj));
  }
  doc["features"] = std::move(features);
  return doc.dump(2) + "\n";
}

void validate_context(const Context& ctx, const DatasetSchema& schema) {
  std::optional<std::size_t> previous;
  for (const auto& [name, label] : ctx.assignments) {
    auto index = schema.feature_index(name);
    if (!index) throw SchemaError("context assigns unknown feature '" + name + "'");
    if (previous && *index <= *previous) {
      throw SchemaError("context assignment for '" + name + "' is out of schema order");
    }
    if (!schema.features[*index].category_index(label)) {
      throw SchemaError("context assigns '" + label + "', not a category of '" + name + "'");
    }
    previous = index;
  }
}

std::string render_context(const Context& ctx, const DatasetSchema& /*schema*/) {
  std::string out = ctx.seed_text;
  for (const auto& [name, label] : ctx.assignments) {
    if (!out.empty()) out += ' ';
    out += name;
    out += " is ";
    out += label;
    out += '.';
  }
  return out;
}

bool context_has_clause(std::string_view rendered, std::string_view feature,
                        std::string_view label) {
  std::string clause;
  clause.reserve(feature.size() + label.size() + 5);
  clause.append(feature).append(" is ").append(label).append(".");
  for (std::size_t pos = rendered.find(clause); pos != std::string_view::npos;
       pos = rendered.find(clause, pos + 1)) {
    const bool starts = pos == 0 || (pos >= 2 && rendered.substr(pos - 2, 2) == ". ");
    const std::size_t end = pos + clause.size();
    const bool ends = end == rendered.size() || rendered[end] == ' ';
    if (starts && ends) return true;
  }
  return false;
}

std::string ContextKey::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx", static_cast<unsigned long long>(digest[0]),
                static_cast<unsigned long long>(digest[1]));
  return buf;
}

ContextKey context_key(std::string_view target_feature, std::string_view rendered) {
  // FNV-1a, 128-bit parameters. The target name is length-prefixed (8 bytes,
  // little endian) so that (feature, context) pairs cannot alias.
  using u128 = unsigned __int128;
  const u128 kPrime = (static_cast<u128>(0x0000000001000000ULL) << 64) | 0x000000000000013BULL;
  u128 hash = (static_cast<u128>(0x6c62272e07bb0142ULL) << 64) | 0x62b821756295c58dULL;

  auto mix = [&](unsigned char byte) {
    hash ^= byte;
    hash *= kPrime;
  };
  std::uint64_t length = target_feature.size();
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(length >> (8 * i)));
  for (char c : target_feature) mix(static_cast<unsigned char>(c));
  for (char c : rendered) mix(static_cast<unsigned char>(c));

  ContextKey key;
  key.digest[0] = static_cast<std::uint64_t>(hash >> 64);
  key.digest[1] = static_cast<std::uint64_t>(hash);
  return key;
}

}  // namespace pdsynth
