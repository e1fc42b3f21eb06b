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

#include "pdsynth/fixture_oracle.hpp"

#include <set>

#include "config_json.hpp"
#include "pdsynth/errors.hpp"
#include "pdsynth/text_util.hpp"

namespace pdsynth {

namespace {

using json = nlohmann::ordered_json;
using internal::require_string;

constexpr std::string_view kScriptedFailure =
    "I'm sorry, I can't provide that information right now.";

RawDistribution parse_weights(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + ": 'distribution' must be an object");
  RawDistribution raw;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!it->is_number()) throw SchemaError(where + ": weight for '" + it.key() + "' is not a number");
    raw.entries.emplace_back(it.key(), it->get<double>());
  }
  return raw;
}

FixtureEntry parse_entry(const json& obj, std::size_t index) {
  const std::string where = "fixture entry #" + std::to_string(index + 1);
  if (!obj.is_object()) throw SchemaError(where + " must be an object");
  FixtureEntry entry;
  entry.feature = require_string(obj, "feature", where);
  entry.context = obj.contains("context") ? require_string(obj, "context", where) : "";
  auto dist = obj.find("distribution");
  if (dist == obj.end()) throw SchemaError(where + ": missing 'distribution'");
  entry.distribution = parse_weights(*dist, where);
  if (auto it = obj.find("fail_times"); it != obj.end()) {
    if (!it->is_number_integer() || it->get<int>() < 0) {
      throw SchemaError(where + ": 'fail_times' must be a non-negative integer");
    }
    entry.fail_times = it->get<int>();
  }
  if (obj.contains("fail_kind")) {
    const std::string kind = require_string(obj, "fail_kind", where);
    if (kind == "malformed") {
      entry.fail_kind = FailKind::kMalformed;
    } else if (kind == "transport") {
      entry.fail_kind = FailKind::kTransport;
    } else {
      throw SchemaError(where + ": unknown fail_kind '" + kind + "'");
    }
  }
  if (obj.contains("source")) entry.source = require_string(obj, "source", where);
  return entry;
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) throw SchemaError(where + ": '" + key + "' must be a list");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) throw SchemaError(where + ": '" + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

const FixtureEntry* FixtureData::find(std::string_view feature, std::string_view context) const {
  for (const auto& e : entries) {
    if (e.feature == feature && e.context == context) return &e;
  }
  return nullptr;
}

FixtureData parse_fixture(std::string_view text) {
  const json doc = internal::parse_config_json(text);
  if (!doc.is_object()) throw SchemaError("fixture must be a JSON object");

  FixtureData data;
  if (doc.contains("name")) data.name = require_string(doc, "name", "fixture");
  if (doc.contains("note")) data.note = require_string(doc, "note", "fixture");
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) throw SchemaError("fixture 'seed' must be a non-negative integer");
    data.seed = it->get<std::uint64_t>();
  }

  if (auto it = doc.find("entries"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("fixture 'entries' must be a list");
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < it->size(); ++i) {
      FixtureEntry entry = parse_entry((*it)[i], i);
      if (!seen.emplace(entry.feature, entry.context).second) {
        throw SchemaError("fixture lists feature '" + entry.feature + "' with context '" +
                          entry.context + "' twice");
      }
      data.entries.push_back(std::move(entry));
    }
  }

  if (auto it = doc.find("cells"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("fixture 'cells' must be an object");
    if (auto s = it->find("sample_from_entries"); s != it->end()) {
      if (!s->is_boolean()) throw SchemaError("'sample_from_entries' must be true or false");
      data.cell_sampling = s->get<bool>();
    }
    if (auto scripts = it->find("scripts"); scripts != it->end()) {
      if (!scripts->is_array()) throw SchemaError("fixture cell 'scripts' must be a list");
      for (std::size_t i = 0; i < scripts->size(); ++i) {
        const json& s = (*scripts)[i];
        const std::string where = "cell script #" + std::to_string(i + 1);
        if (!s.is_object()) throw SchemaError(where + " must be an object");
        CellScript script;
        script.feature = require_string(s, "feature", where);
        if (s.contains("context")) script.context = require_string(s, "context", where);
        script.responses = string_list(s, "responses", where);
        if (script.responses.empty()) throw SchemaError(where + " has no responses");
        data.cell_scripts.push_back(std::move(script));
      }
    }
  }

  if (auto it = doc.find("tables"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("fixture 'tables' must be an object");
    if (it->contains("responses")) data.table_responses = string_list(*it, "responses", "tables");
    if (auto r = it->find("rows_per_call"); r != it->end()) {
      if (!r->is_number_integer() || r->get<std::int64_t>() < 1) {
        throw SchemaError("'rows_per_call' must be a positive integer");
      }
      data.table_rows_per_call = r->get<std::int64_t>();
    }
  }
  return data;
}

FixtureData load_fixture(const std::filesystem::path& path) {
  return parse_fixture(read_file(path));
}

FixtureOracle::FixtureOracle(std::shared_ptr<const FixtureData> data, std::uint64_t seed,
                             std::shared_ptr<const DatasetSchema> schema)
    : data_(std::move(data)), schema_(std::move(schema)), rng_(derive_stream_seed(seed, data_->seed)) {}

std::uint64_t FixtureOracle::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::string FixtureOracle::complete(const OracleRequest& request) {
  std::lock_guard lock(mu_);
  ++calls_;
  switch (request.kind) {
    case PromptKind::kDistribution:
      return answer_distribution(request);
    case PromptKind::kCellByCell:
      return answer_cell(request);
    case PromptKind::kTableWide:
      return answer_table(request);
  }
  throw OracleError("unsupported prompt kind");
}

std::string FixtureOracle::answer_distribution(const OracleRequest& request) {
  const FixtureEntry* entry = data_->find(request.feature, request.context);
  if (entry == nullptr) throw FixtureMissingEntry(request.feature, request.context);
  const auto index = static_cast<std::size_t>(entry - data_->entries.data());
  int& served = failures_served_[index];
  if (served < entry->fail_times) {
    ++served;
    if (entry->fail_kind == FailKind::kTransport) throw TransportError("scripted transport failure");
    return std::string(kScriptedFailure);
  }
  return to_json(entry->distribution);
}

std::string FixtureOracle::sample_entry_label(const FixtureEntry& entry) {
  double total = 0.0;
  for (const auto& [_, w] : entry.distribution.entries) total += w;
  const double target = rng_.next_uniform() * total;
  double cumulative = 0.0;
  const std::string* chosen = nullptr;
  for (const auto& [label, w] : entry.distribution.entries) {
    if (w <= 0.0) continue;
    cumulative += w;
    chosen = &label;
    if (target < cumulative) break;
  }
  if (chosen == nullptr) throw FixtureMissingEntry(entry.feature, entry.context);
  return *chosen;
}

std::string FixtureOracle::answer_cell(const OracleRequest& request) {
  const CellScript* match = nullptr;
  std::size_t match_index = 0;
  for (std::size_t i = 0; i < data_->cell_scripts.size(); ++i) {
    const auto& s = data_->cell_scripts[i];
    if (s.feature != request.feature) continue;
    if (s.context && *s.context == request.context) {
      match = &s;
      match_index = i;
      break;
    }
    if (!s.context && match == nullptr) {
      match = &s;
      match_index = i;
    }
  }
  if (match != nullptr) {
    std::size_t& cursor = script_cursor_[match_index];
    return match->responses[cursor++ % match->responses.size()];
  }
  if (data_->cell_sampling) {
    if (const FixtureEntry* entry = data_->find(request.feature, request.context)) {
      return sample_entry_label(*entry);
    }
  }
  throw FixtureMissingEntry(request.feature, request.context);
}

std::string FixtureOracle::answer_table(const OracleRequest& request) {
  const std::uint64_t call = table_calls_++;
  if (!data_->table_responses.empty()) {
    const auto last = data_->table_responses.size() - 1;
    return data_->table_responses[std::min<std::uint64_t>(call, last)];
  }
  if (!data_->table_rows_per_call || !schema_) throw FixtureMissingEntry("<table>", "");

  const std::int64_t rows = std::min(*data_->table_rows_per_call, request.rows_requested);
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (std::int64_t r = 0; r < rows; ++r) {
    Context ctx;
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (const auto& f : schema_->features) {
      std::string label;
      if (f.single_category()) {
        label = f.categories.front();
      } else {
        const std::string rendered = render_context(ctx, *schema_);
        const FixtureEntry* entry = data_->find(f.name, rendered);
        if (entry == nullptr) throw FixtureMissingEntry(f.name, rendered);
        label = sample_entry_label(*entry);
      }
      row[f.name] = label;
      ctx.assignments.emplace_back(f.name, std::move(label));
    }
    out.push_back(std::move(row));
  }
  return out.dump();
}

}  // namespace pdsynth
