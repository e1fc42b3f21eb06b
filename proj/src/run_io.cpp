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

#include "pdsynth/run_io.hpp"

#include "config_json.hpp"
#include "json.hpp"
#include "pdsynth/errors.hpp"
#include "pdsynth/table.hpp"
#include "pdsynth/text_util.hpp"

namespace pdsynth {

namespace {

using ordered_json = nlohmann::ordered_json;

std::filesystem::path with_suffix(const std::filesystem::path& stem, std::string_view suffix) {
  std::filesystem::path out = stem;
  out += suffix;
  return out;
}

}  // namespace

RunReport make_run_report(const GenerationRun& run) {
  RunReport r;
  r.strategy = std::string(to_string(run.strategy));
  r.seed = run.seed;
  r.n_requested = run.n_requested;
  r.rows = run.table.num_rows();
  r.calls = run.call_log ? run.call_log->counters() : CallCounters{};
  r.invalid_labels = run.invalid_labels();
  r.failed_rows = run.failed_rows;
  r.cache_entries = run.cache_entries;
  if (run.error) {
    r.status = "partial";
    r.error = *run.error;
  }
  for (const auto& f : run.table.schema().features) r.features.push_back(f.name);
  return r;
}

std::string serialize_run_report(const RunReport& r) {
  ordered_json doc;
  doc["strategy"] = r.strategy;
  doc["seed"] = r.seed;
  doc["n_requested"] = r.n_requested;
  doc["rows"] = r.rows;
  doc["distribution_queries"] = r.calls.distribution_queries;
  doc["cell_queries"] = r.calls.cell_queries;
  doc["table_queries"] = r.calls.table_queries;
  doc["retries"] = r.calls.retries;
  doc["cache_hits"] = r.calls.cache_hits;
  doc["transport_calls"] = r.calls.transport_calls;
  doc["cache_entries"] = r.cache_entries;
  doc["invalid_labels"] = r.invalid_labels;
  doc["failed_rows"] = r.failed_rows;
  doc["status"] = r.status;
  doc["error"] = r.error;
  doc["features"] = r.features;
  return doc.dump(2) + "\n";
}

RunReport parse_run_report(std::string_view text) {
  const auto doc = internal::parse_config_json(text);
  if (!doc.is_object()) throw SchemaError("run report must be a JSON object");
  try {
    RunReport r;
    r.strategy = doc.at("strategy").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.n_requested = doc.at("n_requested").get<std::int64_t>();
    r.rows = doc.at("rows").get<std::uint64_t>();
    r.calls.distribution_queries = doc.at("distribution_queries").get<std::uint64_t>();
    r.calls.cell_queries = doc.at("cell_queries").get<std::uint64_t>();
    r.calls.table_queries = doc.at("table_queries").get<std::uint64_t>();
    r.calls.retries = doc.at("retries").get<std::uint64_t>();
    r.calls.cache_hits = doc.at("cache_hits").get<std::uint64_t>();
    r.calls.transport_calls = doc.value("transport_calls", std::uint64_t{0});
    r.cache_entries = doc.value("cache_entries", std::uint64_t{0});
    r.invalid_labels = doc.at("invalid_labels").get<std::uint64_t>();
    r.failed_rows = doc.at("failed_rows").get<std::uint64_t>();
    r.status = doc.value("status", std::string("ok"));
    r.error = doc.value("error", std::string());
    r.features = doc.value("features", std::vector<std::string>{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed run report: ") + e.what());
  }
}

std::string flags_csv(const Table& table) {
  std::string out = "row,column,label\n";
  for (const auto& [cell, label] : table.flags()) {
    out += std::to_string(cell.first) + "," + csv_escape(table.schema().features[cell.second].name) +
           "," + csv_escape(label) + "\n";
  }
  return out;
}

RunFiles write_table(const GenerationRun& run, const std::filesystem::path& stem) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  RunFiles files{with_suffix(stem, ".csv"), with_suffix(stem, ".report"), std::nullopt};
  write_file(files.csv, to_csv(run.table));
  write_file(files.report, serialize_run_report(make_run_report(run)));
  const auto flags_path = with_suffix(stem, ".flags.csv");
  if (run.table.flagged_count() > 0) {
    write_file(flags_path, flags_csv(run.table));
    files.flags = flags_path;
  } else {
    std::filesystem::remove(flags_path);
  }
  return files;
}

}  // namespace pdsynth
