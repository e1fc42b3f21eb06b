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

#ifndef PDSYNTH_RUN_IO_HPP_
#define PDSYNTH_RUN_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "pdsynth/oracle.hpp"
#include "pdsynth/pipeline.hpp"

namespace pdsynth {

// Metadata written next to every run's CSV.
struct RunReport {
  std::string strategy;
  std::uint64_t seed = 0;
  std::int64_t n_requested = 0;
  std::uint64_t rows = 0;
  CallCounters calls;
  std::uint64_t invalid_labels = 0;
  std::uint64_t failed_rows = 0;
  std::uint64_t cache_entries = 0;
  std::string status = "ok";
  std::string error;
  std::vector<std::string> features;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

RunReport make_run_report(const GenerationRun& run);
// Pretty JSON with a fixed key order; contains no timing data.
std::string serialize_run_report(const RunReport& report);
RunReport parse_run_report(std::string_view text);

// "row,column,label" for every flagged cell.
std::string flags_csv(const Table& table);

struct RunFiles {
  std::filesystem::path csv;
  std::filesystem::path report;
  std::optional<std::filesystem::path> flags;
};

// Writes <stem>.csv, <stem>.report and, when cells are flagged,
// <stem>.flags.csv. Throws Error on I/O failure.
RunFiles write_table(const GenerationRun& run, const std::filesystem::path& stem);

}  // namespace pdsynth

#endif  // PDSYNTH_RUN_IO_HPP_
