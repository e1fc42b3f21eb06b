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

#include "pdsynth/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <future>
#include <map>
#include <mutex>
#include <optional>

#include "CLI11.hpp"
#include "pdsynth/errors.hpp"
#include "pdsynth/fidelity.hpp"
#include "pdsynth/fixture_oracle.hpp"
#include "pdsynth/pipeline.hpp"
#include "pdsynth/run_io.hpp"
#include "pdsynth/schema.hpp"
#include "pdsynth/table.hpp"
#include "pdsynth/text_util.hpp"

#ifndef PDSYNTH_DEFAULT_DATA_DIR
#define PDSYNTH_DEFAULT_DATA_DIR "data"
#endif

namespace pdsynth {

namespace fs = std::filesystem;

namespace {

// Bad flags or configuration; exits with kExitUsage.
class UsageError : public Error {
 public:
  using Error::Error;
};

constexpr std::string_view kFixturePrefix = "fixture:";

struct HttpFlags {
  std::string endpoint = OracleConfig{}.endpoint_url;
  std::string model = OracleConfig{}.model_name;
  std::string api_key_env = OracleConfig{}.api_key_env;
  int max_retries = OracleConfig{}.max_retries;
  long timeout_ms = static_cast<long>(OracleConfig{}.timeout.count());
  std::optional<double> temperature;
  std::size_t max_in_flight = OracleConfig{}.max_in_flight;
};

struct GenerateFlags {
  std::string schema;
  std::string oracle;
  std::string strategy = std::string(to_string(Strategy::kProbabilityDriven));
  std::int64_t n = 0;
  int runs = 1;
  std::uint64_t seed = 0;
  std::string out;
  bool parallel_runs = false;
  std::size_t fetch_concurrency = 1;
  std::size_t table_batch_cap = PipelineOptions{}.table_batch_cap;
  std::string seed_text;
  HttpFlags http;
};

struct CompareFlags {
  GenerateFlags gen;
  std::string reference;
  std::string target;
  std::string given;
};

struct EvaluateFlags {
  std::string schema;
  std::string reference;
  std::vector<std::string> runs;
  std::string target;
  std::string given;
  std::string label;
  std::string out;
};

// Serializes messages from concurrent runs.
class Console {
 public:
  Console(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}
  void info(const std::string& line) {
    std::lock_guard lock(mu_);
    out_ << line << "\n";
  }
  void error(const std::string& line) {
    std::lock_guard lock(mu_);
    err_ << line << "\n";
  }

 private:
  std::mutex mu_;
  std::ostream& out_;
  std::ostream& err_;
};

struct Setup {
  std::shared_ptr<const DatasetSchema> schema;
  std::shared_ptr<const FixtureData> fixture;
  fs::path fixture_path;
  std::shared_ptr<HttpOracle> http;
  PipelineOptions options;
};

fs::path resolve_fixture(std::string_view spec) {
  if (spec.starts_with(kFixturePrefix)) spec.remove_prefix(kFixturePrefix.size());
  if (spec.empty()) throw UsageError("empty fixture name");
  const fs::path direct(spec);
  if (fs::is_regular_file(direct)) return direct;
  const fs::path named = data_dir() / (std::string(spec) + ".fixture");
  if (fs::is_regular_file(named)) return named;
  throw UsageError("no fixture '" + std::string(spec) + "' (looked for " + direct.string() + " and " +
                   named.string() + ")");
}

DatasetSchema load_schema_flag(const std::string& path) {
  if (!fs::is_regular_file(path)) throw UsageError("schema file not found: " + path);
  return load_schema(path);
}

Setup prepare(const GenerateFlags& flags, const TransportFactory& transports) {
  if (flags.n < 1) throw UsageError("--n must be at least 1");
  if (flags.runs < 1) throw UsageError("--runs must be at least 1");
  if (flags.fetch_concurrency < 1) throw UsageError("--fetch-concurrency must be at least 1");

  Setup setup;
  setup.schema = std::make_shared<const DatasetSchema>(load_schema_flag(flags.schema));
  setup.options.retry.max_retries = flags.http.max_retries;
  setup.options.fetch_concurrency = flags.fetch_concurrency;
  setup.options.table_batch_cap = flags.table_batch_cap;
  setup.options.seed_text = flags.seed_text;
  if (flags.http.max_retries < 0) throw UsageError("--max-retries must be non-negative");

  if (flags.oracle.starts_with(kFixturePrefix)) {
    setup.fixture_path = resolve_fixture(flags.oracle);
    setup.fixture = std::make_shared<const FixtureData>(load_fixture(setup.fixture_path));
    // A fixture answers instantly; waiting between attempts buys nothing.
    setup.options.retry.backoff_base = std::chrono::milliseconds(0);
  } else if (flags.oracle == "http") {
    OracleConfig config;
    config.endpoint_url = flags.http.endpoint;
    config.model_name = flags.http.model;
    config.api_key_env = flags.http.api_key_env;
    config.max_retries = flags.http.max_retries;
    config.timeout = std::chrono::milliseconds(flags.http.timeout_ms);
    config.temperature = flags.http.temperature;
    config.max_in_flight = flags.http.max_in_flight;
    validate_oracle_config(config);
    setup.http = std::make_shared<HttpOracle>(config, transports());
  } else {
    throw UsageError("--oracle must be 'http' or 'fixture:<name or path>', got '" + flags.oracle + "'");
  }
  return setup;
}

Strategy strategy_from_flag(const std::string& text) {
  auto s = parse_strategy(text);
  if (!s) throw UsageError("unknown strategy '" + text + "'");
  return *s;
}

GenerationRun execute(const Setup& setup, Strategy strategy, std::int64_t n, std::uint64_t seed) {
  std::unique_ptr<Oracle> fixture_oracle;
  Oracle* oracle = setup.http.get();
  if (setup.fixture) {
    fixture_oracle = std::make_unique<FixtureOracle>(
        setup.fixture, derive_stream_seed(seed, static_cast<std::uint64_t>(strategy) + 1), setup.schema);
    oracle = fixture_oracle.get();
  }
  switch (strategy) {
    case Strategy::kProbabilityDriven:
      return generate_probability_driven(setup.schema, *oracle, n, seed, setup.options);
    case Strategy::kTableWide:
      return generate_table_wide(setup.schema, *oracle, n, seed, setup.options);
    case Strategy::kCellByCell:
      return generate_cell_by_cell(setup.schema, *oracle, n, seed, setup.options);
  }
  throw Error("unknown strategy");
}

struct RunOutcome {
  std::optional<GenerationRun> run;
  std::string error;  // empty on full success
};

// Runs and writes `runs` runs of one strategy into <out>/<strategy>/.
std::vector<RunOutcome> run_strategy(const Setup& setup, Strategy strategy, const GenerateFlags& flags,
                                     Console& console) {
  const fs::path dir = fs::path(flags.out) / std::string(to_string(strategy));
  fs::create_directories(dir);
  const auto count = static_cast<std::size_t>(flags.runs);

  auto one = [&](std::size_t k) {
    const std::uint64_t seed = flags.seed + k;
    const std::string who = std::string(to_string(strategy)) + " run_" + std::to_string(k + 1) +
                            " (seed " + std::to_string(seed) + ")";
    RunOutcome outcome;
    try {
      GenerationRun run = execute(setup, strategy, flags.n, seed);
      write_table(run, dir / ("run_" + std::to_string(k + 1)));
      if (run.error) outcome.error = who + ": " + *run.error;
      outcome.run = std::move(run);
    } catch (const std::exception& e) {
      outcome.error = who + ": " + e.what();
    }
    if (!outcome.error.empty()) console.error(outcome.error);
    return outcome;
  };

  std::vector<RunOutcome> outcomes;
  if (flags.parallel_runs && count > 1) {
    std::vector<std::future<RunOutcome>> pending;
    for (std::size_t k = 0; k < count; ++k) pending.push_back(std::async(std::launch::async, one, k));
    for (auto& f : pending) outcomes.push_back(f.get());
  } else {
    for (std::size_t k = 0; k < count; ++k) outcomes.push_back(one(k));
  }
  return outcomes;
}

// Given defaults to the first multi-category feature, target to the second.
std::pair<std::string, std::string> resolve_pair(const DatasetSchema& schema, std::string target,
                                                 std::string given) {
  std::vector<std::string> multi;
  for (const auto& f : schema.features) {
    if (!f.single_category()) multi.push_back(f.name);
  }
  if (given.empty()) {
    if (multi.empty()) throw UsageError("schema has no multi-category feature; pass --given");
    given = multi.front();
  }
  if (target.empty()) {
    for (const auto& name : multi) {
      if (name != given) {
        target = name;
        break;
      }
    }
    if (target.empty()) throw UsageError("cannot pick a target feature; pass --target");
  }
  schema.feature(given);
  schema.feature(target);
  if (given == target) throw UsageError("--target and --given must differ");
  return {target, given};
}

void write_comparison(const ComparisonReport& report, const fs::path& out) {
  fs::create_directories(out);
  write_file(out / "comparison.report", report.text);
  for (const auto& [name, data] : report.panels) write_file(out / name, data);
}

void print_tv(const FrequencyTable& reference, std::span<const StrategySummary> summaries,
              Console& console) {
  for (const auto& s : summaries) {
    std::string line = s.name + ": mean total variation ";
    if (s.aggregate) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", mean_total_variation(reference, *s.aggregate));
      line += buf;
    } else {
      line += "n/a (failed)";
    }
    console.info(line);
  }
}

int cmd_generate(const GenerateFlags& flags, const TransportFactory& transports, Console& console) {
  const Strategy strategy = strategy_from_flag(flags.strategy);
  const Setup setup = prepare(flags, transports);
  const auto outcomes = run_strategy(setup, strategy, flags, console);
  std::size_t failed = 0;
  for (const auto& o : outcomes) failed += o.error.empty() ? 0 : 1;
  console.info("wrote " + std::to_string(outcomes.size() - failed) + " of " +
               std::to_string(outcomes.size()) + " run(s) to " +
               (fs::path(flags.out) / std::string(to_string(strategy))).string());
  return failed == 0 ? kExitOk : kExitFailure;
}

int cmd_compare(const CompareFlags& flags, const TransportFactory& transports, Console& console) {
  const Setup setup = prepare(flags.gen, transports);
  fs::path reference_path;
  if (!flags.reference.empty()) {
    reference_path = resolve_fixture(flags.reference);
  } else if (setup.fixture) {
    reference_path = setup.fixture_path;
  } else {
    throw UsageError("--reference is required with the http oracle");
  }
  const FixtureData reference_data = load_fixture(reference_path);
  const auto [target, given] = resolve_pair(*setup.schema, flags.target, flags.given);
  const FrequencyTable reference = reference_from_fixture(reference_data, *setup.schema, target, given);

  std::vector<StrategySummary> summaries;
  bool any_failed = false;
  for (Strategy strategy : {Strategy::kProbabilityDriven, Strategy::kTableWide, Strategy::kCellByCell}) {
    const auto outcomes = run_strategy(setup, strategy, flags.gen, console);
    StrategySummary summary;
    summary.name = std::string(to_string(strategy));
    std::vector<FrequencyTable> tables;
    for (const auto& o : outcomes) {
      if (!o.error.empty() && !summary.failure) summary.failure = o.error;
      if (!o.run) continue;
      ++summary.runs;
      summary.calls += o.run->call_log->counters();
      tables.push_back(conditional_frequencies(o.run->table, target, given));
    }
    if (!tables.empty()) summary.aggregate = aggregate_runs(tables);
    any_failed = any_failed || summary.failure.has_value();
    summaries.push_back(std::move(summary));
  }

  const ComparisonReport report =
      comparison_report(reference, reference_path.stem().string(), summaries);
  write_comparison(report, flags.gen.out);
  print_tv(reference, summaries, console);
  return any_failed ? kExitFailure : kExitOk;
}

int cmd_evaluate(const EvaluateFlags& flags, Console& console) {
  const auto schema = std::make_shared<const DatasetSchema>(load_schema_flag(flags.schema));
  const fs::path reference_path = resolve_fixture(flags.reference);
  const FixtureData reference_data = load_fixture(reference_path);
  const auto [target, given] = resolve_pair(*schema, flags.target, flags.given);
  const FrequencyTable reference = reference_from_fixture(reference_data, *schema, target, given);

  struct Group {
    std::vector<FrequencyTable> tables;
    CallCounters calls;
  };
  std::vector<std::string> order;
  std::map<std::string, Group> groups;
  for (const auto& file : flags.runs) {
    Table table(schema);
    try {
      table = parse_csv(read_file(file), schema);
    } catch (const Error& e) {
      console.error(file + ": " + e.what());
      return kExitFailure;
    }
    std::string label = flags.label;
    CallCounters calls;
    fs::path report_path = file;
    report_path.replace_extension(".report");
    if (fs::is_regular_file(report_path)) {
      try {
        const RunReport r = parse_run_report(read_file(report_path));
        if (label.empty()) label = r.strategy;
        calls = r.calls;
      } catch (const Error& e) {
        console.error(report_path.string() + ": " + e.what());
        return kExitFailure;
      }
    }
    if (label.empty()) label = fs::path(file).parent_path().filename().string();
    if (label.empty()) label = "runs";
    if (!groups.contains(label)) order.push_back(label);
    Group& g = groups[label];
    g.tables.push_back(conditional_frequencies(table, target, given));
    g.calls += calls;
  }

  std::vector<StrategySummary> summaries;
  for (const auto& name : order) {
    const Group& g = groups[name];
    StrategySummary s;
    s.name = name;
    s.runs = g.tables.size();
    s.calls = g.calls;
    s.aggregate = aggregate_runs(g.tables);
    summaries.push_back(std::move(s));
  }
  const ComparisonReport report =
      comparison_report(reference, reference_path.stem().string(), summaries);
  write_comparison(report, flags.out);
  print_tv(reference, summaries, console);
  return kExitOk;
}

void add_generate_flags(CLI::App& cmd, GenerateFlags& f, bool with_strategy) {
  cmd.add_option("--schema", f.schema, "Schema config file")->required();
  cmd.add_option("--oracle", f.oracle, "http, or fixture:<name or path>")->required();
  if (with_strategy) {
    cmd.add_option("--strategy", f.strategy, "probability-driven, table-wide or cell-by-cell")
        ->capture_default_str();
  }
  cmd.add_option("--n", f.n, "Rows per run")->required();
  cmd.add_option("--runs", f.runs, "Number of runs")->capture_default_str();
  cmd.add_option("--seed", f.seed, "Seed of the first run; run k uses seed + k - 1")
      ->capture_default_str();
  cmd.add_option("--out", f.out, "Output directory")->required();
  cmd.add_flag("--parallel-runs", f.parallel_runs, "Execute runs concurrently");
  cmd.add_option("--fetch-concurrency", f.fetch_concurrency,
                 "Distribution queries issued at once")
      ->capture_default_str();
  cmd.add_option("--table-batch-cap", f.table_batch_cap, "Table-wide: maximum calls per run")
      ->capture_default_str();
  cmd.add_option("--seed-text", f.seed_text, "Text prepended to every context");
  cmd.add_option("--endpoint", f.http.endpoint, "Chat-completions URL")->capture_default_str();
  cmd.add_option("--model", f.http.model, "Model name")->capture_default_str();
  cmd.add_option("--api-key-env", f.http.api_key_env, "Environment variable holding the API key")
      ->capture_default_str();
  cmd.add_option("--max-retries", f.http.max_retries, "Retries per query")->capture_default_str();
  cmd.add_option("--timeout-ms", f.http.timeout_ms, "Request timeout")->capture_default_str();
  cmd.add_option("--temperature", f.http.temperature, "Override every prompt's temperature");
  cmd.add_option("--max-in-flight", f.http.max_in_flight, "Concurrent HTTP requests")
      ->capture_default_str();
}

}  // namespace

fs::path data_dir() {
  if (const char* env = std::getenv("PDSYNTH_DATA_DIR"); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return fs::path(PDSYNTH_DEFAULT_DATA_DIR);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const TransportFactory& transports) {
  CLI::App app{"Synthetic categorical tables from oracle-estimated distributions", "pdsynth"};
  app.require_subcommand(1);

  GenerateFlags generate;
  auto* generate_cmd = app.add_subcommand("generate", "Generate runs with one strategy");
  add_generate_flags(*generate_cmd, generate, true);

  CompareFlags compare;
  auto* compare_cmd =
      app.add_subcommand("compare", "Run all three strategies and compare them with a reference");
  add_generate_flags(*compare_cmd, compare.gen, false);
  compare_cmd->add_option("--reference", compare.reference,
                          "Reference fixture (defaults to the oracle fixture)");
  compare_cmd->add_option("--target", compare.target, "Feature whose composition is reported");
  compare_cmd->add_option("--given", compare.given, "Feature that groups the rows");

  EvaluateFlags evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare generated runs with a reference");
  evaluate_cmd->add_option("--schema", evaluate.schema, "Schema config file")->required();
  evaluate_cmd->add_option("--reference", evaluate.reference, "Reference fixture")->required();
  evaluate_cmd->add_option("--runs", evaluate.runs, "Run CSV files")->required();
  evaluate_cmd->add_option("--target", evaluate.target, "Feature whose composition is reported");
  evaluate_cmd->add_option("--given", evaluate.given, "Feature that groups the rows");
  evaluate_cmd->add_option("--label", evaluate.label, "Column label for all runs");
  evaluate_cmd->add_option("--out", evaluate.out, "Output directory")->required();

  std::vector<std::string> argv_storage = {"pdsynth"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  Console console(out, err);
  // Failures before any run starts are configuration problems.
  try {
    if (generate_cmd->parsed()) return cmd_generate(generate, transports, console);
    if (compare_cmd->parsed()) return cmd_compare(compare, transports, console);
    return cmd_evaluate(evaluate, console);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnknownFeature& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace pdsynth
