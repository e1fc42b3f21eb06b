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

#include "pdsynth/pipeline.hpp"

#include <gtest/gtest.h>

#include <map>

#include "pdsynth/errors.hpp"
#include "pdsynth/fixture_oracle.hpp"
#include "pdsynth/table.hpp"
#include "unit/test_support.hpp"

namespace pdsynth {
namespace {

using testing::california;
using testing::california_fixture;

PipelineOptions fast_options() {
  PipelineOptions o;
  o.retry = testing::instant_retry();
  return o;
}

TEST(ProbabilityDrivenTest, SixQueriesForCalifornia) {
  for (std::int64_t n : {100, 10000}) {
    FixtureOracle oracle(california_fixture(), 1);
    const GenerationRun run = generate_probability_driven(california(), oracle, n, 42, fast_options());
    const CallCounters c = run.call_log->counters();
    EXPECT_EQ(c.distribution_queries, 6u) << n;
    EXPECT_EQ(c.retries, 0u);
    EXPECT_EQ(run.table.num_rows(), static_cast<std::size_t>(n));
    EXPECT_EQ(run.cache_entries, 6u);
    for (const auto& r : run.call_log->records()) EXPECT_NE(r.feature, "State");
  }
}

TEST(ProbabilityDrivenTest, SingleCategoryNeedsNoOracle) {
  DatasetSchema s;
  s.features = {testing::categorical("Only", {"x"})};
  auto schema = std::make_shared<const DatasetSchema>(s);
  testing::RejectingOracle oracle;
  const GenerationRun run = generate_probability_driven(schema, oracle, 1000, 1, fast_options());
  EXPECT_EQ(oracle.calls, 0);
  EXPECT_EQ(run.call_log->size(), 0u);
  ASSERT_EQ(run.table.num_rows(), 1000u);
  for (std::size_t r = 0; r < 1000; ++r) ASSERT_EQ(run.table.label(r, 0), "x");
}

TEST(ProbabilityDrivenTest, RejectsNonPositiveN) {
  testing::RejectingOracle oracle;
  EXPECT_THROW(generate_probability_driven(california(), oracle, 0, 1), Error);
  EXPECT_THROW(generate_probability_driven(california(), oracle, -3, 1), Error);
}

TEST(ProbabilityDrivenTest, DeterministicForSeed) {
  FixtureOracle a(california_fixture(), 1), b(california_fixture(), 1);
  const auto r1 = generate_probability_driven(california(), a, 2000, 7, fast_options());
  const auto r2 = generate_probability_driven(california(), b, 2000, 7, fast_options());
  EXPECT_EQ(to_csv(r1.table), to_csv(r2.table));
  FixtureOracle c(california_fixture(), 1);
  const auto r3 = generate_probability_driven(california(), c, 2000, 8, fast_options());
  EXPECT_NE(to_csv(r1.table), to_csv(r3.table));
}

TEST(ProbabilityDrivenTest, ConcurrentFetchGivesSameTable) {
  FixtureOracle a(california_fixture(), 1), b(california_fixture(), 1);
  PipelineOptions wide = fast_options();
  wide.fetch_concurrency = 4;
  const auto r1 = generate_probability_driven(california(), a, 3000, 11, fast_options());
  const auto r2 = generate_probability_driven(california(), b, 3000, 11, wide);
  EXPECT_EQ(to_csv(r1.table), to_csv(r2.table));
  EXPECT_EQ(r2.call_log->counters().distribution_queries, 6u);
}

TEST(ProbabilityDrivenTest, SharedCacheAvoidsRequery) {
  DistributionCache cache;
  FixtureOracle oracle(california_fixture(), 1);
  generate_probability_driven(california(), oracle, 500, 1, fast_options(), &cache);
  const auto second = generate_probability_driven(california(), oracle, 500, 2, fast_options(), &cache);
  EXPECT_EQ(second.call_log->counters().distribution_queries, 0u);
  EXPECT_EQ(second.call_log->counters().cache_hits, 6u);
  EXPECT_EQ(second.call_log->counters(), tally(second.call_log->records()));
}

TEST(ProbabilityDrivenTest, ProvenanceNamesSourceDistribution) {
  FixtureOracle oracle(california_fixture(), 1);
  const auto run = generate_probability_driven(california(), oracle, 300, 3, fast_options());
  for (std::size_t r = 0; r < 300; ++r) {
    const ProvenanceEntry* p = run.table.provenance(r, 2);
    ASSERT_NE(p, nullptr);
    const std::string expected = "State is California/CA. Age Group is " + std::string(run.table.label(r, 1)) + ".";
    ASSERT_EQ(p->context, expected);
    ASSERT_EQ(p->key, context_key("Ethnicity Group", expected));
  }
}

TEST(ProbabilityDrivenTest, MissingEntryFailsWholeRun) {
  auto data = std::make_shared<const FixtureData>(parse_fixture(R"J({"entries": [
    {"feature": "Age Group", "context": "State is California/CA.",
     "distribution": {"Children (0-17)": 1.0}}]})J"));
  FixtureOracle oracle(data, 0);
  try {
    generate_probability_driven(california(), oracle, 10, 1, fast_options());
    FAIL() << "expected GenerationError";
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.feature(), "Ethnicity Group");
    EXPECT_EQ(e.context(), "State is California/CA. Age Group is Children (0-17).");
  }
}

TEST(ProbabilityDrivenTest, NumericRangeIsRealized) {
  DatasetSchema s;
  FeatureSpec age = testing::categorical("Age", {"0-17", "18-64", "65+"});
  age.kind = FeatureKind::kNumericRange;
  age.cap = 99;
  s.features = {age};
  auto schema = std::make_shared<const DatasetSchema>(s);
  auto data = std::make_shared<const FixtureData>(parse_fixture(
      R"({"entries": [{"feature": "Age", "context": "", "distribution": {"0-17": 0.2, "18-64": 0.5, "65+": 0.3}}]})"));
  FixtureOracle oracle(data, 0);
  const auto run = generate_probability_driven(schema, oracle, 1000, 5, fast_options());
  const auto* values = run.table.realized(0);
  ASSERT_NE(values, nullptr);
  for (std::size_t r = 0; r < 1000; ++r) {
    const RangeBounds b = parse_range_label(run.table.label(r, 0), 99);
    ASSERT_GE((*values)[r], b.lo);
    ASSERT_LE((*values)[r], b.hi);
  }
}

// Conditional structure: each context's rows follow that context's entry.
TEST(ProbabilityDrivenTest, ConditionalFrequenciesTrackFixture) {
  FixtureOracle oracle(california_fixture(), 1);
  const auto run = generate_probability_driven(california(), oracle, 200000, 99, fast_options());
  std::map<std::string, std::pair<int, int>> latino;  // age -> (latino, total)
  for (std::size_t r = 0; r < run.table.num_rows(); ++r) {
    auto& [l, t] = latino[std::string(run.table.label(r, 1))];
    ++t;
    l += run.table.label(r, 2) == "Latino";
  }
  const auto [lc, tc] = latino["Children (0-17)"];
  EXPECT_NEAR(static_cast<double>(lc) / tc, 0.519, 0.01);
  const auto [lo, to] = latino["65 and older"];
  EXPECT_NEAR(static_cast<double>(lo) / to, 0.22 / 0.997, 0.01);
}

TEST(TableWideTest, SingleBatch) {
  std::string rows = "[";
  for (int i = 0; i < 100; ++i) {
    rows += std::string(i ? "," : "") +
            R"J({"State": "California/CA", "Age Group": "Children (0-17)", "Ethnicity Group": "White"})J";
  }
  rows += "]";
  testing::ScriptedOracle oracle({rows});
  const auto run = generate_table_wide(california(), oracle, 100, 1, fast_options());
  EXPECT_EQ(run.table.num_rows(), 100u);
  EXPECT_EQ(run.call_log->counters().table_queries, 1u);
  EXPECT_FALSE(run.error);
}

TEST(TableWideTest, BatchesUntilFull) {
  auto tweaked = std::make_shared<FixtureData>(*california_fixture());
  tweaked->table_rows_per_call = 60;
  FixtureOracle oracle(tweaked, 0, california());
  const auto run = generate_table_wide(california(), oracle, 100, 1, fast_options());
  EXPECT_EQ(run.table.num_rows(), 100u);
  EXPECT_EQ(run.call_log->counters().table_queries, 2u);
  EXPECT_FALSE(run.error);
}

TEST(TableWideTest, OffListLabelsAreCounted) {
  testing::ScriptedOracle oracle(
      {R"J([{"State": "California/CA", "Age Group": "Children (0-17)", "Ethnicity Group": "Hispanic"},
           {"State": "California/CA", "Age Group": "Teen", "Ethnicity Group": "White"}])J"});
  const auto run = generate_table_wide(california(), oracle, 2, 1, fast_options());
  EXPECT_EQ(run.invalid_labels(), 2u);
}

TEST(TableWideTest, ShortfallIsReported) {
  testing::ScriptedOracle oracle(
      {R"J([{"State": "California/CA", "Age Group": "Children (0-17)", "Ethnicity Group": "Latino"}])J"});
  PipelineOptions o = fast_options();
  o.table_batch_cap = 3;
  const auto run = generate_table_wide(california(), oracle, 10, 1, o);
  EXPECT_EQ(run.table.num_rows(), 3u);
  ASSERT_TRUE(run.error);
  EXPECT_NE(run.error->find("RowShortfall"), std::string::npos);
}

TEST(TableWideTest, FirstBatchFailureThrows) {
  testing::ScriptedOracle oracle({"no table today"});
  EXPECT_THROW(generate_table_wide(california(), oracle, 10, 1, fast_options()), UnparsableResponse);
}

TEST(CellByCellTest, QueryCountFormula) {
  FixtureOracle oracle(california_fixture(), 1);
  const auto run = generate_cell_by_cell(california(), oracle, 10, 1, fast_options());
  EXPECT_EQ(run.call_log->counters().cell_queries, 20u);
  EXPECT_EQ(run.table.num_rows(), 10u);
}

TEST(CellByCellTest, OneQueryForTinySchema) {
  DatasetSchema s;
  s.features = {testing::categorical("X", {"a", "b"})};
  testing::ScriptedOracle oracle({"b"});
  const auto run = generate_cell_by_cell(std::make_shared<const DatasetSchema>(s), oracle, 1, 1, fast_options());
  EXPECT_EQ(run.call_log->counters().cell_queries, 1u);
  EXPECT_EQ(run.table.label(0, 0), "b");
}

TEST(CellByCellTest, ContextGrowsAlongRow) {
  testing::ScriptedOracle oracle({"Adults (55-64)", "Black"});
  generate_cell_by_cell(california(), oracle, 1, 1, fast_options());
  ASSERT_EQ(oracle.requests.size(), 2u);
  EXPECT_EQ(oracle.requests[0].context, "State is California/CA.");
  EXPECT_EQ(oracle.requests[1].context, "State is California/CA. Age Group is Adults (55-64).");
}

TEST(CellByCellTest, UnusableRowsAreSkipped) {
  auto data = std::make_shared<const FixtureData>(parse_fixture(R"J({"cells": {"scripts": [
    {"feature": "Age Group", "responses": ["Children (0-17)"]},
    {"feature": "Ethnicity Group", "responses": ["White", "dunno", "dunno", "dunno", "Black"]}]}})J"));
  FixtureOracle oracle(data, 0);
  PipelineOptions o = fast_options();
  const auto run = generate_cell_by_cell(california(), oracle, 3, 1, o);
  EXPECT_EQ(run.failed_rows, 1u);
  EXPECT_EQ(run.table.num_rows(), 2u);
  o.cell_abort_on_failure = true;
  FixtureOracle again(data, 0);
  EXPECT_THROW(generate_cell_by_cell(california(), again, 3, 1, o), GenerationError);
}

TEST(CellByCellTest, MissingScriptsFailTheRun) {
  auto data = std::make_shared<const FixtureData>(parse_fixture(R"({"entries": []})"));
  FixtureOracle oracle(data, 0);
  EXPECT_THROW(generate_cell_by_cell(california(), oracle, 3, 1, fast_options()), GenerationError);
}

TEST(CellByCellTest, DeterministicWithFixture) {
  FixtureOracle a(california_fixture(), 4), b(california_fixture(), 4);
  EXPECT_EQ(to_csv(generate_cell_by_cell(california(), a, 300, 1, fast_options()).table),
            to_csv(generate_cell_by_cell(california(), b, 300, 1, fast_options()).table));
}

TEST(StrategyTest, Names) {
  for (Strategy s : {Strategy::kProbabilityDriven, Strategy::kTableWide, Strategy::kCellByCell}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_FALSE(parse_strategy("row-wise"));
}

}  // namespace
}  // namespace pdsynth
