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

#include "pdsynth/oracle.hpp"

#include <gtest/gtest.h>

#include "pdsynth/errors.hpp"
#include "unit/test_support.hpp"

namespace pdsynth {
namespace {

using testing::california;
using testing::ScriptedOracle;

const FeatureSpec& ethnicity() { return california()->features[2]; }

constexpr const char* kChildren =
    R"({"Latino": 0.519, "White": 0.238, "Asian/Pacific Islander": 0.134, "Black": 0.05, "Native American": 0.004, "Multiracial/Other": 0.055})";
constexpr const char* kContext = "State is California/CA. Age Group is Children (0-17).";

QueryOptions options(int max_retries = 2) {
  return QueryOptions{testing::instant_retry(max_retries), 0.0, "Ethnicity Group", kContext, 0};
}

Prompt distribution_prompt() { return build_distribution_prompt(ethnicity(), kContext, *california()); }

TEST(QueryDistributionTest, FirstAttemptSucceeds) {
  ScriptedOracle oracle({kChildren});
  OracleCallLog log;
  const RawDistribution raw = query_distribution(oracle, distribution_prompt(), ethnicity(), options(), log);
  EXPECT_EQ(raw, testing::children_raw());
  ASSERT_EQ(oracle.requests.size(), 1u);
  EXPECT_EQ(oracle.requests[0].messages.size(), 1u);
  EXPECT_EQ(oracle.requests[0].feature, "Ethnicity Group");
  EXPECT_EQ(oracle.requests[0].context, kContext);
  const auto c = log.counters();
  EXPECT_EQ(c.distribution_queries, 1u);
  EXPECT_EQ(c.retries, 0u);
  EXPECT_EQ(log.records()[0].context_key, context_key("Ethnicity Group", kContext).hex());
}

TEST(QueryDistributionTest, FencedResponseParses) {
  ScriptedOracle oracle({std::string("```json\n") + kChildren + "\n```"});
  OracleCallLog log;
  EXPECT_EQ(query_distribution(oracle, distribution_prompt(), ethnicity(), options(), log),
            testing::children_raw());
}

TEST(QueryDistributionTest, ProseExhaustsRetries) {
  ScriptedOracle oracle({"I'd rather not say."});
  OracleCallLog log;
  try {
    query_distribution(oracle, distribution_prompt(), ethnicity(), options(2), log);
    FAIL() << "expected UnparsableResponse";
  } catch (const UnparsableResponse& e) {
    EXPECT_EQ(e.attempts(), 3);
  }
  EXPECT_EQ(oracle.requests.size(), 3u);
  EXPECT_EQ(log.counters().retries, 2u);
  EXPECT_EQ(log.counters().distribution_queries, 1u);
  // Each retry carries the failed reply and a corrective message.
  EXPECT_EQ(oracle.requests[2].messages.size(), 5u);
  EXPECT_EQ(oracle.requests[2].messages[1].role, "assistant");
  EXPECT_EQ(oracle.requests[2].messages[2].role, "user");
}

TEST(QueryDistributionTest, RecoversAfterMalformedReply) {
  ScriptedOracle oracle({R"({"Latino": 0.5, "White": )", kChildren});
  OracleCallLog log;
  EXPECT_EQ(query_distribution(oracle, distribution_prompt(), ethnicity(), options(), log),
            testing::children_raw());
  const auto records = log.records();
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].outcome, CallOutcome::kParseFailure);
  EXPECT_EQ(records[1].outcome, CallOutcome::kOk);
  EXPECT_EQ(records[1].attempt, 2);
  EXPECT_EQ(log.counters().retries, 1u);
}

TEST(QueryDistributionTest, ValidationFailureIsRethrown) {
  ScriptedOracle oracle({R"({"Latino": 0.5, "Hispanic": 0.5})"});
  OracleCallLog log;
  EXPECT_THROW(query_distribution(oracle, distribution_prompt(), ethnicity(), options(1), log),
               UnknownCategory);
  EXPECT_EQ(log.records()[0].outcome, CallOutcome::kValidationFailure);
}

TEST(QueryDistributionTest, TransportBackoffIsExponential) {
  ScriptedOracle oracle({ScriptedOracle::kTransportFailure});
  OracleCallLog log;
  std::vector<std::chrono::milliseconds> sleeps;
  QueryOptions q = options(3);
  q.retry.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };
  EXPECT_THROW(query_distribution(oracle, distribution_prompt(), ethnicity(), q, log), OracleUnavailable);
  EXPECT_EQ(sleeps, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(1000),
                                                            std::chrono::milliseconds(2000),
                                                            std::chrono::milliseconds(4000)}));
  EXPECT_EQ(log.counters().transport_calls, 4u);
  EXPECT_EQ(log.counters().retries, 3u);
}

TEST(QueryDistributionTest, TransportThenSuccessKeepsConversation) {
  ScriptedOracle oracle({ScriptedOracle::kTransportFailure, kChildren});
  OracleCallLog log;
  query_distribution(oracle, distribution_prompt(), ethnicity(), options(), log);
  EXPECT_EQ(oracle.requests[1].messages.size(), 1u);
}

TEST(QueryDistributionTest, OtherOracleErrorsAreFinal) {
  class Missing : public Oracle {
   public:
    std::string complete(const OracleRequest& r) override { throw FixtureMissingEntry(r.feature, r.context); }
  } oracle;
  OracleCallLog log;
  EXPECT_THROW(query_distribution(oracle, distribution_prompt(), ethnicity(), options(), log),
               FixtureMissingEntry);
  EXPECT_EQ(log.size(), 1u);
}

TEST(QueryCellTest, NotACategoryAfterRetries) {
  ScriptedOracle oracle({"I think White"});
  OracleCallLog log;
  const Prompt p = build_cell_prompt(ethnicity(), kContext, *california());
  EXPECT_THROW(query_cell(oracle, p, ethnicity(), options(1), log), NotACategory);
  EXPECT_EQ(log.counters().cell_queries, 1u);
  EXPECT_EQ(log.counters().retries, 1u);
}

TEST(QueryCellTest, CaseDrift) {
  ScriptedOracle oracle({"  black\n"});
  OracleCallLog log;
  const Prompt p = build_cell_prompt(ethnicity(), kContext, *california());
  EXPECT_EQ(query_cell(oracle, p, ethnicity(), options(), log), "Black");
}

TEST(QueryTableTest, TruncatedThenValid) {
  ScriptedOracle oracle(
      {R"([{"State": "California/CA", "Age Gr)",
       R"J([{"State": "California/CA", "Age Group": "Children (0-17)", "Ethnicity Group": "Latino"}])J"});
  OracleCallLog log;
  QueryOptions q{testing::instant_retry(), 1.0, "", "", 1};
  const Table t = query_table(oracle, build_table_prompt(*california(), 1), california(), q, log);
  EXPECT_EQ(t.num_rows(), 1u);
  EXPECT_EQ(log.counters().table_queries, 1u);
  EXPECT_EQ(log.counters().retries, 1u);
  EXPECT_EQ(log.records()[0].context_key, "");
}

// Counters kept incrementally always agree with a recount of the records.
TEST(CallLogPropertyTest, CountersEqualTally) {
  testing::Gen gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    OracleCallLog log;
    const std::size_t n = gen.size(0, 60);
    for (std::size_t i = 0; i < n; ++i) {
      CallRecord r;
      r.kind = static_cast<PromptKind>(gen.size(0, 2));
      r.outcome = static_cast<CallOutcome>(gen.size(0, 4));
      r.attempt = r.outcome == CallOutcome::kCacheHit ? 0 : static_cast<int>(gen.size(1, 3));
      log.append(r);
    }
    ASSERT_EQ(log.counters(), tally(log.records()));
  }
}

}  // namespace
}  // namespace pdsynth
