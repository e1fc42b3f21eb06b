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

#include <gtest/gtest.h>

#include "pdsynth/errors.hpp"
#include "unit/test_support.hpp"

namespace pdsynth {
namespace {

using testing::california;

const FeatureSpec& ethnicity() { return california()->features[2]; }

constexpr const char* kChildren =
    R"({"Latino": 0.519, "White": 0.238, "Asian/Pacific Islander": 0.134, "Black": 0.05, "Native American": 0.004, "Multiracial/Other": 0.055})";

TEST(DistributionResponseTest, WellFormed) {
  const RawDistribution raw = parse_distribution_response(kChildren, ethnicity());
  EXPECT_EQ(raw, testing::children_raw());
}

TEST(DistributionResponseTest, SingleCategory) {
  const RawDistribution raw = parse_distribution_response(R"({"A": 1})", testing::categorical("X", {"A"}));
  ASSERT_EQ(raw.entries.size(), 1u);
  EXPECT_EQ(raw.entries[0], (std::pair<std::string, double>{"A", 1.0}));
}

TEST(DistributionResponseTest, ProseAndFences) {
  const auto ab = testing::categorical("X", {"A", "B"});
  EXPECT_EQ(parse_distribution_response(R"(Sure! {"A": 0.5, "B": 0.5})", ab).entries.size(), 2u);
  EXPECT_EQ(parse_distribution_response(std::string("```json\n") + kChildren + "\n```", ethnicity()),
            testing::children_raw());
  EXPECT_EQ(parse_distribution_response("Here you go:\n```\n{\"A\": 0.2, \"B\": 0.8}\n```\nThanks", ab)
                .entries[1]
                .second,
            0.8);
}

TEST(DistributionResponseTest, CaseDriftAndWrapping) {
  const auto raw = parse_distribution_response(
      R"({"probabilities": {" latino": 0.5, "WHITE": 0.5}})", ethnicity());
  ASSERT_EQ(raw.entries.size(), 2u);
  EXPECT_EQ(raw.entries[0].first, "Latino");
  EXPECT_EQ(raw.entries[1].first, "White");
}

TEST(DistributionResponseTest, UnknownKeysKeptForValidation) {
  const auto raw = parse_distribution_response(R"({"Latino": 0.5, "Hispanic": 0.5})", ethnicity());
  EXPECT_EQ(raw.entries[1].first, "Hispanic");
  EXPECT_THROW(check_raw_distribution(raw, ethnicity()), UnknownCategory);
}

TEST(DistributionResponseTest, Failures) {
  EXPECT_THROW(parse_distribution_response("I cannot help with that.", ethnicity()), NoJsonFound);
  EXPECT_THROW(parse_distribution_response(R"({"Latino": 0.5, "White": 0.)", ethnicity()), NoJsonFound);
  EXPECT_THROW(parse_distribution_response(R"({"Latino": "high"})", ethnicity()), NonNumericWeight);
  EXPECT_THROW(parse_distribution_response(R"([0.5, 0.5])", ethnicity()), NoJsonFound);
}

TEST(ExtractJsonTest, BracesInsideStrings) {
  EXPECT_EQ(extract_json(R"(x {"a": "}{"} y)", false), R"({"a": "}{"})");
  EXPECT_EQ(extract_json("[1, 2]", true), "[1, 2]");
  EXPECT_FALSE(extract_json("[1, 2]", false));
  EXPECT_FALSE(extract_json("{ not json }", false));
}

TEST(TableResponseTest, RowArray) {
  const Table t = parse_table_response(R"J([
    {"State": "California/CA", "Age Group": "Children (0-17)", "Ethnicity Group": "Latino"},
    {"State": "California/CA", "Age Group": "65 and older", "Ethnicity Group": "White"},
    {"State": "California/CA", "Age Group": "Adults (55-64)", "Ethnicity Group": "Black"}])J",
                                       california());
  EXPECT_EQ(t.num_rows(), 3u);
  EXPECT_EQ(t.label(1, 1), "65 and older");
  EXPECT_EQ(t.flagged_count(), 0u);
}

TEST(TableResponseTest, ColumnarAndWrapped) {
  const Table columnar = parse_table_response(
      R"J({"State": ["California/CA", "California/CA"], "Age Group": ["Children (0-17)", "65 and older"], "Ethnicity Group": ["Latino", "White"]})J",
      california());
  EXPECT_EQ(columnar.num_rows(), 2u);
  EXPECT_EQ(columnar.label(1, 2), "White");
  const Table wrapped = parse_table_response(
      R"J(```json
{"records": [{"State": "California/CA", "Age Group": "Children (0-17)", "Ethnicity Group": "Latino"}]}
```)J",
      california());
  EXPECT_EQ(wrapped.num_rows(), 1u);
}

TEST(TableResponseTest, OffListLabelIsFlagged) {
  const Table t = parse_table_response(
      R"J([{"State": "California/CA", "Age Group": "Children (0-17)", "Ethnicity Group": "Hispanic"}])J",
      california());
  EXPECT_EQ(t.num_rows(), 1u);
  EXPECT_TRUE(t.flagged(0, 2));
  EXPECT_EQ(t.label(0, 2), "Hispanic");
  EXPECT_EQ(t.flagged_count(), 1u);
}

TEST(TableResponseTest, Failures) {
  EXPECT_THROW(parse_table_response(R"([{"State": "California/CA", "Age Group": "Chil)", california()),
               NoJsonFound);
  EXPECT_THROW(parse_table_response(R"J([{"State": "California/CA", "Age Group": "Children (0-17)"}])J",
                                    california()),
               SchemaMismatch);
  EXPECT_THROW(parse_table_response(
                   R"({"State": ["California/CA"], "Age Group": [], "Ethnicity Group": ["White"]})",
                   california()),
               SchemaMismatch);
}

TEST(CellResponseTest, Examples) {
  EXPECT_EQ(parse_cell_response("White", ethnicity()), "White");
  EXPECT_EQ(parse_cell_response("  latino\n", ethnicity()), "Latino");
  EXPECT_EQ(parse_cell_response("\"Black\"", ethnicity()), "Black");
  EXPECT_EQ(parse_cell_response("```\nNative American\n```", ethnicity()), "Native American");
  EXPECT_THROW(parse_cell_response("I think White", ethnicity()), NotACategory);
  EXPECT_THROW(parse_cell_response("", ethnicity()), NotACategory);
}

}  // namespace
}  // namespace pdsynth
