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

#include <gtest/gtest.h>

#include "unit/test_support.hpp"

namespace pdsynth {
namespace {

using testing::california;
using testing::golden;

const FeatureSpec& ethnicity() { return california()->features[2]; }

TEST(PromptTest, TableWideMatchesGolden) {
  const Prompt p = build_table_prompt(*california(), 100);
  EXPECT_EQ(p.kind, PromptKind::kTableWide);
  EXPECT_EQ(p.text, golden("table_wide_n100.txt"));
  for (const auto& e : testing::ethnicities()) EXPECT_NE(p.text.find(e), std::string::npos) << e;
}

TEST(PromptTest, TableWideKeepsTemplateGrammar) {
  EXPECT_NE(build_table_prompt(*california(), 1).text.find("exactly 1 records"), std::string::npos);
}

TEST(PromptTest, TableWideColumnListForms) {
  DatasetSchema one;
  one.features = {testing::categorical("A", {"x", "y"})};
  EXPECT_NE(build_table_prompt(one, 3).text.find("columns\n'A'.\n"), std::string::npos);
  DatasetSchema two;
  two.features = {testing::categorical("A", {"x", "y"}), testing::categorical("B", {"u", "v"})};
  const std::string text = build_table_prompt(two, 3).text;
  EXPECT_NE(text.find("columns\n'A' and 'B'.\n"), std::string::npos);
  EXPECT_EQ(text.find("reflecting"), std::string::npos);
}

TEST(PromptTest, CellMatchesGolden) {
  const Prompt p = build_cell_prompt(ethnicity(), "State is California/CA. Age Group is Children (0-17).",
                                     *california());
  EXPECT_EQ(p.kind, PromptKind::kCellByCell);
  EXPECT_EQ(p.text, golden("cell_ethnicity_children.txt"));
  EXPECT_TRUE(p.text.ends_with("# Response:\n"));
}

TEST(PromptTest, CellWithEmptyContext) {
  const Prompt p = build_cell_prompt(ethnicity(), "", *california());
  EXPECT_NE(p.text.find("\n# Context: \n"), std::string::npos);
}

TEST(PromptTest, DistributionMatchesGolden) {
  const Prompt p = build_distribution_prompt(ethnicity(), "State is California/CA.", *california());
  EXPECT_EQ(p.kind, PromptKind::kDistribution);
  EXPECT_EQ(p.text, golden("distribution_ethnicity_state.txt"));
  EXPECT_NE(p.text.find("# Categories: "), std::string::npos);
  EXPECT_NE(p.text.find("limited strictly to the JSON structure"), std::string::npos);
}

TEST(PromptTest, BuildersArePure) {
  const auto& s = *california();
  EXPECT_EQ(build_table_prompt(s, 10).text, build_table_prompt(s, 10).text);
  EXPECT_EQ(build_distribution_prompt(ethnicity(), "x", s).text,
            build_distribution_prompt(ethnicity(), "x", s).text);
  EXPECT_EQ(build_cell_prompt(ethnicity(), "x", s).text, build_cell_prompt(ethnicity(), "x", s).text);
}

TEST(PromptTest, PythonListRepr) {
  EXPECT_EQ(python_list_repr(std::vector<std::string>{}), "[]");
  EXPECT_EQ(python_list_repr(std::vector<std::string>{"a", "b"}), "['a', 'b']");
  EXPECT_EQ(python_list_repr(std::vector<std::string>{"it's"}), "[\"it's\"]");
  EXPECT_EQ(python_list_repr(std::vector<std::string>{"a'\""}), "['a\\'\"']");
}

}  // namespace
}  // namespace pdsynth
