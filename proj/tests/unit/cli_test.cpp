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

#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "pdsynth/errors.hpp"
#include "pdsynth/run_io.hpp"
#include "unit/test_support.hpp"

namespace pdsynth {
namespace {

namespace fs = std::filesystem;
using testing::data_path;

// Any use of the network fails the test.
std::shared_ptr<HttpTransport> no_network() {
  ADD_FAILURE() << "transport requested while a fixture oracle was selected";
  throw TransportError("network disabled in tests");
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("pdsynth_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args, const TransportFactory& transports = no_network) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_, transports);
  }

  std::vector<std::string> generate_args(const std::string& out, std::int64_t n, int runs) {
    return {"generate", "--schema", data_path("california.cfg").string(), "--oracle",
            "fixture:california_original", "--strategy", "probability-driven", "--n", std::to_string(n),
            "--runs", std::to_string(runs), "--seed", "42", "--out", out};
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, GenerateFiveRuns) {
  const fs::path out = dir_ / "runs";
  ASSERT_EQ(run(generate_args(out.string(), 10000, 5)), kExitOk) << err_.str();
  for (int k = 1; k <= 5; ++k) {
    const fs::path stem = out / "probability-driven" / ("run_" + std::to_string(k));
    ASSERT_TRUE(fs::exists(stem.string() + ".csv"));
    const RunReport r = parse_run_report(read_file(stem.string() + ".report"));
    EXPECT_EQ(r.seed, 41u + static_cast<unsigned>(k));
    EXPECT_EQ(r.rows, 10000u);
    EXPECT_EQ(r.calls.distribution_queries, 6u);
  }
}

TEST_F(CliTest, ZeroRowsIsUsageErrorWithoutOutput) {
  const fs::path out = dir_ / "none";
  EXPECT_EQ(run(generate_args(out.string(), 0, 1)), kExitUsage);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_NE(err_.str().find("--n"), std::string::npos);
}

TEST_F(CliTest, RerunIsByteIdentical) {
  ASSERT_EQ(run(generate_args((dir_ / "a").string(), 500, 2)), kExitOk);
  ASSERT_EQ(run(generate_args((dir_ / "b").string(), 500, 2)), kExitOk);
  for (const char* name : {"run_1.csv", "run_1.report", "run_2.csv", "run_2.report"}) {
    EXPECT_EQ(read_file(dir_ / "a" / "probability-driven" / name), read_file(dir_ / "b" / "probability-driven" / name))
        << name;
  }
}

TEST_F(CliTest, ParallelRunsMatchSequential) {
  auto args = generate_args((dir_ / "p").string(), 500, 3);
  args.push_back("--parallel-runs");
  ASSERT_EQ(run(args), kExitOk);
  ASSERT_EQ(run(generate_args((dir_ / "s").string(), 500, 3)), kExitOk);
  EXPECT_EQ(read_file(dir_ / "p" / "probability-driven" / "run_3.csv"),
            read_file(dir_ / "s" / "probability-driven" / "run_3.csv"));
}

TEST_F(CliTest, UsageErrors) {
  auto bad_strategy = generate_args((dir_ / "x").string(), 10, 1);
  bad_strategy[6] = "row-wise";
  EXPECT_EQ(run(bad_strategy), kExitUsage);
  auto bad_oracle = generate_args((dir_ / "x").string(), 10, 1);
  bad_oracle[4] = "carrier-pigeon";
  EXPECT_EQ(run(bad_oracle), kExitUsage);
  auto missing_fixture = generate_args((dir_ / "x").string(), 10, 1);
  missing_fixture[4] = "fixture:does_not_exist";
  EXPECT_EQ(run(missing_fixture), kExitUsage);
  auto bad_schema = generate_args((dir_ / "x").string(), 10, 1);
  bad_schema[2] = (dir_ / "nope.cfg").string();
  EXPECT_EQ(run(bad_schema), kExitUsage);
  auto zero_runs = generate_args((dir_ / "x").string(), 10, 0);
  EXPECT_EQ(run(zero_runs), kExitUsage);
  EXPECT_EQ(run({"generate", "--schema", "x"}), kExitUsage);
  EXPECT_EQ(run({}), kExitUsage);
  EXPECT_EQ(run({"--help"}), kExitOk);
}

TEST_F(CliTest, FixtureByPath) {
  auto args = generate_args((dir_ / "f").string(), 50, 1);
  args[4] = "fixture:" + data_path("california_original.fixture").string();
  EXPECT_EQ(run(args), kExitOk) << err_.str();
}

TEST_F(CliTest, RuntimeFailureNamesTheRun) {
  const fs::path fixture = dir_ / "partial.fixture";
  write_file(fixture, R"J({"entries": [{"feature": "Age Group", "context": "State is California/CA.",
                                       "distribution": {"Children (0-17)": 1.0}}]})J");
  auto args = generate_args((dir_ / "r").string(), 50, 2);
  args[4] = "fixture:" + fixture.string();
  EXPECT_EQ(run(args), kExitFailure);
  EXPECT_NE(err_.str().find("probability-driven run_1 (seed 42)"), std::string::npos) << err_.str();
  EXPECT_NE(err_.str().find("probability-driven run_2 (seed 43)"), std::string::npos);
}

TEST_F(CliTest, CompareProducesReportAndPanels) {
  const fs::path out = dir_ / "cmp";
  ASSERT_EQ(run({"compare", "--schema", data_path("california.cfg").string(), "--oracle",
                 "fixture:california_original", "--n", "1000", "--runs", "2", "--seed", "42", "--out",
                 out.string()}),
            kExitOk)
      << err_.str();
  ASSERT_TRUE(fs::exists(out / "comparison.report"));
  int panels = 0;
  for (const auto& e : fs::directory_iterator(out)) panels += e.path().filename().string().starts_with("panel_");
  EXPECT_EQ(panels, 4);
  const std::string report = read_file(out / "comparison.report");
  EXPECT_NE(report.find("probability-driven: distribution_queries=12 (6.0/run)"), std::string::npos) << report;
  EXPECT_NE(report.find("cell-by-cell: distribution_queries=0 (0.0/run) cell_queries=4000 (2000.0/run)"),
            std::string::npos);
  EXPECT_NE(report.find("table-wide: distribution_queries=0 (0.0/run) cell_queries=0 (0.0/run) table_queries=4"),
            std::string::npos);
  EXPECT_NE(out_.str().find("probability-driven: mean total variation"), std::string::npos);
  for (const char* s : {"probability-driven", "table-wide", "cell-by-cell"}) {
    EXPECT_TRUE(fs::exists(out / s / "run_2.csv")) << s;
  }
}

TEST_F(CliTest, CompareWithoutCellAnswersReportsFailure) {
  const fs::path fixture = dir_ / "nocells.fixture";
  auto doc = nlohmann::json::parse(read_file(data_path("california_original.fixture")));
  doc.erase("cells");
  write_file(fixture, doc.dump(2));
  const fs::path out = dir_ / "cmp";
  EXPECT_EQ(run({"compare", "--schema", data_path("california.cfg").string(), "--oracle",
                 "fixture:" + fixture.string(), "--n", "200", "--runs", "2", "--out", out.string()}),
            kExitFailure);
  const std::string report = read_file(out / "comparison.report");
  EXPECT_NE(report.find("Failed strategies"), std::string::npos);
  EXPECT_NE(report.find("cell-by-cell: cell-by-cell run_1"), std::string::npos) << report;
  EXPECT_TRUE(fs::exists(out / "panel_probability-driven.csv"));
  EXPECT_TRUE(fs::exists(out / "panel_table-wide.csv"));
  EXPECT_FALSE(fs::exists(out / "panel_cell-by-cell.csv"));
}

TEST_F(CliTest, EvaluateRuns) {
  const fs::path out = dir_ / "runs";
  ASSERT_EQ(run(generate_args(out.string(), 2000, 5)), kExitOk);
  std::vector<std::string> args = {"evaluate", "--schema", data_path("california.cfg").string(), "--reference",
                                   "california_original", "--out", (dir_ / "eval").string(), "--runs"};
  for (int k = 1; k <= 5; ++k) args.push_back((out / "probability-driven" / ("run_" + std::to_string(k) + ".csv")).string());
  ASSERT_EQ(run(args), kExitOk) << err_.str();
  const std::string report = read_file(dir_ / "eval" / "comparison.report");
  EXPECT_NE(report.find("probability-driven (5 runs)"), std::string::npos) << report;
  EXPECT_NE(out_.str().find("probability-driven: mean total variation"), std::string::npos);
}

TEST_F(CliTest, EvaluateSingleRunHasZeroStd) {
  const fs::path out = dir_ / "runs";
  ASSERT_EQ(run(generate_args(out.string(), 2000, 1)), kExitOk);
  ASSERT_EQ(run({"evaluate", "--schema", data_path("california.cfg").string(), "--reference", "california_original",
                 "--out", (dir_ / "eval").string(), "--runs", (out / "probability-driven" / "run_1.csv").string()}),
            kExitOk);
  const std::string report = read_file(dir_ / "eval" / "comparison.report");
  EXPECT_NE(report.find("± 0.0"), std::string::npos);
  EXPECT_EQ(report.find("± 0.1"), std::string::npos);
}

TEST_F(CliTest, EvaluateNamesMismatchedFile) {
  const fs::path other = dir_ / "other.csv";
  write_file(other, "Colour,Size\nred,big\n");
  const fs::path out = dir_ / "runs";
  ASSERT_EQ(run(generate_args(out.string(), 100, 1)), kExitOk);
  EXPECT_EQ(run({"evaluate", "--schema", data_path("california.cfg").string(), "--reference", "california_original",
                 "--out", (dir_ / "eval").string(), "--runs", (out / "probability-driven" / "run_1.csv").string(),
                 other.string()}),
            kExitFailure);
  EXPECT_NE(err_.str().find(other.string()), std::string::npos);
}

// HTTP oracle wiring with an in-process transport.
class CannedTransport : public HttpTransport {
 public:
  HttpResponse post(const std::string&, const std::map<std::string, std::string>&, const std::string& body,
                    std::chrono::milliseconds) override {
    ++calls;
    const auto req = nlohmann::json::parse(body);
    const std::string prompt = req["messages"][0]["content"];
    const std::string content = prompt.find("column Age Group") != std::string::npos
                                    ? R"J({"Children (0-17)": 0.5, "65 and older": 0.5})J"
                                    : R"({"Latino": 0.6, "White": 0.4})";
    nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
    return {200, reply.dump()};
  }
  int calls = 0;
};

TEST_F(CliTest, HttpOracleUsesTransport) {
  auto transport = std::make_shared<CannedTransport>();
  auto args = generate_args((dir_ / "h").string(), 100, 1);
  args[4] = "http";
  args.insert(args.end(), {"--endpoint", "http://127.0.0.1:9/v1/chat/completions", "--model", "test-model"});
  ASSERT_EQ(run(args, [&] { return transport; }), kExitOk) << err_.str();
  EXPECT_EQ(transport->calls, 3);  // 1 marginal + 2 age groups present
}

}  // namespace
}  // namespace pdsynth
