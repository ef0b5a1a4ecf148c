// Copyright 2026 The ch2pp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ch2pp/error.hpp"
#include "ch2pp/pipeline.hpp"

namespace ch2pp {
namespace {

namespace fs = std::filesystem;

const fs::path kData = CH2PP_TEST_DATA_DIR;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ch2pp_test_" + name);
  fs::remove_all(dir);
  return dir;
}

fs::path toy_file() {
  const fs::path dir = scratch_dir("toy");
  fs::create_directories(dir);
  std::ofstream out(dir / "toy.csv");
  out << "0,0\n0.1,0\n0,0.1\n9,9\n9.1,9\n";
  return dir / "toy.csv";
}

TEST(Resolve, EmptyFlagsGiveTableDefaults) {
  const ResolvedParams p = resolve(RunConfig{}, 10992, 16);
  EXPECT_EQ(p.k, 27u);
  EXPECT_EQ(p.t, 27u);
  EXPECT_EQ(p.l, 27u);
  EXPECT_EQ(p.search_k, 27u * 27u);
  EXPECT_EQ(p.m, 52u);
  EXPECT_EQ(p.alpha, 2.0);
  EXPECT_EQ(p.beta, 1.0);
  EXPECT_EQ(p.m_fact, 1000.0);
}

TEST(Resolve, OverridesAndValidation) {
  RunConfig c;
  c.k = 5;
  c.t = 3;
  EXPECT_EQ(resolve(c, 100, 2).search_k, 15u);
  c.k = 100;
  EXPECT_THROW(resolve(c, 100, 2), UsageError);
  RunConfig bad_m;
  bad_m.m = 0;
  EXPECT_THROW(resolve(bad_m, 100, 2), UsageError);
}

TEST(RunCluster, ToyCutMode) {
  RunConfig c;
  c.dataset = toy_file();
  c.k = 2;
  c.m = 2;
  c.clusters = 2;
  c.output = scratch_dir("toy_out");
  const RunReport report = run_cluster(c);
  EXPECT_EQ(report.labels.size(), 5u);
  EXPECT_EQ(report.clusters, 2u);
  EXPECT_EQ(report.labels, (LabelVector{0, 0, 0, 1, 1}));
  EXPECT_EQ(read_labels(c.output / "labels.txt"), report.labels);
  const auto json = nlohmann::json::parse(slurp(c.output / "report.json"));
  EXPECT_EQ(json["params"]["k"], 2);
  EXPECT_EQ(json["params"]["normalize"], "none");
  for (const auto& [_, ms] : json["times_ms"].items()) EXPECT_GE(ms.get<double>(), 0.0);
}

TEST(RunCluster, IrisEvalMode) {
  RunConfig c;
  c.dataset = kData / "iris.csv";
  c.label_column = LabelColumn::last_column();
  c.r = 4;
  c.log_base = LogBase::kTen;
  c.mode = RunMode::kEval;
  const RunReport report = run_cluster(c);
  EXPECT_EQ(report.params.k, 9u);
  ASSERT_TRUE(report.acc);
  EXPECT_GE(*report.acc, 0.90);
}

TEST(RunCluster, EvalWithoutLabelsIsUsageError) {
  RunConfig c;
  c.dataset = toy_file();
  c.k = 2;
  c.mode = RunMode::kEval;
  EXPECT_THROW(run_cluster(c), UsageError);
}

TEST(RunCluster, MissingFileIsDataError) {
  RunConfig c;
  c.dataset = "/nonexistent/file.csv";
  EXPECT_THROW(run_cluster(c), DataError);
}

TEST(RunCluster, ByteIdenticalReruns) {
  RunConfig c;
  c.dataset = kData / "iris.csv";
  c.label_column = LabelColumn::last_column();
  c.clusters = 3;
  c.output = scratch_dir("det_a");
  run_cluster(c);
  RunConfig again = c;
  again.output = scratch_dir("det_b");
  run_cluster(again);
  EXPECT_EQ(slurp(c.output / "labels.txt"), slurp(again.output / "labels.txt"));
  EXPECT_EQ(slurp(c.output / "dendrogram.tsv"), slurp(again.output / "dendrogram.tsv"));
}

TEST(RunSweep, IrisGrid) {
  RunConfig c;
  c.dataset = kData / "iris.csv";
  c.label_column = LabelColumn::last_column();
  const SweepReport sweep = run_sweep(c);
  ASSERT_EQ(sweep.rows.size(), 12u);
  EXPECT_EQ(sweep.rows[0].r, 1);
  EXPECT_EQ(sweep.rows[0].log_base, LogBase::kE);
  EXPECT_EQ(sweep.rows[11].r, 8);
  EXPECT_EQ(sweep.rows[11].log_base, LogBase::kTwo);
  for (const auto& row : sweep.rows) EXPECT_LE(row.metric, sweep.rows[sweep.best].metric);
}

TEST(RunSweep, DuplicateKNoted) {
  Dataset tiny;
  std::vector<double> values;
  LabelVector labels;
  for (int i = 0; i < 12; ++i) {
    values.push_back(i < 6 ? i * 0.1 : 10 + i * 0.1);
    labels.push_back(i < 6 ? 0 : 1);
  }
  tiny.points = PointSet(12, 1, values);
  tiny.labels = labels;
  const SweepReport sweep = run_sweep(RunConfig{}, tiny);
  ASSERT_EQ(sweep.rows.size(), 12u);
  bool any_duplicate = false;
  for (const auto& row : sweep.rows) {
    if (row.duplicate_of) {
      any_duplicate = true;
      EXPECT_EQ(sweep.rows[*row.duplicate_of].k, row.k);
    }
  }
  EXPECT_TRUE(any_duplicate);
}

TEST(RunSweep, NeedsLabels) {
  Dataset d;
  d.points = PointSet(4, 1, {0, 1, 2, 3});
  EXPECT_THROW(run_sweep(RunConfig{}, d), UsageError);
}

TEST(RunRecall, FullBudgetIsExact) {
  RunConfig c;
  c.dataset = kData / "iris.csv";
  c.label_column = LabelColumn::last_column();
  c.search_k = 150;
  EXPECT_EQ(run_recall(c).recall, 1.0);
}

TEST(RunRecall, DegradedStillReports) {
  RunConfig c;
  c.dataset = kData / "iris.csv";
  c.label_column = LabelColumn::last_column();
  c.t = 1;
  c.l = 1;
  c.search_k = 2;
  const RecallReport r = run_recall(c);
  EXPECT_GE(r.recall, 0.0);
  EXPECT_LE(r.recall, 1.0);
  EXPECT_FALSE(r.warning);
}

TEST(RunScaling, SingleSizeHasNoRatios) {
  ScalingConfig c;
  c.sizes = {500};
  c.repeats = 1;
  const ScalingReport r = run_scaling(c);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_FALSE(r.rows[0].graph_ratio);
}

TEST(CompareLabels, Counts) {
  const MetricsReport r = compare_labels(std::vector{0, 0, 1, 1}, std::vector{0, 0, 1, 2});
  EXPECT_EQ(r.k_true, 2u);
  EXPECT_EQ(r.k_pred, 3u);
  EXPECT_NEAR(r.nmi, 0.8, 1e-12);
}

int cli(const std::string& args) {
  const std::string cmd = std::string(CH2PP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

TEST(Cli, ExitCodes) {
  const std::string iris = (kData / "iris.csv").string();
  EXPECT_EQ(cli("cluster --dataset " + iris + " --label-column last --clusters 3"), 0);
  EXPECT_EQ(cli("cluster --dataset " + iris + " --clusters 3"), 2);
  EXPECT_EQ(cli("cluster --dataset " + iris + " --no-such-flag 1"), 1);
  EXPECT_EQ(cli("cluster --dataset " + iris + " --mode sideways"), 1);
  EXPECT_EQ(cli("cluster --dataset /nonexistent.csv"), 2);
  EXPECT_EQ(cli("frobnicate"), 1);
}

TEST(Cli, MetricsSubcommand) {
  const fs::path dir = scratch_dir("cli_metrics");
  fs::create_directories(dir);
  write_labels(dir / "a.txt", std::vector{0, 0, 1, 1});
  write_labels(dir / "b.txt", std::vector{1, 1, 0, 0});
  write_labels(dir / "c.txt", std::vector{1, 1, 0});
  EXPECT_EQ(cli("metrics " + (dir / "a.txt").string() + " " + (dir / "b.txt").string()), 0);
  EXPECT_EQ(cli("metrics " + (dir / "a.txt").string() + " " + (dir / "c.txt").string()), 2);
}

}  // namespace
}  // namespace ch2pp
