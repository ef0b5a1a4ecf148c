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

// Command-line front end: cluster, sweep, recall, scaling, metrics.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ch2pp/error.hpp"
#include "ch2pp/pipeline.hpp"

namespace {

using namespace ch2pp;

// CLI11 fills these raw strings; they are parsed into RunConfig afterwards so
// that every bad value surfaces as a UsageError with one exit code.
struct RawRunFlags {
  std::string dataset;
  std::string label_column;
  std::string normalize = "none";
  int r = 2;
  std::string log_base = "log2";
  std::optional<std::size_t> k, t, l, search_k, m;
  double imbalance = 0.10;
  double alpha = 2.0;
  double beta = 1.0;
  double m_fact = 1e3;
  std::uint64_t seed = 1;
  std::string mode = "cut";
  std::size_t clusters = 2;
  std::string metric = "acc";
  std::string output;
  unsigned threads = 1;
  bool force = false;
};

enum Sections : unsigned {
  kShape = 1u << 0,   // r / log-base
  kMode = 1u << 1,    // mode / clusters
  kMetric = 1u << 2,  // metric
  kMerge = 1u << 3,   // partition + merge parameters
  kForce = 1u << 4,
};

void add_run_flags(CLI::App& app, RawRunFlags& f, unsigned sections) {
  app.add_option("--dataset", f.dataset, "CSV file of numeric features")->required();
  app.add_option("--label-column", f.label_column, "ground-truth column: 'last' or 0-based index");
  app.add_option("--normalize", f.normalize, "none | minmax | zscore")->capture_default_str();
  if (sections & kShape) {
    app.add_option("--r", f.r, "k = ceil(r * log_base(n))")->capture_default_str();
    app.add_option("--log-base", f.log_base, "ln | log10 | log2")->capture_default_str();
  }
  app.add_option("--k", f.k, "explicit neighbor count");
  app.add_option("--t", f.t, "number of trees (default k)");
  app.add_option("--l", f.l, "leaf size (default k)");
  app.add_option("--search-k", f.search_k, "candidate budget per query (default t*k)");
  if (sections & kMerge) {
    app.add_option("--m", f.m, "initial partition count (default floor(sqrt(n)/2))");
    app.add_option("--imbalance", f.imbalance, "partition balance tolerance")->capture_default_str();
    app.add_option("--alpha", f.alpha, "closeness exponent")->capture_default_str();
    app.add_option("--beta", f.beta, "interconnectivity exponent")->capture_default_str();
    app.add_option("--m-fact", f.m_fact, "tiny-cluster score multiplier")->capture_default_str();
  }
  app.add_option("--seed", f.seed, "master seed")->capture_default_str();
  if (sections & kMode) {
    app.add_option("--mode", f.mode, "cut | eval")->capture_default_str();
    app.add_option("--clusters", f.clusters, "cluster count for cut mode")->capture_default_str();
  }
  if (sections & kMetric) {
    app.add_option("--metric", f.metric, "nmi | acc")->capture_default_str();
  }
  if (sections & kMerge) {
    app.add_option("--output", f.output, "directory for labels and reports");
  }
  app.add_option("--threads", f.threads, "worker threads")->capture_default_str();
  if (sections & kForce) {
    app.add_flag("--force", f.force, "run the exact oracle above the size guard");
  }
}

RunConfig to_config(const RawRunFlags& f) {
  RunConfig c;
  c.dataset = f.dataset;
  if (!f.label_column.empty()) c.label_column = LabelColumn::parse(f.label_column);
  c.normalize = parse_normalization(f.normalize);
  c.r = f.r;
  if (c.r < 1) throw UsageError("--r must be at least 1");
  c.log_base = parse_log_base(f.log_base);
  c.k = f.k;
  c.t = f.t;
  c.l = f.l;
  c.search_k = f.search_k;
  c.m = f.m;
  c.imbalance = f.imbalance;
  c.alpha = f.alpha;
  c.beta = f.beta;
  c.m_fact = f.m_fact;
  c.seed = f.seed;
  c.mode = parse_run_mode(f.mode);
  c.clusters = f.clusters;
  c.metric = parse_metric(f.metric);
  c.output = f.output;
  c.threads = f.threads == 0 ? 1 : f.threads;
  c.force = f.force;
  return c;
}

int exit_code(const Error& e) {
  if (dynamic_cast<const UsageError*>(&e)) return 1;
  if (dynamic_cast<const DataError*>(&e)) return 2;
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ch2pp: graph-based hierarchical clustering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ch2pp 0.1.0");

  RawRunFlags cluster_flags;
  auto* cluster = app.add_subcommand("cluster", "cluster a dataset and write labels");
  add_run_flags(*cluster, cluster_flags, kShape | kMode | kMetric | kMerge);

  RawRunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "run the 12-combination k sweep");
  add_run_flags(*sweep, sweep_flags, kMetric | kMerge);

  RawRunFlags recall_flags;
  auto* recall_cmd = app.add_subcommand("recall", "approximate vs exact neighbor recall");
  add_run_flags(*recall_cmd, recall_flags, kShape | kForce);

  ScalingConfig scaling_config;
  auto* scaling = app.add_subcommand("scaling", "time graph generation and the pipeline vs n");
  scaling->add_option("--sizes", scaling_config.sizes, "point counts")->capture_default_str();
  scaling->add_option("--dim", scaling_config.dim, "blob dimension")->capture_default_str();
  scaling->add_option("--centers", scaling_config.centers, "blob count")->capture_default_str();
  scaling->add_option("--k", scaling_config.k, "fixed neighbor count")->capture_default_str();
  scaling->add_option("--repeats", scaling_config.repeats, "runs per size")->capture_default_str();
  scaling->add_option("--seed", scaling_config.seed, "generator seed")->capture_default_str();
  scaling->add_option("--threads", scaling_config.threads, "worker threads")->capture_default_str();

  std::string truth_path;
  std::string predicted_path;
  auto* metrics = app.add_subcommand("metrics", "compare two label files");
  metrics->add_option("truth", truth_path, "ground-truth labels")->required();
  metrics->add_option("predicted", predicted_path, "predicted labels")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::string json;
    if (*cluster) {
      json = run_cluster(to_config(cluster_flags)).to_json();
    } else if (*sweep) {
      if (sweep_flags.label_column.empty()) sweep_flags.label_column = "last";
      json = run_sweep(to_config(sweep_flags)).to_json();
    } else if (*recall_cmd) {
      const RecallReport report = run_recall(to_config(recall_flags));
      if (report.warning) std::cerr << "warning: " << *report.warning << '\n';
      json = report.to_json();
    } else if (*scaling) {
      json = run_scaling(scaling_config).to_json();
    } else if (*metrics) {
      const LabelVector truth = read_labels(truth_path);
      const LabelVector predicted = read_labels(predicted_path);
      if (truth.size() != predicted.size()) {
        throw DataError("label files differ in length: " + std::to_string(truth.size()) +
                        " vs " + std::to_string(predicted.size()));
      }
      json = compare_labels(truth, predicted).to_json();
    }
    std::cout << json << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
