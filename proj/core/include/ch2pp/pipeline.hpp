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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ch2pp/ann.hpp"
#include "ch2pp/dataset.hpp"
#include "ch2pp/merger.hpp"
#include "ch2pp/metrics.hpp"

namespace ch2pp {

enum class RunMode { kCut, kEval };

RunMode parse_run_mode(std::string_view text);
std::string_view to_string(RunMode mode);

/// Everything a clustering run needs. Unset optionals resolve to the
/// defaults: k = ceil(r log_base n), t = l = k, search_k = t k,
/// m = floor(sqrt(n) / 2).
struct RunConfig {
  std::filesystem::path dataset;
  std::optional<LabelColumn> label_column;
  Normalization normalize = Normalization::kNone;
  int r = 2;
  LogBase log_base = LogBase::kTwo;
  std::optional<std::size_t> k;
  std::optional<std::size_t> t;
  std::optional<std::size_t> l;
  std::optional<std::size_t> search_k;
  std::optional<std::size_t> m;
  double imbalance = 0.10;
  double alpha = 2.0;
  double beta = 1.0;
  double m_fact = 1e3;
  std::uint64_t seed = 1;
  RunMode mode = RunMode::kCut;
  std::size_t clusters = 2;
  Metric metric = Metric::kAcc;
  /// Directory for labels/report/dendrogram files; empty writes nothing.
  std::filesystem::path output;
  unsigned threads = 1;
  /// Allow recall runs above the exact-oracle size guard.
  bool force = false;
};

struct ResolvedParams {
  std::size_t n = 0;
  std::size_t d = 0;
  int r = 0;
  LogBase log_base = LogBase::kTwo;
  std::size_t k = 0;
  std::size_t t = 0;
  std::size_t l = 0;
  std::size_t search_k = 0;
  std::size_t m = 0;
  double imbalance = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double m_fact = 0.0;
  std::uint64_t seed = 0;
  Normalization normalize = Normalization::kNone;
};

ResolvedParams resolve(const RunConfig& config, std::size_t n, std::size_t d);

struct PhaseTimes {
  double graph_ms = 0.0;
  double partition_ms = 0.0;
  double floodfill_ms = 0.0;
  double merge_ms = 0.0;
  double total_ms = 0.0;
};

struct RunReport {
  ResolvedParams params;
  RunMode mode = RunMode::kCut;
  PhaseTimes times;
  std::size_t graph_edges = 0;
  std::size_t initial_parts = 0;
  std::size_t floodfilled_parts = 0;
  Dendrogram dendrogram;
  LabelVector labels;
  std::size_t clusters = 0;
  std::optional<double> nmi;
  std::optional<double> acc;
  std::filesystem::path labels_path;

  std::string to_json() const;
};

/// graph generation -> partitioning -> flood-fill -> merging. Phase
/// failures are rethrown with the phase name prepended. Writes
/// labels.txt, report.json, dendrogram.tsv and dendrogram.json when
/// config.output is set.
RunReport run_cluster(const RunConfig& config, const Dataset& data);
/// Loads (and normalizes) config.dataset first.
RunReport run_cluster(const RunConfig& config);

struct SweepRow {
  int r = 0;
  LogBase log_base = LogBase::kE;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double metric = 0.0;
  /// Index of an earlier row that resolved to the same k.
  std::optional<std::size_t> duplicate_of;
  RunReport report;
};

struct SweepReport {
  Metric metric = Metric::kAcc;
  std::vector<SweepRow> rows;
  std::size_t best = 0;

  std::string to_json() const;
};

/// The 12 combinations r in {1,2,4,8} x base in {ln, log10, log2}, rows in
/// r-major order, each run in eval mode with its own derived seed. The best
/// row's artifacts are written to config.output.
SweepReport run_sweep(const RunConfig& config, const Dataset& data);
SweepReport run_sweep(const RunConfig& config);

struct RecallReport {
  ResolvedParams params;
  double recall = 0.0;
  double forest_ms = 0.0;
  double approx_query_ms = 0.0;
  double exact_ms = 0.0;
  std::optional<std::string> warning;

  std::string to_json() const;
};

/// Approximate vs brute-force neighbor lists. Refuses n > 100000 unless
/// config.force; warns above 20000.
RecallReport run_recall(const RunConfig& config, const Dataset& data);
RecallReport run_recall(const RunConfig& config);

struct ScalingConfig {
  std::vector<std::size_t> sizes{10000, 20000, 40000};
  std::size_t dim = 8;
  std::size_t centers = 10;
  /// Fixed neighbor count so that t, l and search_k stay constant across n.
  std::size_t k = 10;
  int repeats = 3;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct ScalingRow {
  std::size_t n = 0;
  double graph_ms = 0.0;     // median over repeats
  double pipeline_ms = 0.0;  // median over repeats
  std::optional<double> graph_ratio;
  std::optional<double> pipeline_ratio;
};

struct ScalingReport {
  ScalingConfig config;
  std::vector<ScalingRow> rows;

  std::string to_json() const;
};

ScalingReport run_scaling(const ScalingConfig& config);

struct MetricsReport {
  double nmi = 0.0;
  double acc = 0.0;
  std::size_t n = 0;
  std::size_t k_true = 0;
  std::size_t k_pred = 0;

  std::string to_json() const;
};

MetricsReport compare_labels(std::span<const int> truth, std::span<const int> predicted);

}  // namespace ch2pp
