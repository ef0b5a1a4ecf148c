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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ch2pp/dataset.hpp"
#include "ch2pp/graph.hpp"
#include "ch2pp/metrics.hpp"
#include "ch2pp/partitioner.hpp"

namespace ch2pp {

struct MergeParams {
  double alpha = 2.0;   // exponent on relative closeness
  double beta = 1.0;    // exponent on relative interconnectivity
  double m_fact = 1e3;  // similarity multiplier when either side is tiny
  /// Clusters smaller than this get fallback internal statistics.
  std::size_t min_bisect_size = 4;
  PartitionerOptions bisect;
  std::uint64_t seed = 0;
  /// Re-check cluster bookkeeping after every merge (throws InvariantError).
  bool verify = false;
};

/// Internal interconnectivity (weight of the edges cut by a balanced
/// self-bisection) and internal closeness (their mean weight).
struct InternalStats {
  double ic = 0.0;
  double icl = 0.0;
  bool tiny = false;
};

struct ClusterSummary {
  std::size_t size = 0;
  double ic = 0.0;
  double icl = 0.0;
  bool tiny = false;
};

/// Edges running between two clusters.
struct PairStats {
  double ec = 0.0;
  std::size_t edge_count = 0;

  /// Mean crossing edge weight; 0 when there are no crossing edges.
  double cl() const { return edge_count ? ec / static_cast<double>(edge_count) : 0.0; }
};

/// Small or bisection-less clusters fall back to the mean weight of their
/// internal edges, or to `fallback_weight` when they have none, and are
/// flagged tiny. The bisection seed is derived from params.seed and the
/// member list, so equal member sets always get equal statistics.
InternalStats internal_stats(const WeightedGraph& g, std::span<const int> members,
                             const MergeParams& params, double fallback_weight);
/// Uses the graph's smallest edge weight (1 for an edgeless graph) as fallback.
InternalStats internal_stats(const WeightedGraph& g, std::span<const int> members,
                             const MergeParams& params);

/// Crossing edges are summed in (min endpoint, max endpoint) order, so the
/// result is symmetric in ci and cj to the last bit.
PairStats pair_stats(const WeightedGraph& g, std::span<const int> ci, std::span<const int> cj);

/// R_CL^alpha * R_IC^beta with
///   R_IC = EC / ((IC_i + IC_j) / 2)
///   R_CL = CL / (|ci|/(|ci|+|cj|) ICL_i + |cj|/(|ci|+|cj|) ICL_j)
/// multiplied by m_fact when either cluster is tiny; 0 without crossing edges.
double similarity(const ClusterSummary& si, const ClusterSummary& sj, const PairStats& ps,
                  const MergeParams& params);

struct MergeRecord {
  std::size_t step = 0;  // 1-based
  int first = 0;         // lower cluster id
  int second = 0;
  double score = 0.0;
  int merged = 0;        // id of the new cluster
  std::size_t live = 0;  // clusters left after this merge
  bool fallback = false; // merged by centroid distance, no shared edges
};

/// Merge history over an initial partition. Initial parts keep their ids
/// 0..p-1; the cluster created by merge s gets id p + s - 1.
struct Dendrogram {
  PartitionVector initial;
  std::size_t initial_parts = 0;
  std::vector<MergeRecord> merges;
  std::optional<Metric> metric;
  /// metric_by_step[s] = metric after s merges (s = 0 is the initial partition).
  std::vector<double> metric_by_step;
  /// First step attaining the maximum of metric_by_step.
  std::optional<std::size_t> best_step;

  /// Labels 0..K-1 (first-occurrence order) after replaying `steps` merges.
  LabelVector labels_after(std::size_t steps) const;

  /// step<TAB>first<TAB>second<TAB>score[<TAB>metric], one merge per line.
  void write_tsv(std::ostream& out) const;
  /// {"initial_parts", "merges", "best_step", "best_metric", "metric"}.
  std::string summary_json() const;
};

struct MergeEvaluation {
  std::span<const int> truth;
  Metric metric = Metric::kAcc;
};

/// Greedy agglomeration: repeatedly merges the live pair of maximum
/// similarity (ties: lowest id pair) using a lazily invalidated max-heap.
/// Clusters without shared edges are joined last by nearest centroid when
/// `points` is given, else by lowest ids, with score 0. The partition must
/// be dense; parts should be connected (see split_disconnected).
Dendrogram merge_all(const WeightedGraph& g, std::span<const int> partition,
                     const MergeParams& params,
                     const std::optional<MergeEvaluation>& evaluation = std::nullopt,
                     const PointSet* points = nullptr);

/// Flat clustering with exactly K clusters. Throws UsageError when K is out
/// of range or needs more merges than were recorded.
LabelVector cut(const Dendrogram& dendrogram, std::size_t clusters);

}  // namespace ch2pp
