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
#include <span>
#include <vector>

#include "ch2pp/graph.hpp"
#include "ch2pp/random.hpp"

namespace ch2pp {

struct PartitionerOptions {
  /// Stop coarsening once a level has at most this many vertices.
  std::size_t coarsen_threshold = 100;
  /// Stop coarsening when a level keeps more than this fraction of vertices.
  double min_shrink = 0.9;
  int initial_trials = 10;
  int max_passes = 10;
  /// Allowed relative overshoot of a side's weight over its target.
  double imbalance = 0.10;
  /// Optional per-level trace: "level<TAB>n<TAB>edges<TAB>cut" lines.
  std::ostream* trace = nullptr;
};

struct CoarseningLevel {
  WeightedGraph graph;
  /// Fine vertex -> coarse vertex.
  std::vector<int> mapping;
};

/// Heavy-edge matching. Vertices are visited in `visit_order`; each unmatched
/// vertex pairs with its unmatched neighbor of maximum edge weight (ties go
/// to the lowest index) unless the pair would exceed `max_vertex_weight`.
/// Coarse ids are assigned in order of each group's smallest fine vertex.
CoarseningLevel coarsen(const WeightedGraph& g, std::span<const int> visit_order,
                        std::int64_t max_vertex_weight);
/// Random visit order; vertex weight cap 1.5 * total / threshold (at least 2).
CoarseningLevel coarsen(const WeightedGraph& g, Rng& rng, const PartitionerOptions& options = {});

/// Desired weights of the two sides of a bisection.
struct BisectTargets {
  double side0 = 0.0;
  double side1 = 0.0;

  static BisectTargets equal(const WeightedGraph& g);
};

/// Hard caps on the two sides' weights.
struct BalanceLimits {
  double max0 = 0.0;
  double max1 = 0.0;

  static BalanceLimits from(const BisectTargets& targets, double imbalance) {
    return {(1.0 + imbalance) * targets.side0, (1.0 + imbalance) * targets.side1};
  }
};

/// Best of `trials` greedy graph-growing seeds, each refined by FM. Isolated
/// vertices are dealt to the side with the larger remaining deficit. Throws
/// UsageError when one vertex alone outweighs both limits.
PartitionVector initial_bisect(const WeightedGraph& g, const BalanceLimits& limits, int trials,
                               int max_passes, Rng& rng);
PartitionVector initial_bisect(const WeightedGraph& g, const BisectTargets& targets,
                               int trials, double imbalance, Rng& rng);

/// Fiduccia-Mattheyses passes with the best-prefix rule. Never returns a
/// worse (imbalance, cut) state than its input.
PartitionVector fm_refine(const WeightedGraph& g, PartitionVector partition,
                          const BalanceLimits& limits, int max_passes);
PartitionVector fm_refine(const WeightedGraph& g, PartitionVector partition,
                          const BisectTargets& targets, double imbalance, int max_passes = 10);

/// Coarsen, bisect the coarsest graph, then project back refining at every
/// level. Deterministic given seed.
PartitionVector multilevel_bisect(const WeightedGraph& g, const BalanceLimits& limits,
                                  const PartitionerOptions& options, std::uint64_t seed);
PartitionVector multilevel_bisect(const WeightedGraph& g, const BisectTargets& targets,
                                  const PartitionerOptions& options, std::uint64_t seed);

/// Recursive multilevel bisection into m parts with ids 0..m-1. A call
/// owning m' parts splits its weight ceil(m'/2) : floor(m'/2). Every part
/// ends up no heavier than (1 + imbalance) * ceil(total / m) on feasible
/// inputs. m == 1 returns a single part; m > n throws UsageError.
PartitionVector partition(const WeightedGraph& g, std::size_t m,
                          const PartitionerOptions& options, std::uint64_t seed);

/// max(2, floor(sqrt(n) / 2)), capped at n.
std::size_t compute_m(std::size_t n);

}  // namespace ch2pp
