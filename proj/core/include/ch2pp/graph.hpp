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
#include <span>
#include <vector>

namespace ch2pp {

struct Edge {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

/// Undirected graph with positive real edge weights and positive integer
/// vertex weights, stored as CSR. Adjacency lists are sorted by neighbor id,
/// symmetric, free of self-loops and of parallel edges.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  /// Edgeless graph on n unit-weight vertices.
  explicit WeightedGraph(std::size_t n);

  /// Parallel edges are merged by summing their weights (in a fixed order,
  /// so both directions carry the identical sum). Self-loops, out-of-range
  /// endpoints and non-positive weights are rejected.
  static WeightedGraph from_edges(std::size_t n, std::span<const Edge> edges,
                                  std::vector<std::int64_t> vertex_weights = {});

  std::size_t num_vertices() const { return vertex_weights_.size(); }
  /// Undirected edge count.
  std::size_t num_edges() const { return neighbors_.size() / 2; }

  std::span<const int> neighbors(int v) const {
    return {neighbors_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::span<const double> weights(int v) const {
    return {weights_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(int v) const { return offsets_[v + 1] - offsets_[v]; }

  std::int64_t vertex_weight(int v) const { return vertex_weights_[v]; }
  std::span<const std::int64_t> vertex_weights() const { return vertex_weights_; }
  std::int64_t total_vertex_weight() const;

  /// 0 when u and v are not adjacent.
  double edge_weight(int u, int v) const;
  /// Undirected edges with u < v, ordered by (u, v).
  std::vector<Edge> edges() const;

  /// Smallest positive edge weight, or 0 for an edgeless graph.
  double min_edge_weight() const;

  /// Same topology, every edge weight multiplied by factor (> 0).
  WeightedGraph scaled(double factor) const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<int> neighbors_;
  std::vector<double> weights_;
  std::vector<std::int64_t> vertex_weights_;
};

/// Vertex -> part id. Ids are dense 0..p-1 wherever the library produces one.
using PartitionVector = std::vector<int>;

/// Number of distinct parts, assuming dense ids (max id + 1).
std::size_t part_count(std::span<const int> partition);

/// Total weight of edges whose endpoints lie in different parts.
double cut_weight(const WeightedGraph& g, std::span<const int> partition);

struct Subgraph {
  WeightedGraph graph;
  /// Local vertex id -> vertex id in the parent graph.
  std::vector<int> to_parent;
};

/// Subgraph induced by `vertices`, which must be distinct. Local ids follow
/// the order of `vertices`; vertex weights are carried over.
Subgraph induced_subgraph(const WeightedGraph& g, std::span<const int> vertices);

}  // namespace ch2pp
