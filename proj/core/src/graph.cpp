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

#include "ch2pp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "ch2pp/error.hpp"

namespace ch2pp {

WeightedGraph::WeightedGraph(std::size_t n) : offsets_(n + 1, 0), vertex_weights_(n, 1) {}

WeightedGraph WeightedGraph::from_edges(std::size_t n, std::span<const Edge> edges,
                                        std::vector<std::int64_t> vertex_weights) {
  if (vertex_weights.empty()) vertex_weights.assign(n, 1);
  if (vertex_weights.size() != n) throw UsageError("vertex weight count does not match n");
  for (auto w : vertex_weights) {
    if (w <= 0) throw UsageError("vertex weights must be positive");
  }

  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n ||
        static_cast<std::size_t>(e.v) >= n) {
      throw UsageError("edge endpoint out of range");
    }
    if (e.u == e.v) throw UsageError("self-loop on vertex " + std::to_string(e.u));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw UsageError("edge weights must be positive and finite");
    }
    canon.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.weight});
  }
  const auto edge_less = [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v, a.weight) < std::tie(b.u, b.v, b.weight);
  };
  if (!std::is_sorted(canon.begin(), canon.end(), edge_less)) {
    std::sort(canon.begin(), canon.end(), edge_less);
  }
  std::vector<Edge> merged;
  merged.reserve(canon.size());
  for (const Edge& e : canon) {
    if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v) {
      merged.back().weight += e.weight;
    } else {
      merged.push_back(e);
    }
  }

  WeightedGraph g;
  g.vertex_weights_ = std::move(vertex_weights);
  g.offsets_.assign(n + 1, 0);
  for (const Edge& e : merged) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.neighbors_.resize(2 * merged.size());
  g.weights_.resize(2 * merged.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Edges sorted by (u, v) emit each row in ascending neighbor order for the
  // u side; the v side receives u values in ascending order as well.
  for (const Edge& e : merged) {
    g.neighbors_[cursor[e.v]] = e.u;
    g.weights_[cursor[e.v]++] = e.weight;
  }
  for (const Edge& e : merged) {
    g.neighbors_[cursor[e.u]] = e.v;
    g.weights_[cursor[e.u]++] = e.weight;
  }
  return g;
}

std::int64_t WeightedGraph::total_vertex_weight() const {
  return std::accumulate(vertex_weights_.begin(), vertex_weights_.end(), std::int64_t{0});
}

double WeightedGraph::edge_weight(int u, int v) const {
  const auto nbrs = neighbors(u);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v);
  if (it == nbrs.end() || *it != v) return 0.0;
  return weights(u)[static_cast<std::size_t>(it - nbrs.begin())];
}

std::vector<Edge> WeightedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (int u = 0; u < static_cast<int>(num_vertices()); ++u) {
    const auto nbrs = neighbors(u);
    const auto ws = weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (u < nbrs[i]) out.push_back({u, nbrs[i], ws[i]});
    }
  }
  return out;
}

double WeightedGraph::min_edge_weight() const {
  if (weights_.empty()) return 0.0;
  return *std::min_element(weights_.begin(), weights_.end());
}

WeightedGraph WeightedGraph::scaled(double factor) const {
  if (!(factor > 0.0)) throw UsageError("scale factor must be positive");
  WeightedGraph g = *this;
  for (double& w : g.weights_) w *= factor;
  return g;
}

std::size_t part_count(std::span<const int> partition) {
  if (partition.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(partition.begin(), partition.end())) + 1;
}

double cut_weight(const WeightedGraph& g, std::span<const int> partition) {
  double cut = 0.0;
  for (int u = 0; u < static_cast<int>(g.num_vertices()); ++u) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (u < nbrs[i] && partition[u] != partition[nbrs[i]]) cut += ws[i];
    }
  }
  return cut;
}

Subgraph induced_subgraph(const WeightedGraph& g, std::span<const int> vertices) {
  std::vector<int> local(g.num_vertices(), -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) local[vertices[i]] = static_cast<int>(i);
  std::vector<Edge> edges;
  std::vector<std::int64_t> vweights;
  vweights.reserve(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const int u = vertices[i];
    vweights.push_back(g.vertex_weight(u));
    const auto nbrs = g.neighbors(u);
    const auto ws = g.weights(u);
    for (std::size_t j = 0; j < nbrs.size(); ++j) {
      const int lv = local[nbrs[j]];
      if (lv > static_cast<int>(i)) edges.push_back({static_cast<int>(i), lv, ws[j]});
    }
  }
  Subgraph sub;
  sub.graph = WeightedGraph::from_edges(vertices.size(), edges, std::move(vweights));
  sub.to_parent.assign(vertices.begin(), vertices.end());
  return sub;
}

}  // namespace ch2pp
