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

#include <cmath>
#include <numeric>

#include "ch2pp/ann.hpp"
#include "ch2pp/blobs.hpp"
#include "ch2pp/error.hpp"
#include "ch2pp/partitioner.hpp"
#include "oracles.hpp"

namespace ch2pp {
namespace {

WeightedGraph two_triangles() {
  return WeightedGraph::from_edges(
      6, std::vector<Edge>{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1},
                           {2, 3, 0.1}});
}

WeightedGraph complete(int n) {
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) edges.push_back({u, v, 1.0});
  }
  return WeightedGraph::from_edges(static_cast<std::size_t>(n), edges);
}

WeightedGraph ring(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return WeightedGraph::from_edges(static_cast<std::size_t>(n), edges);
}

std::vector<std::size_t> part_sizes(const PartitionVector& p) {
  std::vector<std::size_t> sizes(part_count(p), 0);
  for (int x : p) ++sizes[x];
  return sizes;
}

TEST(Graph, ParallelEdgesAreSummedSymmetrically) {
  const auto g = WeightedGraph::from_edges(3, std::vector<Edge>{{0, 1, 0.1}, {1, 0, 0.2}, {1, 2, 1}});
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.edge_weight(0, 1), g.edge_weight(1, 0));
  EXPECT_DOUBLE_EQ(g.edge_weight(0, 1), 0.1 + 0.2);
}

TEST(Graph, RejectsSelfLoopsAndBadWeights) {
  EXPECT_THROW(WeightedGraph::from_edges(2, std::vector<Edge>{{1, 1, 1}}), UsageError);
  EXPECT_THROW(WeightedGraph::from_edges(2, std::vector<Edge>{{0, 1, 0}}), UsageError);
  EXPECT_THROW(WeightedGraph::from_edges(2, std::vector<Edge>{{0, 2, 1}}), UsageError);
}

TEST(Coarsen, PathHandTrace) {
  const auto g = WeightedGraph::from_edges(3, std::vector<Edge>{{0, 1, 5}, {1, 2, 1}});
  const std::vector<int> order{0, 1, 2};
  const CoarseningLevel level = coarsen(g, order, 10);
  EXPECT_EQ(level.mapping, (std::vector<int>{0, 0, 1}));
  ASSERT_EQ(level.graph.num_vertices(), 2u);
  EXPECT_EQ(level.graph.edge_weight(0, 1), 1.0);
  EXPECT_EQ(level.graph.vertex_weight(0), 2);
  EXPECT_EQ(level.graph.vertex_weight(1), 1);
}

TEST(Coarsen, EdgelessIsIdentity) {
  const WeightedGraph g(5);
  Rng rng(1);
  const CoarseningLevel level = coarsen(g, rng);
  EXPECT_EQ(level.graph.num_vertices(), 5u);
  EXPECT_EQ(level.mapping, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(Coarsen, PreservesTotalsAndCrossWeight) {
  const Dataset blobs = make_blobs({300, 4, 5, 10, 1, 3});
  const WeightedGraph g = exact_knn(blobs.points, 6);
  Rng rng(5);
  const CoarseningLevel level = coarsen(g, rng);
  EXPECT_EQ(level.graph.total_vertex_weight(), g.total_vertex_weight());
  double cross = 0.0;
  for (const Edge& e : g.edges()) {
    if (level.mapping[e.u] != level.mapping[e.v]) cross += e.weight;
  }
  double coarse = 0.0;
  for (const Edge& e : level.graph.edges()) coarse += e.weight;
  EXPECT_NEAR(coarse, cross, 1e-9);
}

TEST(InitialBisect, TwoTriangles) {
  Rng rng(3);
  const auto g = two_triangles();
  const auto p = initial_bisect(g, BisectTargets::equal(g), 10, 0.1, rng);
  EXPECT_DOUBLE_EQ(cut_weight(g, p), 0.1);
  EXPECT_DOUBLE_EQ(cut_weight(g, p), oracle::min_balanced_cut(g));
}

TEST(InitialBisect, IsolatedPair) {
  Rng rng(3);
  const WeightedGraph g(2);
  const auto p = initial_bisect(g, BisectTargets::equal(g), 10, 0.0, rng);
  EXPECT_NE(p[0], p[1]);
  EXPECT_EQ(cut_weight(g, p), 0.0);
}

TEST(InitialBisect, CompleteGraphCutsFour) {
  Rng rng(3);
  const auto g = complete(4);
  const auto p = initial_bisect(g, BisectTargets::equal(g), 10, 0.0, rng);
  EXPECT_EQ(cut_weight(g, p), 4.0);
  EXPECT_EQ(oracle::min_balanced_cut(g), 4.0);
}

TEST(FmRefine, OptimumIsFixedPoint) {
  const auto g = two_triangles();
  const PartitionVector best{0, 0, 0, 1, 1, 1};
  const auto p = fm_refine(g, best, BisectTargets::equal(g), 0.1);
  EXPECT_DOUBLE_EQ(cut_weight(g, p), 0.1);
}

TEST(FmRefine, MovesMisplacedVertex) {
  // Vertex 3 sits on the wrong side of an 8-vertex two-cluster graph.
  std::vector<Edge> edges;
  for (int u = 0; u < 4; ++u) {
    for (int v = u + 1; v < 4; ++v) {
      edges.push_back({u, v, 1.0});
      edges.push_back({u + 4, v + 4, 1.0});
    }
  }
  edges.push_back({3, 4, 0.1});
  const auto g = WeightedGraph::from_edges(8, edges);
  const PartitionVector start{0, 0, 0, 1, 1, 1, 1, 1};
  const auto p = fm_refine(g, start, BisectTargets::equal(g), 0.3);
  EXPECT_LT(cut_weight(g, p), cut_weight(g, start));
  EXPECT_DOUBLE_EQ(cut_weight(g, p), 0.1);
}

TEST(FmRefine, NeverWorsens) {
  const Dataset blobs = make_blobs({200, 3, 4, 10, 1, 9});
  const WeightedGraph g = exact_knn(blobs.points, 5);
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    PartitionVector p(200);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<int>(i % 2);
    rng.shuffle(std::span<int>(p));
    const auto q = fm_refine(g, p, BisectTargets::equal(g), 0.1);
    EXPECT_LE(cut_weight(g, q), cut_weight(g, p));
  }
}

TEST(MultilevelBisect, SmallGraphOptimal) {
  const auto g = two_triangles();
  const auto p = multilevel_bisect(g, BisectTargets::equal(g), {}, 4);
  EXPECT_DOUBLE_EQ(cut_weight(g, p), 0.1);
}

TEST(MultilevelBisect, PlantedBridges) {
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const WeightedGraph g = oracle::planted_bisection(50, 2, 0.05, seed);
    const auto p = multilevel_bisect(g, BisectTargets::equal(g), {}, seed);
    if (std::abs(cut_weight(g, p) - 0.1) < 1e-12) ++recovered;
  }
  EXPECT_GE(recovered, 18);
}

TEST(MultilevelBisect, Deterministic) {
  const Dataset blobs = make_blobs({1000, 4, 6, 10, 1, 2});
  const WeightedGraph g = exact_knn(blobs.points, 8);
  EXPECT_EQ(multilevel_bisect(g, BisectTargets::equal(g), {}, 7),
            multilevel_bisect(g, BisectTargets::equal(g), {}, 7));
}

TEST(Partition, SinglePart) {
  const auto p = partition(ring(10), 1, {}, 1);
  EXPECT_EQ(p, PartitionVector(10, 0));
}

TEST(Partition, RingSplitsIntoArcs) {
  const auto g = ring(16);
  const auto p = partition(g, 2, {}, 1);
  EXPECT_EQ(part_sizes(p), (std::vector<std::size_t>{8, 8}));
  EXPECT_EQ(cut_weight(g, p), 2.0);
}

TEST(Partition, TooManyPartsIsUsageError) {
  EXPECT_THROW(partition(ring(4), 5, {}, 1), UsageError);
}

TEST(Partition, BalanceOnBlobs) {
  const Dataset blobs = make_blobs({2000, 8, 10, 10, 1, 5});
  const WeightedGraph g = exact_knn(blobs.points, 12);
  for (std::size_t m : {std::size_t{3}, std::size_t{7}, std::size_t{11}, compute_m(2000)}) {
    const auto p = partition(g, m, {}, m);
    EXPECT_EQ(part_count(p), m);
    const double cap = 1.1 * std::ceil(2000.0 / static_cast<double>(m));
    for (std::size_t s : part_sizes(p)) EXPECT_LE(static_cast<double>(s), cap) << "m=" << m;
  }
}

TEST(ComputeM, TableValues) {
  EXPECT_EQ(compute_m(16), 2u);
  EXPECT_EQ(compute_m(150), 6u);
  EXPECT_EQ(compute_m(10992), 52u);
  EXPECT_EQ(compute_m(3), 2u);
  EXPECT_EQ(compute_m(1), 1u);
}

}  // namespace
}  // namespace ch2pp
