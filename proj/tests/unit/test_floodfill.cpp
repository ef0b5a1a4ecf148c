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

#include "ch2pp/floodfill.hpp"
#include "ch2pp/random.hpp"
#include "oracles.hpp"

namespace ch2pp {
namespace {

TEST(SplitDisconnected, TwoCliquesInOnePart) {
  const auto g = WeightedGraph::from_edges(
      6, std::vector<Edge>{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}});
  EXPECT_EQ(split_disconnected(g, PartitionVector(6, 0)), (PartitionVector{0, 0, 0, 1, 1, 1}));
}

TEST(SplitDisconnected, ConnectedPartsAreRelabeledOnly) {
  const auto g = WeightedGraph::from_edges(4, std::vector<Edge>{{0, 1, 1}, {2, 3, 1}, {1, 2, 1}});
  EXPECT_EQ(split_disconnected(g, PartitionVector{1, 1, 0, 0}), (PartitionVector{0, 0, 1, 1}));
}

TEST(SplitDisconnected, IsolatedVertexSeparates) {
  const auto g = WeightedGraph::from_edges(4, std::vector<Edge>{{1, 2, 1}, {2, 3, 1}});
  EXPECT_EQ(split_disconnected(g, PartitionVector(4, 0)), (PartitionVector{0, 1, 1, 1}));
}

TEST(SplitDisconnected, CrossPartEdgesDoNotConnect) {
  const auto g = WeightedGraph::from_edges(3, std::vector<Edge>{{0, 1, 1}, {1, 2, 1}});
  EXPECT_EQ(split_disconnected(g, PartitionVector{0, 1, 0}), (PartitionVector{0, 1, 2}));
}

TEST(SplitDisconnected, MatchesUnionFind) {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 20 + rng.index(200);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
      const int u = static_cast<int>(rng.index(n));
      const int v = static_cast<int>(rng.index(n));
      if (u != v) edges.push_back({u, v, 1.0});
    }
    const auto g = WeightedGraph::from_edges(n, edges);
    PartitionVector p(n);
    for (auto& x : p) x = static_cast<int>(rng.index(4));
    EXPECT_EQ(split_disconnected(g, p), oracle::part_components(g, p)) << "trial " << trial;
  }
}

}  // namespace
}  // namespace ch2pp
