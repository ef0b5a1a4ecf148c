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
#include <sstream>

#include "ch2pp/ann.hpp"
#include "ch2pp/blobs.hpp"
#include "ch2pp/error.hpp"
#include "ch2pp/floodfill.hpp"
#include "ch2pp/merger.hpp"
#include "ch2pp/metrics.hpp"
#include "oracles.hpp"

namespace ch2pp {
namespace {

WeightedGraph cycle4() {
  return WeightedGraph::from_edges(4, std::vector<Edge>{{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}});
}

WeightedGraph bridged_cliques(double bridge) {
  std::vector<Edge> edges;
  for (int u = 0; u < 4; ++u) {
    for (int v = u + 1; v < 4; ++v) {
      edges.push_back({u, v, 1.0});
      edges.push_back({u + 4, v + 4, 1.0});
    }
  }
  edges.push_back({3, 4, bridge});
  return WeightedGraph::from_edges(8, edges);
}

std::vector<int> all_of(const WeightedGraph& g) {
  std::vector<int> m(g.num_vertices());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<int>(i);
  return m;
}

TEST(InternalStats, CycleOfFour) {
  const auto g = cycle4();
  const auto s = internal_stats(g, all_of(g), {});
  EXPECT_EQ(s.ic, 2.0);
  EXPECT_EQ(s.icl, 1.0);
  EXPECT_FALSE(s.tiny);
}

TEST(InternalStats, BridgedCliques) {
  const auto g = bridged_cliques(0.2);
  const auto s = internal_stats(g, all_of(g), {});
  EXPECT_DOUBLE_EQ(s.ic, 0.2);
  EXPECT_DOUBLE_EQ(s.icl, 0.2);
  EXPECT_DOUBLE_EQ(s.ic, oracle::min_balanced_cut(g));
}

TEST(InternalStats, SingletonUsesGlobalMinimum) {
  const auto g = bridged_cliques(0.2);
  const auto s = internal_stats(g, std::vector{5}, {});
  EXPECT_TRUE(s.tiny);
  EXPECT_DOUBLE_EQ(s.ic, 0.2);
  EXPECT_DOUBLE_EQ(s.icl, 0.2);
}

TEST(InternalStats, SmallClusterUsesMeanWeight) {
  const auto g = WeightedGraph::from_edges(3, std::vector<Edge>{{0, 1, 0.2}, {1, 2, 0.4}});
  const auto s = internal_stats(g, std::vector{0, 1, 2}, {});
  EXPECT_TRUE(s.tiny);
  EXPECT_DOUBLE_EQ(s.ic, 0.3);
}

TEST(PairStats, NoEdges) {
  const auto g = bridged_cliques(0.2);
  const auto ps = pair_stats(g, std::vector{0, 1}, std::vector{2});
  EXPECT_EQ(ps.edge_count, 2u);
  const auto none = pair_stats(g, std::vector{0}, std::vector{5});
  EXPECT_EQ(none.ec, 0.0);
  EXPECT_EQ(none.edge_count, 0u);
  EXPECT_EQ(none.cl(), 0.0);
}

TEST(PairStats, SingleEdge) {
  const auto g = WeightedGraph::from_edges(2, std::vector<Edge>{{0, 1, 0.7}});
  const auto ps = pair_stats(g, std::vector{0}, std::vector{1});
  EXPECT_EQ(ps.ec, 0.7);
  EXPECT_EQ(ps.cl(), 0.7);
  EXPECT_EQ(ps.edge_count, 1u);
}

TEST(PairStats, ThreeEdges) {
  const auto g =
      WeightedGraph::from_edges(4, std::vector<Edge>{{0, 2, 0.2}, {0, 3, 0.3}, {1, 3, 0.5}});
  const auto ps = pair_stats(g, std::vector{0, 1}, std::vector{2, 3});
  EXPECT_DOUBLE_EQ(ps.ec, 1.0);
  EXPECT_DOUBLE_EQ(ps.cl(), 1.0 / 3.0);
  EXPECT_EQ(ps.edge_count, 3u);
}

TEST(PairStats, SymmetricToTheBit) {
  const Dataset blobs = make_blobs({300, 4, 3, 10, 1, 6});
  const WeightedGraph g = exact_knn(blobs.points, 9);
  std::vector<int> a, b;
  for (int i = 0; i < 300; ++i) (i % 3 == 0 ? a : b).push_back(i);
  const auto ab = pair_stats(g, a, b);
  const auto ba = pair_stats(g, b, a);
  EXPECT_EQ(ab.ec, ba.ec);
  EXPECT_EQ(ab.edge_count, ba.edge_count);
}

TEST(Similarity, SymmetricPairIsOne) {
  const ClusterSummary s{10, 0.8, 0.4, false};
  for (double alpha : {0.5, 2.0, 3.0}) {
    MergeParams p;
    p.alpha = alpha;
    p.beta = alpha + 1;
    EXPECT_DOUBLE_EQ(similarity(s, s, {0.8, 2}, p), 1.0);
  }
}

TEST(Similarity, NoEdgesIsZero) {
  const ClusterSummary s{10, 0.8, 0.4, true};
  EXPECT_EQ(similarity(s, s, {}, {}), 0.0);
}

TEST(Similarity, ClosedForm) {
  const ClusterSummary s{4, 1.0, 0.5, false};
  EXPECT_DOUBLE_EQ(similarity(s, s, {0.5, 2}, {}), 0.125);
}

TEST(Similarity, TinyMultiplies) {
  const ClusterSummary s{4, 1.0, 0.5, false};
  const ClusterSummary t{1, 1.0, 0.5, true};
  EXPECT_DOUBLE_EQ(similarity(s, t, {0.5, 2}, {}), 0.125 * 1e3 * 1.0);
}

TEST(MergeAll, SinglePartHasNoMerges) {
  const auto g = cycle4();
  const Dendrogram d = merge_all(g, PartitionVector(4, 0), {});
  EXPECT_TRUE(d.merges.empty());
  EXPECT_EQ(cut(d, 1), LabelVector(4, 0));
}

TEST(MergeAll, BlobsRecoveredFromFourParts) {
  const Dataset blobs = make_blobs({200, 2, 2, 30, 0.5, 12});
  const WeightedGraph g = exact_knn(blobs.points, 8);
  ASSERT_EQ(split_disconnected(g, *blobs.labels), *blobs.labels) << "blobs must be connected";
  // Split each blob in two by its first coordinate.
  PartitionVector p(200);
  for (int blob = 0; blob < 2; ++blob) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < 200; ++i) {
      if ((*blobs.labels)[i] == blob) xs.push_back(blobs.points[i][0]);
    }
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    const double median = xs[xs.size() / 2];
    for (std::size_t i = 0; i < 200; ++i) {
      if ((*blobs.labels)[i] == blob) p[i] = 2 * blob + (blobs.points[i][0] < median ? 0 : 1);
    }
  }
  const PartitionVector parts = split_disconnected(g, p);
  const Dendrogram d = merge_all(g, parts, {}, std::nullopt, &blobs.points);
  ASSERT_GE(d.merges.size(), 2u);
  const LabelVector two = cut(d, 2);
  EXPECT_EQ(acc(*blobs.labels, two), 1.0);
}

TEST(MergeAll, MatchesGlobalMaxOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset blobs = make_blobs({160, 3, 4, 8, 1.5, seed});
    const WeightedGraph g = exact_knn(blobs.points, 6);
    const PartitionVector parts = split_disconnected(g, partition(g, 8, {}, seed));
    MergeParams params;
    params.seed = seed;
    params.verify = true;
    const Dendrogram d = merge_all(g, parts, params);
    const auto expected = oracle::merge_order(g, parts, params);
    ASSERT_EQ(d.merges.size(), expected.size());
    for (std::size_t s = 0; s < expected.size(); ++s) {
      EXPECT_EQ(d.merges[s].first, expected[s].first) << "seed " << seed << " step " << s;
      EXPECT_EQ(d.merges[s].second, expected[s].second) << "seed " << seed << " step " << s;
      EXPECT_EQ(d.merges[s].score, expected[s].score) << "seed " << seed << " step " << s;
    }
  }
}

TEST(MergeAll, DisconnectedClustersFallBack) {
  const auto g = WeightedGraph::from_edges(4, std::vector<Edge>{{0, 1, 1}, {2, 3, 1}});
  const PointSet pts(4, 1, {0, 1, 50, 51});
  const Dendrogram d = merge_all(g, PartitionVector{0, 0, 1, 1}, {}, std::nullopt, &pts);
  ASSERT_EQ(d.merges.size(), 1u);
  EXPECT_TRUE(d.merges[0].fallback);
  EXPECT_EQ(d.merges[0].score, 0.0);
}

TEST(MergeAll, EvaluationPicksBestStep) {
  const Dataset blobs = make_blobs({120, 2, 3, 30, 0.5, 4});
  const WeightedGraph g = exact_knn(blobs.points, 6);
  const PartitionVector parts = split_disconnected(g, partition(g, 6, {}, 1));
  const Dendrogram d =
      merge_all(g, parts, {}, MergeEvaluation{*blobs.labels, Metric::kAcc}, &blobs.points);
  ASSERT_EQ(d.metric_by_step.size(), d.merges.size() + 1);
  ASSERT_TRUE(d.best_step);
  for (double m : d.metric_by_step) EXPECT_LE(m, d.metric_by_step[*d.best_step]);
  EXPECT_EQ(acc(*blobs.labels, d.labels_after(*d.best_step)), d.metric_by_step[*d.best_step]);
}

TEST(Cut, BoundsAndIdentity) {
  const Dataset blobs = make_blobs({90, 2, 3, 30, 0.5, 4});
  const WeightedGraph g = exact_knn(blobs.points, 6);
  const PartitionVector parts = split_disconnected(g, partition(g, 5, {}, 1));
  const Dendrogram d = merge_all(g, parts, {}, std::nullopt, &blobs.points);
  EXPECT_EQ(cut(d, d.initial_parts), canonicalize_labels(parts));
  EXPECT_EQ(cut(d, 1), LabelVector(90, 0));
  EXPECT_THROW(cut(d, 0), UsageError);
  EXPECT_THROW(cut(d, d.initial_parts + 1), UsageError);
}

TEST(Dendrogram, TsvHasOneLinePerMerge) {
  const auto g = bridged_cliques(0.2);
  const Dendrogram d = merge_all(g, PartitionVector{0, 0, 1, 1, 2, 2, 3, 3}, {});
  std::ostringstream out;
  d.write_tsv(out);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

}  // namespace
}  // namespace ch2pp
