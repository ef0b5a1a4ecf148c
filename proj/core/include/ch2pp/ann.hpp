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
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "ch2pp/dataset.hpp"
#include "ch2pp/graph.hpp"

namespace ch2pp {

enum class LogBase { kE, kTen, kTwo };

LogBase parse_log_base(std::string_view text);  // "ln"/"e", "log10"/"10", "log2"/"2"
std::string_view to_string(LogBase base);

/// Neighbor count r * log_base(n), rounded up, floored at 1 and capped at
/// n - 1. Throws UsageError for n < 2 or r < 1.
std::size_t compute_k(std::size_t n, int r, LogBase base);

/// Perpendicular bisector of two anchor points a and b. The normal is the
/// unit vector along b - a; margin(x) > 0 on b's side.
struct HyperplaneSplit {
  std::vector<double> normal;
  double offset = 0.0;

  double margin(std::span<const double> x) const;
  friend bool operator==(const HyperplaneSplit&, const HyperplaneSplit&) = default;
};

/// One random-projection tree. Node 0 is the root. Internal nodes hold a
/// split and two children (left = non-positive side); leaves hold point ids.
class RPTree {
 public:
  struct Node {
    HyperplaneSplit split;
    int left = -1;
    int right = -1;
    std::vector<int> items;

    bool is_leaf() const { return left < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;

  friend bool operator==(const RPTree&, const RPTree&) = default;

 private:
  friend class RPForest;
  std::vector<Node> nodes_;
};

struct Neighbor {
  int index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Per-thread scratch for RPForest::query; reusing it avoids an O(n) clear
/// per query.
class QueryScratch {
 public:
  void prepare(std::size_t n);
  /// True the first time an index is seen since the last prepare().
  bool mark(int index);

 private:
  std::vector<std::uint32_t> stamps_;
  std::uint32_t epoch_ = 0;
};

/// Forest of t random-projection trees over a copy of the indexed points.
class RPForest {
 public:
  /// Each tree draws from its own stream derived from (seed, tree index), so
  /// the result is independent of build order and thread count.
  static RPForest build(const PointSet& points, std::size_t trees, std::size_t leaf_size,
                        std::uint64_t seed, unsigned threads = 1);

  /// Best-first search over all trees through one priority queue keyed by
  /// the smallest split margin on the path. Leaves are expanded until
  /// `search_k` distinct candidates are collected or the queue empties; the
  /// k closest candidates by exact Euclidean distance are returned, ordered
  /// by (distance, index).
  std::vector<Neighbor> query(std::span<const double> q, std::size_t k, std::size_t search_k,
                              QueryScratch& scratch) const;
  std::vector<Neighbor> query(std::span<const double> q, std::size_t k,
                              std::size_t search_k) const;

  const PointSet& points() const { return points_; }
  const std::vector<RPTree>& trees() const { return trees_; }
  std::size_t leaf_size() const { return leaf_size_; }
  std::uint64_t seed() const { return seed_; }

  /// Binary format: magic "CH2PPRPF", u32 version, u64 n, d, t, l, seed,
  /// then each tree in pre-order. Little-endian host layout.
  void save(std::ostream& out) const;
  /// Throws DataError on bad magic, unknown version, or a dump whose n/d do
  /// not match `points`.
  static RPForest load(std::istream& in, const PointSet& points);

  static constexpr std::uint32_t kFormatVersion = 1;

  friend bool operator==(const RPForest&, const RPForest&) = default;

 private:
  // Contiguous copy of all trees used by query(). Internal nodes index a
  // plane (offset followed by the normal) in planes_; leaves index a run of
  // items_.
  struct FlatNode {
    int left = -1;
    int right = -1;
    std::uint32_t begin = 0;
    std::uint32_t count = 0;
    friend bool operator==(const FlatNode&, const FlatNode&) = default;
  };

  void compile();

  PointSet points_;
  std::vector<RPTree> trees_;
  std::size_t leaf_size_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<FlatNode> flat_;
  std::vector<std::uint32_t> roots_;
  std::vector<double> planes_;
  std::vector<int> items_;
};

/// Directed neighbor lists (before symmetrization), one per point, sorted by
/// (distance, index) and never containing the point itself.
using NeighborLists = std::vector<std::vector<Neighbor>>;

using WeightFn = std::function<double(double distance)>;

/// 1 / (1 + d): bounded in (0, 1], finite at zero distance.
double inverse_distance_weight(double distance);

double euclidean(std::span<const double> a, std::span<const double> b);

struct ForestParams {
  std::size_t trees = 0;      // t; 0 means "use k"
  std::size_t leaf_size = 0;  // l; 0 means "use k"
  std::size_t search_k = 0;   // 0 means t * k
  std::uint64_t seed = 0;
  unsigned threads = 1;

  /// Fills the zero fields from k.
  ForestParams resolved(std::size_t k) const;
};

NeighborLists approximate_neighbors(const RPForest& forest, std::size_t k, std::size_t search_k,
                                    unsigned threads = 1);
/// Brute force O(n^2 d); ties broken by lower index.
NeighborLists exact_neighbors(const PointSet& points, std::size_t k);

/// Union symmetrization: {u, v} is an edge if either lists the other.
WeightedGraph graph_from_neighbors(const NeighborLists& lists,
                                   const WeightFn& weight = inverse_distance_weight);

WeightedGraph build_knn_graph(const PointSet& points, std::size_t k, const ForestParams& params,
                              const WeightFn& weight = inverse_distance_weight);
WeightedGraph exact_knn(const PointSet& points, std::size_t k,
                        const WeightFn& weight = inverse_distance_weight);

/// Mean over points of |approx(p) ∩ exact(p)| / k.
double recall(const NeighborLists& approx, const NeighborLists& exact, std::size_t k);

}  // namespace ch2pp
