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

#include "ch2pp/ann.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <queue>
#include <string>
#include <thread>

#include "ch2pp/error.hpp"
#include "ch2pp/random.hpp"

namespace ch2pp {
namespace {

constexpr int kAnchorRetries = 20;
constexpr char kMagic[8] = {'C', 'H', '2', 'P', 'P', 'R', 'P', 'F'};

bool same_point(std::span<const double> a, std::span<const double> b) {
  return std::equal(a.begin(), a.end(), b.begin());
}

bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.index < b.index;
}

// Runs fn(i) for i in [0, count) over `threads` workers with static chunks.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i, 0u);
    return;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end, w] {
      for (std::size_t i = begin; i < end; ++i) fn(i, w);
    });
  }
  for (auto& t : workers) t.join();
}

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw DataError("truncated forest file");
  return value;
}

}  // namespace

LogBase parse_log_base(std::string_view text) {
  if (text == "ln" || text == "e") return LogBase::kE;
  if (text == "log10" || text == "10") return LogBase::kTen;
  if (text == "log2" || text == "2") return LogBase::kTwo;
  throw UsageError("unknown log base '" + std::string(text) + "' (ln|log10|log2)");
}

std::string_view to_string(LogBase base) {
  switch (base) {
    case LogBase::kE: return "ln";
    case LogBase::kTen: return "log10";
    case LogBase::kTwo: return "log2";
  }
  return "ln";
}

std::size_t compute_k(std::size_t n, int r, LogBase base) {
  if (n < 2) throw UsageError("k-NN needs at least 2 points");
  if (r < 1) throw UsageError("scale factor r must be a positive integer");
  const double x = static_cast<double>(n);
  double lg = 0.0;
  switch (base) {
    case LogBase::kE: lg = std::log(x); break;
    case LogBase::kTen: lg = std::log10(x); break;
    case LogBase::kTwo: lg = std::log2(x); break;
  }
  const double k = std::ceil(static_cast<double>(r) * lg);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(k, 1.0)), 1, n - 1);
}

double HyperplaneSplit::margin(std::span<const double> x) const {
  double dot = 0.0;
  for (std::size_t i = 0; i < normal.size(); ++i) dot += normal[i] * x[i];
  return dot - offset;
}

std::size_t RPTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

void QueryScratch::prepare(std::size_t n) {
  if (stamps_.size() != n || epoch_ == std::numeric_limits<std::uint32_t>::max()) {
    stamps_.assign(n, 0);
    epoch_ = 0;
  }
  ++epoch_;
}

bool QueryScratch::mark(int index) {
  auto& stamp = stamps_[static_cast<std::size_t>(index)];
  if (stamp == epoch_) return false;
  stamp = epoch_;
  return true;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double inverse_distance_weight(double distance) { return 1.0 / (1.0 + distance); }

RPForest RPForest::build(const PointSet& points, std::size_t trees, std::size_t leaf_size,
                         std::uint64_t seed, unsigned threads) {
  if (trees < 1) throw UsageError("forest needs at least one tree");
  if (leaf_size < 1) throw UsageError("leaf size must be at least 1");
  if (points.empty()) throw UsageError("cannot index an empty point set");

  RPForest forest;
  forest.points_ = points;
  forest.leaf_size_ = leaf_size;
  forest.seed_ = seed;
  forest.trees_.resize(trees);
  const std::size_t d = points.dim();

  parallel_for(trees, threads, [&](std::size_t t, unsigned) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    auto& nodes = forest.trees_[t].nodes_;

    struct Task {
      std::vector<int> items;
      int parent;
      bool right;
    };
    std::vector<Task> stack;
    std::vector<int> all(points.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    stack.push_back({std::move(all), -1, false});

    while (!stack.empty()) {
      Task task = std::move(stack.back());
      stack.pop_back();
      const int id = static_cast<int>(nodes.size());
      nodes.emplace_back();
      if (task.parent >= 0) {
        (task.right ? nodes[task.parent].right : nodes[task.parent].left) = id;
      }
      auto& items = task.items;
      if (items.size() <= leaf_size) {
        nodes[id].items = std::move(items);
        continue;
      }

      HyperplaneSplit split;
      std::vector<int> left;
      std::vector<int> right;
      bool found = false;
      for (int attempt = 0; attempt < kAnchorRetries && !found; ++attempt) {
        const std::size_t ia = rng.index(items.size());
        std::size_t ib = rng.index(items.size() - 1);
        if (ib >= ia) ++ib;
        const auto a = points[items[ia]];
        const auto b = points[items[ib]];
        if (same_point(a, b)) continue;
        split.normal.assign(d, 0.0);
        double norm = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          split.normal[j] = b[j] - a[j];
          norm += split.normal[j] * split.normal[j];
        }
        norm = std::sqrt(norm);
        split.offset = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          split.normal[j] /= norm;
          split.offset += split.normal[j] * 0.5 * (a[j] + b[j]);
        }
        left.clear();
        right.clear();
        for (int item : items) {
          const double m = split.margin(points[item]);
          const bool go_right = m > 0.0 || (m == 0.0 && rng.coin());
          (go_right ? right : left).push_back(item);
        }
        found = !left.empty() && !right.empty();
      }
      if (!found) {
        // Anchors kept coinciding (heavy duplication): split into random
        // halves under an arbitrary axis-aligned plane.
        split.normal.assign(d, 0.0);
        split.normal[0] = 1.0;
        split.offset = points[items.front()][0];
        rng.shuffle(std::span<int>(items));
        const auto half = items.begin() + static_cast<std::ptrdiff_t>(items.size() / 2);
        left.assign(items.begin(), half);
        right.assign(half, items.end());
        std::sort(left.begin(), left.end());
        std::sort(right.begin(), right.end());
      }
      nodes[id].split = std::move(split);
      // Right is pushed first so the left subtree is numbered next (pre-order).
      stack.push_back({std::move(right), id, true});
      stack.push_back({std::move(left), id, false});
    }
  });
  forest.compile();
  return forest;
}

void RPForest::compile() {
  flat_.clear();
  roots_.clear();
  planes_.clear();
  items_.clear();
  for (const auto& tree : trees_) {
    const auto base = static_cast<int>(flat_.size());
    roots_.push_back(static_cast<std::uint32_t>(base));
    for (const auto& node : tree.nodes_) {
      FlatNode flat;
      if (node.is_leaf()) {
        flat.begin = static_cast<std::uint32_t>(items_.size());
        flat.count = static_cast<std::uint32_t>(node.items.size());
        items_.insert(items_.end(), node.items.begin(), node.items.end());
      } else {
        flat.left = base + node.left;
        flat.right = base + node.right;
        flat.begin = static_cast<std::uint32_t>(planes_.size());
        planes_.push_back(node.split.offset);
        planes_.insert(planes_.end(), node.split.normal.begin(), node.split.normal.end());
      }
      flat_.push_back(flat);
    }
  }
}

std::vector<Neighbor> RPForest::query(std::span<const double> q, std::size_t k,
                                      std::size_t search_k, QueryScratch& scratch) const {
  const std::size_t n = points_.size();
  if (k < 1) throw UsageError("k must be at least 1");
  if (k > n) throw UsageError("k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  search_k = std::max(search_k, k);

  std::vector<Neighbor> result;
  if (search_k >= n) {
    // The budget can only be met once every point is a candidate.
    result.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      result.push_back({static_cast<int>(i), euclidean(q, points_[i])});
    }
    std::partial_sort(result.begin(), result.begin() + static_cast<std::ptrdiff_t>(k),
                      result.end(), neighbor_less);
    result.resize(k);
    return result;
  }

  struct Entry {
    double priority;
    int node;
    bool operator<(const Entry& o) const { return priority < o.priority; }
  };
  std::priority_queue<Entry> queue;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (std::uint32_t root : roots_) queue.push({kInf, static_cast<int>(root)});

  scratch.prepare(n);
  std::vector<int> candidates;
  candidates.reserve(std::min(n, search_k + leaf_size_));
  const std::size_t d = points_.dim();
  while (!queue.empty() && candidates.size() < search_k) {
    const Entry top = queue.top();
    queue.pop();
    const FlatNode& node = flat_[static_cast<std::size_t>(top.node)];
    if (node.left < 0) {
      const int* item = items_.data() + node.begin;
      for (std::uint32_t i = 0; i < node.count; ++i) {
        if (scratch.mark(item[i])) candidates.push_back(item[i]);
      }
      continue;
    }
    const double* plane = planes_.data() + node.begin;
    double dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) dot += plane[1 + j] * q[j];
    const double m = dot - plane[0];
    const int near = m > 0.0 ? node.right : node.left;
    const int far = m > 0.0 ? node.left : node.right;
    queue.push({std::min(top.priority, std::abs(m)), near});
    queue.push({std::min(top.priority, -std::abs(m)), far});
  }

  result.reserve(candidates.size());
  for (int c : candidates) result.push_back({c, euclidean(q, points_[c])});
  const std::size_t take = std::min(k, result.size());
  std::partial_sort(result.begin(), result.begin() + static_cast<std::ptrdiff_t>(take),
                    result.end(), neighbor_less);
  result.resize(take);
  return result;
}

std::vector<Neighbor> RPForest::query(std::span<const double> q, std::size_t k,
                                      std::size_t search_k) const {
  QueryScratch scratch;
  return query(q, k, search_k, scratch);
}

void RPForest::save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kFormatVersion);
  write_pod(out, static_cast<std::uint64_t>(points_.size()));
  write_pod(out, static_cast<std::uint64_t>(points_.dim()));
  write_pod(out, static_cast<std::uint64_t>(trees_.size()));
  write_pod(out, static_cast<std::uint64_t>(leaf_size_));
  write_pod(out, seed_);
  for (const auto& tree : trees_) {
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const auto& node = tree.nodes_[static_cast<std::size_t>(stack.back())];
      stack.pop_back();
      if (node.is_leaf()) {
        write_pod(out, std::uint8_t{0});
        write_pod(out, static_cast<std::uint64_t>(node.items.size()));
        for (int item : node.items) write_pod(out, static_cast<std::int32_t>(item));
      } else {
        write_pod(out, std::uint8_t{1});
        write_pod(out, node.split.offset);
        for (double c : node.split.normal) write_pod(out, c);
        stack.push_back(node.right);
        stack.push_back(node.left);
      }
    }
  }
  if (!out) throw DataError("failed to write forest");
}

RPForest RPForest::load(std::istream& in, const PointSet& points) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a forest file (bad magic)");
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kFormatVersion) {
    throw DataError("unsupported forest format version " + std::to_string(version));
  }
  const auto n = read_pod<std::uint64_t>(in);
  const auto d = read_pod<std::uint64_t>(in);
  const auto t = read_pod<std::uint64_t>(in);
  const auto l = read_pod<std::uint64_t>(in);
  const auto seed = read_pod<std::uint64_t>(in);
  if (n != points.size() || d != points.dim()) {
    throw DataError("forest was built over a " + std::to_string(n) + "x" + std::to_string(d) +
                    " point set, got " + std::to_string(points.size()) + "x" +
                    std::to_string(points.dim()));
  }

  RPForest forest;
  forest.points_ = points;
  forest.leaf_size_ = static_cast<std::size_t>(l);
  forest.seed_ = seed;
  forest.trees_.resize(static_cast<std::size_t>(t));
  for (auto& tree : forest.trees_) {
    struct Slot {
      int parent;
      bool right;
    };
    std::vector<Slot> stack{{-1, false}};
    while (!stack.empty()) {
      const Slot slot = stack.back();
      stack.pop_back();
      const int id = static_cast<int>(tree.nodes_.size());
      tree.nodes_.emplace_back();
      if (slot.parent >= 0) {
        auto& parent = tree.nodes_[static_cast<std::size_t>(slot.parent)];
        (slot.right ? parent.right : parent.left) = id;
      }
      auto& node = tree.nodes_.back();
      const auto tag = read_pod<std::uint8_t>(in);
      if (tag == 0) {
        const auto count = read_pod<std::uint64_t>(in);
        if (count > n) throw DataError("corrupt forest: oversized leaf");
        node.items.resize(static_cast<std::size_t>(count));
        for (auto& item : node.items) {
          item = read_pod<std::int32_t>(in);
          if (item < 0 || static_cast<std::uint64_t>(item) >= n) {
            throw DataError("corrupt forest: point index out of range");
          }
        }
      } else if (tag == 1) {
        node.split.offset = read_pod<double>(in);
        node.split.normal.resize(static_cast<std::size_t>(d));
        for (auto& c : node.split.normal) c = read_pod<double>(in);
        stack.push_back({id, true});
        stack.push_back({id, false});
      } else {
        throw DataError("corrupt forest: unknown node tag");
      }
    }
  }
  forest.compile();
  return forest;
}

ForestParams ForestParams::resolved(std::size_t k) const {
  ForestParams out = *this;
  if (out.trees == 0) out.trees = k;
  if (out.leaf_size == 0) out.leaf_size = k;
  if (out.search_k == 0) out.search_k = out.trees * k;
  return out;
}

NeighborLists approximate_neighbors(const RPForest& forest, std::size_t k, std::size_t search_k,
                                    unsigned threads) {
  const auto& points = forest.points();
  const std::size_t n = points.size();
  if (k >= n) throw UsageError("k must be smaller than n");
  NeighborLists lists(n);
  threads = std::max(1u, threads);
  std::vector<QueryScratch> scratch(threads);
  parallel_for(n, threads, [&](std::size_t i, unsigned worker) {
    const int self = static_cast<int>(i);
    auto found = forest.query(points[i], k + 1, std::max(search_k, k + 1), scratch[worker]);
    std::erase_if(found, [self](const Neighbor& nb) { return nb.index == self; });
    if (found.size() > k) found.resize(k);
    lists[i] = std::move(found);
  });
  return lists;
}

NeighborLists exact_neighbors(const PointSet& points, std::size_t k) {
  const std::size_t n = points.size();
  if (k >= n) throw UsageError("k must be smaller than n");
  NeighborLists lists(n);
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < n; ++i) {
    all.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) all.push_back({static_cast<int>(j), euclidean(points[i], points[j])});
    }
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                      neighbor_less);
    lists[i].assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return lists;
}

WeightedGraph graph_from_neighbors(const NeighborLists& lists, const WeightFn& weight) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (const auto& nb : lists[i]) {
      const int u = std::min(static_cast<int>(i), nb.index);
      const int v = std::max(static_cast<int>(i), nb.index);
      edges.push_back({u, v, weight(nb.distance)});
    }
  }
  // Union symmetrization: keep one copy of each pair. Distances are computed
  // by the same symmetric routine from both ends, so duplicates agree.
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; }),
              edges.end());
  return WeightedGraph::from_edges(lists.size(), edges);
}

WeightedGraph build_knn_graph(const PointSet& points, std::size_t k, const ForestParams& params,
                              const WeightFn& weight) {
  if (k >= points.size()) throw UsageError("k must be smaller than n");
  const ForestParams p = params.resolved(k);
  const RPForest forest = RPForest::build(points, p.trees, p.leaf_size, p.seed, p.threads);
  return graph_from_neighbors(approximate_neighbors(forest, k, p.search_k, p.threads), weight);
}

WeightedGraph exact_knn(const PointSet& points, std::size_t k, const WeightFn& weight) {
  return graph_from_neighbors(exact_neighbors(points, k), weight);
}

double recall(const NeighborLists& approx, const NeighborLists& exact, std::size_t k) {
  if (approx.size() != exact.size()) throw UsageError("recall: neighbor lists differ in n");
  if (approx.empty() || k == 0) return 1.0;
  double total = 0.0;
  std::vector<int> a;
  std::vector<int> e;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    a.clear();
    e.clear();
    for (std::size_t j = 0; j < std::min(k, approx[i].size()); ++j) a.push_back(approx[i][j].index);
    for (std::size_t j = 0; j < std::min(k, exact[i].size()); ++j) e.push_back(exact[i][j].index);
    std::sort(a.begin(), a.end());
    std::sort(e.begin(), e.end());
    std::vector<int> common;
    std::set_intersection(a.begin(), a.end(), e.begin(), e.end(), std::back_inserter(common));
    total += static_cast<double>(common.size()) / static_cast<double>(k);
  }
  return total / static_cast<double>(approx.size());
}

}  // namespace ch2pp
