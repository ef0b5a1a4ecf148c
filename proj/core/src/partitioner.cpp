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

#include "ch2pp/partitioner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

#include "ch2pp/error.hpp"

namespace ch2pp {
namespace {

// No-improvement window that ends an FM pass early.
constexpr int kFmStall = 100;

double violation(const double weight[2], const BalanceLimits& limits) {
  return std::max(0.0, weight[0] - limits.max0) + std::max(0.0, weight[1] - limits.max1);
}

struct State {
  double violation;
  double cut;

  bool operator<(const State& o) const {
    if (violation != o.violation) return violation < o.violation;
    return cut < o.cut;
  }
};

State evaluate(const WeightedGraph& g, std::span<const int> part, const BalanceLimits& limits) {
  double weight[2] = {0.0, 0.0};
  for (int v = 0; v < static_cast<int>(g.num_vertices()); ++v) {
    weight[part[v]] += static_cast<double>(g.vertex_weight(v));
  }
  return {violation(weight, limits), cut_weight(g, part)};
}

// Gain-ordered vertex set: highest gain first, then lowest vertex id.
// Max-heap of (gain, vertex): highest gain first, then lowest vertex.
// Entries go stale when their vertex is locked, changes side, or changes
// gain; stale entries are discarded when they reach the top.
class GainHeap {
 public:
  void push(double gain, int v) {
    heap_.push_back({gain, v});
    std::push_heap(heap_.begin(), heap_.end(), Less{});
  }
  void build() { std::make_heap(heap_.begin(), heap_.end(), Less{}); }
  void add(double gain, int v) { heap_.push_back({gain, v}); }

  template <typename Valid>
  const std::pair<double, int>* top(Valid&& valid) {
    while (!heap_.empty() && !valid(heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), Less{});
      heap_.pop_back();
    }
    return heap_.empty() ? nullptr : &heap_.front();
  }

 private:
  struct Less {
    bool operator()(const std::pair<double, int>& a, const std::pair<double, int>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return a.second > b.second;
    }
  };
  std::vector<std::pair<double, int>> heap_;
};

// One FM pass; returns true if it committed an improving prefix.
bool fm_pass(const WeightedGraph& g, PartitionVector& part, const BalanceLimits& limits) {
  const int n = static_cast<int>(g.num_vertices());
  double weight[2] = {0.0, 0.0};
  std::vector<double> gain(static_cast<std::size_t>(n), 0.0);
  double cut = 0.0;
  for (int v = 0; v < n; ++v) {
    weight[part[v]] += static_cast<double>(g.vertex_weight(v));
    const auto nbrs = g.neighbors(v);
    const auto ws = g.weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (part[nbrs[i]] != part[v]) {
        gain[v] += ws[i];
        if (v < nbrs[i]) cut += ws[i];
      } else {
        gain[v] -= ws[i];
      }
    }
  }
  const double max_side[2] = {limits.max0, limits.max1};

  GainHeap heaps[2];
  for (int v = 0; v < n; ++v) heaps[part[v]].add(gain[v], v);
  heaps[0].build();
  heaps[1].build();
  std::vector<char> locked(static_cast<std::size_t>(n), 0);
  std::vector<int> moves;

  const State start{violation(weight, limits), cut};
  State best = start;
  std::size_t best_len = 0;
  int stall = 0;

  auto allowed = [&](int v, int from) {
    const int to = 1 - from;
    const double vw = static_cast<double>(g.vertex_weight(v));
    double after[2] = {weight[0], weight[1]};
    after[from] -= vw;
    after[to] += vw;
    const double before_v = violation(weight, limits);
    const double after_v = violation(after, limits);
    return (after_v <= before_v && after[to] <= max_side[to]) || after_v < before_v;
  };

  while (true) {
    int pick = -1;
    int from = -1;
    for (int s = 0; s < 2; ++s) {
      const auto* entry = heaps[s].top([&](const std::pair<double, int>& e) {
        return !locked[e.second] && part[e.second] == s && gain[e.second] == e.first;
      });
      if (!entry) continue;
      const auto [gv, v] = *entry;
      if (!allowed(v, s)) continue;
      if (pick < 0 || gv > gain[pick] || (gv == gain[pick] && v < pick)) {
        pick = v;
        from = s;
      }
    }
    if (pick < 0) break;

    const int to = 1 - from;
    locked[pick] = 1;
    part[pick] = to;
    const double vw = static_cast<double>(g.vertex_weight(pick));
    weight[from] -= vw;
    weight[to] += vw;
    cut -= gain[pick];
    moves.push_back(pick);

    const auto nbrs = g.neighbors(pick);
    const auto ws = g.weights(pick);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const int u = nbrs[i];
      if (locked[u]) continue;
      gain[u] += part[u] == to ? -2.0 * ws[i] : 2.0 * ws[i];
      heaps[part[u]].push(gain[u], u);
    }

    const State now{violation(weight, limits), cut};
    if (now < best) {
      best = now;
      best_len = moves.size();
      stall = 0;
    } else if (++stall >= kFmStall) {
      break;
    }
  }

  for (std::size_t i = moves.size(); i > best_len; --i) {
    const int v = moves[i - 1];
    part[v] = 1 - part[v];
  }
  return best_len > 0;
}

void grow_from_seeds(const WeightedGraph& g, PartitionVector& part, const BalanceLimits& limits,
                     Rng& rng) {
  const int n = static_cast<int>(g.num_vertices());
  const double total = static_cast<double>(g.total_vertex_weight());
  const double target0 = total * limits.max0 / (limits.max0 + limits.max1);
  const double target1 = total - target0;

  std::vector<int> connected;
  std::vector<int> isolated;
  for (int v = 0; v < n; ++v) (g.degree(v) ? connected : isolated).push_back(v);
  rng.shuffle(std::span<int>(connected));

  part.assign(static_cast<std::size_t>(n), 1);
  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  double w0 = 0.0;
  std::deque<int> queue;
  std::size_t next_seed = 0;
  while (w0 < target0) {
    if (queue.empty()) {
      while (next_seed < connected.size() && visited[connected[next_seed]]) ++next_seed;
      if (next_seed == connected.size()) break;
      queue.push_back(connected[next_seed]);
      visited[connected[next_seed]] = 1;
    }
    const int v = queue.front();
    queue.pop_front();
    const double vw = static_cast<double>(g.vertex_weight(v));
    if (w0 + vw > limits.max0) continue;
    part[v] = 0;
    w0 += vw;
    for (int u : g.neighbors(v)) {
      if (!visited[u]) {
        visited[u] = 1;
        queue.push_back(u);
      }
    }
  }

  // Isolated vertices have zero gain everywhere; place them directly.
  double w1 = 0.0;
  for (int v : connected) {
    if (part[v] == 1) w1 += static_cast<double>(g.vertex_weight(v));
  }
  for (int v : isolated) {
    const double vw = static_cast<double>(g.vertex_weight(v));
    const int side = (target0 - w0) >= (target1 - w1) ? 0 : 1;
    part[v] = side;
    (side == 0 ? w0 : w1) += vw;
  }
}

}  // namespace

CoarseningLevel coarsen(const WeightedGraph& g, std::span<const int> visit_order,
                        std::int64_t max_vertex_weight) {
  const int n = static_cast<int>(g.num_vertices());
  std::vector<int> match(static_cast<std::size_t>(n), -1);
  for (int v : visit_order) {
    if (match[v] >= 0) continue;
    int best = -1;
    double best_weight = -std::numeric_limits<double>::infinity();
    const auto nbrs = g.neighbors(v);
    const auto ws = g.weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const int u = nbrs[i];
      if (match[u] >= 0) continue;
      if (g.vertex_weight(v) + g.vertex_weight(u) > max_vertex_weight) continue;
      if (ws[i] > best_weight) {
        best = u;
        best_weight = ws[i];
      }
    }
    if (best >= 0) {
      match[v] = best;
      match[best] = v;
    } else {
      match[v] = v;
    }
  }

  CoarseningLevel level;
  level.mapping.assign(static_cast<std::size_t>(n), -1);
  std::vector<std::int64_t> coarse_weights;
  for (int v = 0; v < n; ++v) {
    if (level.mapping[v] >= 0) continue;
    const int id = static_cast<int>(coarse_weights.size());
    const int mate = match[v] >= 0 ? match[v] : v;
    level.mapping[v] = id;
    level.mapping[mate] = id;
    coarse_weights.push_back(g.vertex_weight(v) + (mate != v ? g.vertex_weight(mate) : 0));
  }

  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const int x = nbrs[i];
      if (u >= x) continue;
      const int cu = level.mapping[u];
      const int cx = level.mapping[x];
      if (cu != cx) edges.push_back({cu, cx, ws[i]});
    }
  }
  const std::size_t coarse_n = coarse_weights.size();
  level.graph = WeightedGraph::from_edges(coarse_n, edges, std::move(coarse_weights));
  return level;
}

CoarseningLevel coarsen(const WeightedGraph& g, Rng& rng, const PartitionerOptions& options) {
  std::vector<int> order(g.num_vertices());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  rng.shuffle(std::span<int>(order));
  const double threshold = static_cast<double>(std::max<std::size_t>(options.coarsen_threshold, 1));
  const auto cap = static_cast<std::int64_t>(
      std::ceil(1.5 * static_cast<double>(g.total_vertex_weight()) / threshold));
  return coarsen(g, order, std::max<std::int64_t>(cap, 2));
}

BisectTargets BisectTargets::equal(const WeightedGraph& g) {
  const double half = static_cast<double>(g.total_vertex_weight()) / 2.0;
  return {half, half};
}

PartitionVector fm_refine(const WeightedGraph& g, PartitionVector partition,
                          const BalanceLimits& limits, int max_passes) {
  if (partition.size() != g.num_vertices()) throw UsageError("partition size mismatch");
  State current = evaluate(g, partition, limits);
  for (int pass = 0; pass < max_passes; ++pass) {
    PartitionVector trial = partition;
    if (!fm_pass(g, trial, limits)) break;
    // The pass tracks the cut incrementally; confirm against a fresh count so
    // rounding drift can never make the result worse than the input.
    const State next = evaluate(g, trial, limits);
    if (!(next < current)) break;
    partition = std::move(trial);
    current = next;
  }
  return partition;
}

PartitionVector fm_refine(const WeightedGraph& g, PartitionVector partition,
                          const BisectTargets& targets, double imbalance, int max_passes) {
  return fm_refine(g, std::move(partition), BalanceLimits::from(targets, imbalance), max_passes);
}

PartitionVector initial_bisect(const WeightedGraph& g, const BalanceLimits& limits, int trials,
                               int max_passes, Rng& rng) {
  const auto weights = g.vertex_weights();
  if (!weights.empty()) {
    const auto heaviest = *std::max_element(weights.begin(), weights.end());
    if (static_cast<double>(heaviest) > std::max(limits.max0, limits.max1)) {
      throw UsageError("infeasible balance: a vertex of weight " + std::to_string(heaviest) +
                       " exceeds both side limits");
    }
  }
  PartitionVector best;
  State best_state{std::numeric_limits<double>::infinity(), 0.0};
  for (int trial = 0; trial < std::max(trials, 1); ++trial) {
    PartitionVector part;
    grow_from_seeds(g, part, limits, rng);
    part = fm_refine(g, std::move(part), limits, max_passes);
    const State state = evaluate(g, part, limits);
    if (best.empty() || state < best_state) {
      best = std::move(part);
      best_state = state;
    }
  }
  return best;
}

PartitionVector initial_bisect(const WeightedGraph& g, const BisectTargets& targets, int trials,
                               double imbalance, Rng& rng) {
  return initial_bisect(g, BalanceLimits::from(targets, imbalance), trials,
                        PartitionerOptions{}.max_passes, rng);
}

PartitionVector multilevel_bisect(const WeightedGraph& g, const BalanceLimits& limits,
                                  const PartitionerOptions& options, std::uint64_t seed) {
  if (g.num_vertices() < 2) return PartitionVector(g.num_vertices(), 0);
  Rng rng(seed);
  std::deque<CoarseningLevel> levels;
  const WeightedGraph* current = &g;
  while (current->num_vertices() > options.coarsen_threshold) {
    CoarseningLevel level = coarsen(*current, rng, options);
    if (static_cast<double>(level.graph.num_vertices()) >
        options.min_shrink * static_cast<double>(current->num_vertices())) {
      break;
    }
    levels.push_back(std::move(level));
    current = &levels.back().graph;
  }

  PartitionVector part =
      initial_bisect(*current, limits, options.initial_trials, options.max_passes, rng);
  part = fm_refine(*current, std::move(part), limits, options.max_passes);
  if (options.trace) {
    *options.trace << levels.size() << '\t' << current->num_vertices() << '\t'
                   << current->num_edges() << '\t' << cut_weight(*current, part) << '\n';
  }

  for (std::size_t i = levels.size(); i > 0; --i) {
    const WeightedGraph& fine = i == 1 ? g : levels[i - 2].graph;
    const auto& mapping = levels[i - 1].mapping;
    PartitionVector projected(fine.num_vertices());
    for (std::size_t v = 0; v < projected.size(); ++v) projected[v] = part[mapping[v]];
    part = fm_refine(fine, std::move(projected), limits, options.max_passes);
    if (options.trace) {
      *options.trace << (i - 1) << '\t' << fine.num_vertices() << '\t' << fine.num_edges()
                     << '\t' << cut_weight(fine, part) << '\n';
    }
  }
  return part;
}

PartitionVector multilevel_bisect(const WeightedGraph& g, const BisectTargets& targets,
                                  const PartitionerOptions& options, std::uint64_t seed) {
  return multilevel_bisect(g, BalanceLimits::from(targets, options.imbalance), options, seed);
}

PartitionVector partition(const WeightedGraph& g, std::size_t m,
                          const PartitionerOptions& options, std::uint64_t seed) {
  const std::size_t n = g.num_vertices();
  if (m == 0) throw UsageError("part count must be at least 1");
  if (m > n) {
    throw UsageError("cannot split " + std::to_string(n) + " vertices into " +
                     std::to_string(m) + " parts");
  }
  PartitionVector result(n, 0);
  if (m == 1) return result;

  const auto total = g.total_vertex_weight();
  const auto per_part = (total + static_cast<std::int64_t>(m) - 1) / static_cast<std::int64_t>(m);
  // Vertex weights are integral, so no part can use the fractional slack.
  const double cap = std::floor((1.0 + options.imbalance) * static_cast<double>(per_part));
  int next_id = 0;
  std::uint64_t call = 0;

  auto split = [&](auto&& self, std::vector<int> vertices, std::size_t parts) -> void {
    if (parts == 1) {
      for (int v : vertices) result[v] = next_id;
      ++next_id;
      return;
    }
    const Subgraph sub = induced_subgraph(g, vertices);
    const double w = static_cast<double>(sub.graph.total_vertex_weight());
    const std::size_t m0 = (parts + 1) / 2;
    const std::size_t m1 = parts - m0;
    const double t0 = w * static_cast<double>(m0) / static_cast<double>(parts);
    const double t1 = w - t0;
    // Integer weights cannot always land within (1 + eps) t, but ceil(t) is
    // reachable.
    auto side_limit = [&](std::size_t ms, double t) {
      return std::min(static_cast<double>(ms) * cap,
                      std::max((1.0 + options.imbalance) * t, std::ceil(t)));
    };
    BalanceLimits limits{side_limit(m0, t0), side_limit(m1, t1)};
    if (limits.max0 + limits.max1 < w) {
      limits = {(1.0 + options.imbalance) * t0, (1.0 + options.imbalance) * t1};
    }
    const PartitionVector halves =
        multilevel_bisect(sub.graph, limits, options, derive_seed(seed, call++));

    std::vector<int> side[2];
    for (std::size_t i = 0; i < vertices.size(); ++i) side[halves[i]].push_back(vertices[i]);
    // Each side must be able to host one vertex per part.
    const std::size_t need[2] = {m0, m1};
    for (int s = 0; s < 2; ++s) {
      auto& short_side = side[s];
      auto& long_side = side[1 - s];
      while (short_side.size() < need[s] && long_side.size() > need[1 - s]) {
        short_side.push_back(long_side.back());
        long_side.pop_back();
      }
      std::sort(short_side.begin(), short_side.end());
    }
    self(self, std::move(side[0]), m0);
    self(self, std::move(side[1]), m1);
  };

  std::vector<int> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<int>(i);
  split(split, std::move(all), m);
  return result;
}

std::size_t compute_m(std::size_t n) {
  const auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)) / 2.0));
  return std::min(std::max<std::size_t>(m, 2), n);
}

}  // namespace ch2pp
