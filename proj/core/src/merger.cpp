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

#include "ch2pp/merger.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>

#include "ch2pp/error.hpp"
#include "ch2pp/random.hpp"

namespace ch2pp {
namespace {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::uint64_t members_seed(std::uint64_t seed, std::span<const int> members) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int v : members) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 0x100000001b3ULL;
  }
  return derive_seed(seed, h);
}

// A crossing edge tagged with the cluster on its far side. Sums over crossing
// edges run in (other, lo, hi) order so they do not depend on which side is
// scanned.
struct Crossing {
  int other;
  int lo;
  int hi;
  double weight;
  bool operator<(const Crossing& o) const {
    return std::tie(other, lo, hi) < std::tie(o.other, o.lo, o.hi);
  }
};

struct Candidate {
  double score;
  int first;
  int second;
};

// Max-heap order: higher score first, then the lexicographically lower pair.
struct CandidateOrder {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.score != b.score) return a.score < b.score;
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  }
};

}  // namespace

InternalStats internal_stats(const WeightedGraph& g, std::span<const int> members,
                             const MergeParams& params, double fallback_weight) {
  const Subgraph sub = induced_subgraph(g, members);
  if (members.size() >= params.min_bisect_size) {
    const auto halves = multilevel_bisect(sub.graph, BisectTargets::equal(sub.graph),
                                          params.bisect, members_seed(params.seed, members));
    double ic = 0.0;
    std::size_t count = 0;
    for (const Edge& e : sub.graph.edges()) {
      if (halves[e.u] != halves[e.v]) {
        ic += e.weight;
        ++count;
      }
    }
    if (count > 0) return {ic, ic / static_cast<double>(count), false};
  }
  const auto edges = sub.graph.edges();
  if (edges.empty()) return {fallback_weight, fallback_weight, true};
  double sum = 0.0;
  for (const Edge& e : edges) sum += e.weight;
  const double mean = sum / static_cast<double>(edges.size());
  return {mean, mean, true};
}

InternalStats internal_stats(const WeightedGraph& g, std::span<const int> members,
                             const MergeParams& params) {
  const double w = g.min_edge_weight();
  return internal_stats(g, members, params, w > 0.0 ? w : 1.0);
}

PairStats pair_stats(const WeightedGraph& g, std::span<const int> ci, std::span<const int> cj) {
  std::vector<char> in_j(g.num_vertices(), 0);
  for (int v : cj) in_j[v] = 1;
  std::vector<Crossing> crossings;
  for (int u : ci) {
    const auto nbrs = g.neighbors(u);
    const auto ws = g.weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (in_j[nbrs[i]]) crossings.push_back({0, std::min(u, nbrs[i]), std::max(u, nbrs[i]), ws[i]});
    }
  }
  std::sort(crossings.begin(), crossings.end());
  PairStats ps;
  for (const Crossing& c : crossings) {
    ps.ec += c.weight;
    ++ps.edge_count;
  }
  return ps;
}

double similarity(const ClusterSummary& si, const ClusterSummary& sj, const PairStats& ps,
                  const MergeParams& params) {
  if (ps.edge_count == 0) return 0.0;
  const double r_ic = ps.ec / ((si.ic + sj.ic) / 2.0);
  const double total = static_cast<double>(si.size + sj.size);
  const double internal_closeness = (static_cast<double>(si.size) / total) * si.icl +
                                    (static_cast<double>(sj.size) / total) * sj.icl;
  const double r_cl = ps.cl() / internal_closeness;
  double score = std::pow(r_cl, params.alpha) * std::pow(r_ic, params.beta);
  if (si.tiny || sj.tiny) score *= params.m_fact;
  return score;
}

Dendrogram merge_all(const WeightedGraph& g, std::span<const int> partition,
                     const MergeParams& params, const std::optional<MergeEvaluation>& evaluation,
                     const PointSet* points) {
  const std::size_t n = g.num_vertices();
  if (n == 0 || partition.empty()) throw UsageError("cannot merge an empty partition");
  if (partition.size() != n) throw UsageError("partition size does not match graph");
  if (evaluation && evaluation->truth.size() != n) {
    throw UsageError("ground truth length does not match graph");
  }
  if (points && points->size() != n) throw UsageError("point count does not match graph");

  const std::size_t parts = part_count(partition);
  std::vector<std::vector<int>> members(parts);
  for (std::size_t v = 0; v < n; ++v) {
    if (partition[v] < 0) throw UsageError("negative part id");
    members[partition[v]].push_back(static_cast<int>(v));
  }
  for (const auto& m : members) {
    if (m.empty()) throw UsageError("partition ids are not dense");
  }

  Dendrogram dendrogram;
  dendrogram.initial.assign(partition.begin(), partition.end());
  dendrogram.initial_parts = parts;

  const double min_weight = g.min_edge_weight();
  const double fallback_weight = min_weight > 0.0 ? min_weight : 1.0;
  const std::size_t capacity = 2 * parts;
  members.reserve(capacity);
  std::vector<ClusterSummary> summary;
  summary.reserve(capacity);
  std::vector<char> alive(parts, 1);
  std::vector<int> cluster_of(partition.begin(), partition.end());

  auto summarize = [&](std::span<const int> m) {
    const InternalStats s = internal_stats(g, m, params, fallback_weight);
    return ClusterSummary{m.size(), s.ic, s.icl, s.tiny};
  };
  for (const auto& m : members) summary.push_back(summarize(m));

  std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> heap;

  // Pairs cluster c with every lower-id cluster it shares an edge with.
  std::vector<Crossing> crossings;
  auto push_pairs_of = [&](int c) {
    crossings.clear();
    for (int u : members[c]) {
      const auto nbrs = g.neighbors(u);
      const auto ws = g.weights(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const int other = cluster_of[nbrs[i]];
        if (other >= c) continue;
        crossings.push_back({other, std::min(u, nbrs[i]), std::max(u, nbrs[i]), ws[i]});
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t i = 0; i < crossings.size();) {
      const int other = crossings[i].other;
      PairStats ps;
      for (; i < crossings.size() && crossings[i].other == other; ++i) {
        ps.ec += crossings[i].weight;
        ++ps.edge_count;
      }
      heap.push({similarity(summary[other], summary[c], ps, params), other, c});
    }
  };
  for (int c = 0; c < static_cast<int>(parts); ++c) push_pairs_of(c);

  std::vector<std::vector<double>> centroid_sum;
  if (points) {
    centroid_sum.assign(parts, std::vector<double>(points->dim(), 0.0));
    for (std::size_t v = 0; v < n; ++v) {
      const auto row = (*points)[v];
      auto& sum = centroid_sum[partition[v]];
      for (std::size_t j = 0; j < row.size(); ++j) sum[j] += row[j];
    }
    centroid_sum.reserve(capacity);
  }

  std::vector<int> current_labels(partition.begin(), partition.end());
  auto record_metric = [&] {
    if (!evaluation) return;
    dendrogram.metric_by_step.push_back(
        evaluate(evaluation->metric, evaluation->truth, current_labels));
  };
  if (evaluation) dendrogram.metric = evaluation->metric;
  record_metric();

  std::size_t live = parts;
  while (live > 1) {
    Candidate chosen{0.0, -1, -1};
    bool fallback = false;
    while (!heap.empty()) {
      const Candidate top = heap.top();
      heap.pop();
      if (alive[top.first] && alive[top.second]) {
        chosen = top;
        break;
      }
    }
    if (chosen.first < 0) {
      // No live pair shares an edge: join the closest centroids.
      fallback = true;
      double best = std::numeric_limits<double>::infinity();
      for (int a = 0; a < static_cast<int>(alive.size()); ++a) {
        if (!alive[a]) continue;
        for (int b = a + 1; b < static_cast<int>(alive.size()); ++b) {
          if (!alive[b]) continue;
          double dist = 0.0;
          if (points) {
            const auto& sa = centroid_sum[a];
            const auto& sb = centroid_sum[b];
            const double na = static_cast<double>(members[a].size());
            const double nb = static_cast<double>(members[b].size());
            for (std::size_t j = 0; j < sa.size(); ++j) {
              const double diff = sa[j] / na - sb[j] / nb;
              dist += diff * diff;
            }
          }
          if (dist < best) {
            best = dist;
            chosen = {0.0, a, b};
          }
        }
      }
    }

    const int a = chosen.first;
    const int b = chosen.second;
    const int c = static_cast<int>(members.size());
    std::vector<int> merged;
    merged.reserve(members[a].size() + members[b].size());
    std::merge(members[a].begin(), members[a].end(), members[b].begin(), members[b].end(),
               std::back_inserter(merged));
    for (int v : merged) {
      cluster_of[v] = c;
      current_labels[v] = c;
    }
    members.push_back(std::move(merged));
    alive[a] = 0;
    alive[b] = 0;
    alive.push_back(1);
    if (points) {
      std::vector<double> sum = centroid_sum[a];
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += centroid_sum[b][j];
      centroid_sum.push_back(std::move(sum));
    }
    summary.push_back(summarize(members[c]));
    --live;

    dendrogram.merges.push_back({dendrogram.merges.size() + 1, a, b, chosen.score, c, live,
                                 fallback});
    push_pairs_of(c);
    record_metric();

    if (params.verify) {
      std::vector<int> seen(n, 0);
      std::size_t live_count = 0;
      for (std::size_t id = 0; id < members.size(); ++id) {
        if (!alive[id]) continue;
        ++live_count;
        for (int v : members[id]) {
          if (seen[v]++ || cluster_of[v] != static_cast<int>(id)) {
            throw InvariantError("cluster membership is inconsistent after merge " +
                                 std::to_string(dendrogram.merges.size()));
          }
        }
      }
      if (live_count != live || std::count(seen.begin(), seen.end(), 1) != static_cast<long>(n)) {
        throw InvariantError("live clusters no longer partition the vertex set");
      }
    }
  }

  if (!dendrogram.metric_by_step.empty()) {
    const auto best = std::max_element(dendrogram.metric_by_step.begin(),
                                       dendrogram.metric_by_step.end());
    dendrogram.best_step = static_cast<std::size_t>(best - dendrogram.metric_by_step.begin());
  }
  return dendrogram;
}

LabelVector Dendrogram::labels_after(std::size_t steps) const {
  if (steps > merges.size()) {
    throw UsageError("requested " + std::to_string(steps) + " merges but only " +
                     std::to_string(merges.size()) + " were recorded");
  }
  std::vector<int> parent(initial_parts + merges.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  for (std::size_t s = 0; s < steps; ++s) {
    parent[merges[s].first] = merges[s].merged;
    parent[merges[s].second] = merges[s].merged;
  }
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  LabelVector raw(initial.size());
  for (std::size_t v = 0; v < initial.size(); ++v) raw[v] = find(initial[v]);
  return canonicalize_labels(raw);
}

void Dendrogram::write_tsv(std::ostream& out) const {
  for (const auto& rec : merges) {
    out << rec.step << '\t' << rec.first << '\t' << rec.second << '\t'
        << format_double(rec.score);
    if (rec.step < metric_by_step.size()) out << '\t' << format_double(metric_by_step[rec.step]);
    out << '\n';
  }
}

std::string Dendrogram::summary_json() const {
  std::ostringstream out;
  out << "{\"initial_parts\":" << initial_parts << ",\"merges\":" << merges.size()
      << ",\"best_step\":";
  if (best_step) {
    out << *best_step << ",\"best_metric\":" << format_double(metric_by_step[*best_step]);
  } else {
    out << "null,\"best_metric\":null";
  }
  out << ",\"metric\":";
  if (metric) {
    out << '"' << to_string(*metric) << '"';
  } else {
    out << "null";
  }
  out << '}';
  return out.str();
}

LabelVector cut(const Dendrogram& dendrogram, std::size_t clusters) {
  if (clusters < 1 || clusters > dendrogram.initial_parts) {
    throw UsageError("cluster count " + std::to_string(clusters) + " outside [1, " +
                     std::to_string(dendrogram.initial_parts) + "]");
  }
  return dendrogram.labels_after(dendrogram.initial_parts - clusters);
}

}  // namespace ch2pp
