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

#include <benchmark/benchmark.h>

#include <map>

#include "ch2pp/ann.hpp"
#include "ch2pp/blobs.hpp"
#include "ch2pp/floodfill.hpp"
#include "ch2pp/merger.hpp"
#include "ch2pp/partitioner.hpp"

namespace {

using namespace ch2pp;

constexpr std::size_t kDim = 8;
constexpr std::size_t kCenters = 10;

const Dataset& blobs(std::size_t n) {
  static std::map<std::size_t, Dataset> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_blobs({n, kDim, kCenters, 10, 1, n})).first;
  return it->second;
}

std::size_t default_k(std::size_t n) { return compute_k(n, 2, LogBase::kTwo); }

void BM_ForestBuild(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t k = default_k(n);
  const PointSet& points = blobs(n).points;
  for (auto _ : state) benchmark::DoNotOptimize(RPForest::build(points, k, k, 1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ForestBuild)->RangeMultiplier(2)->Range(2000, 16000)->Unit(benchmark::kMillisecond);

void BM_ForestQuery(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t k = default_k(n);
  const PointSet& points = blobs(n).points;
  const RPForest forest = RPForest::build(points, k, k, 1);
  QueryScratch scratch;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forest.query(points[i], k + 1, k * k, scratch));
    i = (i + 1) % n;
  }
}
BENCHMARK(BM_ForestQuery)->RangeMultiplier(2)->Range(2000, 16000);

void BM_KnnGraph(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t k = default_k(n);
  const PointSet& points = blobs(n).points;
  for (auto _ : state) benchmark::DoNotOptimize(build_knn_graph(points, k, {k, k, k * k, 1, 1}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KnnGraph)->RangeMultiplier(2)->Range(2000, 16000)->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oNLogN);

void BM_Partition(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t k = default_k(n);
  const WeightedGraph g = build_knn_graph(blobs(n).points, k, {k, k, k * k, 1, 1});
  const std::size_t m = compute_m(n);
  for (auto _ : state) benchmark::DoNotOptimize(partition(g, m, {}, 1));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Partition)->RangeMultiplier(2)->Range(2000, 16000)->Unit(benchmark::kMillisecond);

void BM_MergeAll(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t k = default_k(n);
  const Dataset& data = blobs(n);
  const WeightedGraph g = build_knn_graph(data.points, k, {k, k, k * k, 1, 1});
  const PartitionVector parts = split_disconnected(g, partition(g, compute_m(n), {}, 1));
  for (auto _ : state) benchmark::DoNotOptimize(merge_all(g, parts, {}, std::nullopt, &data.points));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MergeAll)->RangeMultiplier(2)->Range(2000, 16000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
