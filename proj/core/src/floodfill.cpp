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

#include "ch2pp/floodfill.hpp"

#include <deque>

#include "ch2pp/error.hpp"

namespace ch2pp {

PartitionVector split_disconnected(const WeightedGraph& g, std::span<const int> partition) {
  const std::size_t n = g.num_vertices();
  if (partition.size() != n) throw UsageError("partition size does not match graph");
  PartitionVector out(n, -1);
  int next = 0;
  std::deque<int> queue;
  for (std::size_t start = 0; start < n; ++start) {
    if (out[start] >= 0) continue;
    const int part = partition[start];
    const int id = next++;
    out[start] = id;
    queue.push_back(static_cast<int>(start));
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int u : g.neighbors(v)) {
        if (out[u] < 0 && partition[u] == part) {
          out[u] = id;
          queue.push_back(u);
        }
      }
    }
  }
  return out;
}

}  // namespace ch2pp
