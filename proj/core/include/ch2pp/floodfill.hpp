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

#include "ch2pp/graph.hpp"

namespace ch2pp {

/// Splits every part into the connected components of its induced subgraph
/// (breadth-first). New ids are dense and assigned in order of each
/// component's smallest vertex. Runs in O(n + edges).
PartitionVector split_disconnected(const WeightedGraph& g, std::span<const int> partition);

}  // namespace ch2pp
