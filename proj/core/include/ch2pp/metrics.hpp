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
#include <span>
#include <string_view>
#include <vector>

namespace ch2pp {

/// Square contingency table: rows are true classes, columns predicted
/// clusters, both in ascending label order and zero-padded to
/// max(#classes, #clusters).
struct ConfusionMatrix {
  std::size_t size = 0;
  std::vector<std::int64_t> counts;  // row-major size x size

  std::int64_t at(std::size_t row, std::size_t col) const { return counts[row * size + col]; }
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted);

/// Assignment maximizing sum_i weights[i][perm[i]] over a square row-major
/// matrix (Kuhn-Munkres with potentials, O(k^3)). Throws UsageError unless
/// rows == cols.
std::vector<int> hungarian_maximize(std::span<const double> weights, std::size_t rows,
                                    std::size_t cols);

/// 2 I(X;Y) / (H(X) + H(Y)). Both entropies zero gives 1, exactly one gives 0.
double nmi(std::span<const int> truth, std::span<const int> predicted);

/// Fraction of points whose predicted cluster maps onto their class under
/// the optimal one-to-one cluster -> class mapping.
double acc(std::span<const int> truth, std::span<const int> predicted);

enum class Metric { kNmi, kAcc };

Metric parse_metric(std::string_view text);
std::string_view to_string(Metric metric);
double evaluate(Metric metric, std::span<const int> truth, std::span<const int> predicted);

}  // namespace ch2pp
