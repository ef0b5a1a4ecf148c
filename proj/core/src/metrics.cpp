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

#include "ch2pp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ch2pp/error.hpp"

namespace ch2pp {
namespace {

void check_pair(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw UsageError("label vectors differ in length (" + std::to_string(truth.size()) + " vs " +
                     std::to_string(predicted.size()) + ")");
  }
  if (truth.empty()) throw UsageError("label vectors are empty");
}

// Maps labels onto 0..k-1 in ascending value order.
std::vector<int> compact(std::span<const int> labels, std::size_t& k) {
  std::vector<int> values(labels.begin(), labels.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  k = values.size();
  std::vector<int> out;
  out.reserve(labels.size());
  for (int label : labels) {
    out.push_back(static_cast<int>(std::lower_bound(values.begin(), values.end(), label) -
                                   values.begin()));
  }
  return out;
}

double entropy(std::span<const std::int64_t> counts, double n) {
  double h = 0.0;
  for (auto c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw UsageError("label vectors differ in length");
  std::size_t kx = 0;
  std::size_t ky = 0;
  const auto x = compact(truth, kx);
  const auto y = compact(predicted, ky);
  ConfusionMatrix m;
  m.size = std::max(kx, ky);
  m.counts.assign(m.size * m.size, 0);
  for (std::size_t i = 0; i < x.size(); ++i) ++m.counts[x[i] * m.size + y[i]];
  return m;
}

std::vector<int> hungarian_maximize(std::span<const double> weights, std::size_t rows,
                                    std::size_t cols) {
  if (rows != cols) throw UsageError("assignment matrix must be square");
  if (weights.size() != rows * cols) throw UsageError("assignment matrix has wrong size");
  const std::size_t k = rows;
  if (k == 0) return {};
  const double top = *std::max_element(weights.begin(), weights.end());
  auto cost = [&](std::size_t i, std::size_t j) { return top - weights[i * k + j]; };

  // 1-based potentials formulation; p[j] is the row matched to column j.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0);
  std::vector<double> v(k + 1, 0.0);
  std::vector<std::size_t> p(k + 1, 0);
  std::vector<std::size_t> way(k + 1, 0);
  for (std::size_t i = 1; i <= k; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(k + 1, kInf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(k, -1);
  for (std::size_t j = 1; j <= k; ++j) assignment[p[j] - 1] = static_cast<int>(j - 1);
  return assignment;
}

double nmi(std::span<const int> truth, std::span<const int> predicted) {
  check_pair(truth, predicted);
  const ConfusionMatrix m = confusion(truth, predicted);
  const double n = static_cast<double>(truth.size());
  std::vector<std::int64_t> rows(m.size, 0);
  std::vector<std::int64_t> cols(m.size, 0);
  for (std::size_t a = 0; a < m.size; ++a) {
    for (std::size_t b = 0; b < m.size; ++b) {
      rows[a] += m.at(a, b);
      cols[b] += m.at(a, b);
    }
  }
  const double hx = entropy(rows, n);
  const double hy = entropy(cols, n);
  if (hx == 0.0 && hy == 0.0) return 1.0;
  if (hx == 0.0 || hy == 0.0) return 0.0;
  double mi = 0.0;
  for (std::size_t a = 0; a < m.size; ++a) {
    for (std::size_t b = 0; b < m.size; ++b) {
      const auto c = m.at(a, b);
      if (c == 0) continue;
      const double pab = static_cast<double>(c) / n;
      mi += pab * std::log(static_cast<double>(c) * n /
                           (static_cast<double>(rows[a]) * static_cast<double>(cols[b])));
    }
  }
  return std::clamp(2.0 * mi / (hx + hy), 0.0, 1.0);
}

double acc(std::span<const int> truth, std::span<const int> predicted) {
  check_pair(truth, predicted);
  const ConfusionMatrix m = confusion(truth, predicted);
  std::vector<double> weights(m.counts.begin(), m.counts.end());
  const auto assignment = hungarian_maximize(weights, m.size, m.size);
  std::int64_t matched = 0;
  for (std::size_t a = 0; a < m.size; ++a) matched += m.at(a, static_cast<std::size_t>(assignment[a]));
  return static_cast<double>(matched) / static_cast<double>(truth.size());
}

Metric parse_metric(std::string_view text) {
  if (text == "nmi") return Metric::kNmi;
  if (text == "acc") return Metric::kAcc;
  throw UsageError("unknown metric '" + std::string(text) + "' (nmi|acc)");
}

std::string_view to_string(Metric metric) { return metric == Metric::kNmi ? "nmi" : "acc"; }

double evaluate(Metric metric, std::span<const int> truth, std::span<const int> predicted) {
  return metric == Metric::kNmi ? nmi(truth, predicted) : acc(truth, predicted);
}

}  // namespace ch2pp
