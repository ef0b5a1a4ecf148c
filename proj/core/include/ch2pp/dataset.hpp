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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ch2pp {

/// Dense n x d matrix of finite reals, row-major. Every construction path
/// rejects NaN/Inf and empty shapes.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t n, std::size_t d, std::vector<double> values);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  bool empty() const { return n_ == 0; }

  std::span<const double> operator[](std::size_t i) const {
    return {values_.data() + i * d_, d_};
  }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
};

/// Per-point integer class or cluster ids.
using LabelVector = std::vector<int>;

/// Which CSV column holds ground-truth labels. Indices are zero-based.
struct LabelColumn {
  bool last = true;
  std::size_t index = 0;

  static LabelColumn last_column() { return {}; }
  static LabelColumn at(std::size_t i) { return {false, i}; }
  /// Accepts "last" or a non-negative integer.
  static LabelColumn parse(std::string_view text);
  std::string to_string() const;
};

struct Dataset {
  PointSet points;
  std::optional<LabelVector> labels;
  /// Original label spellings, indexed by canonical id.
  std::vector<std::string> class_names;
  bool has_header = false;
};

/// Parses comma-separated numeric rows. The first row is treated as a header
/// when it contains a non-numeric feature cell and at least one more row
/// follows. Label cells are arbitrary strings mapped to 0..K-1 by first
/// occurrence. Throws DataError naming the 1-based row and column on bad input.
Dataset parse_csv(std::istream& in, std::optional<LabelColumn> label_column);
Dataset load_csv(const std::filesystem::path& path, std::optional<LabelColumn> label_column);

/// Writes shortest round-trip decimal representations; optional trailing
/// label column.
void write_csv(std::ostream& out, const PointSet& points, const LabelVector* labels = nullptr);

enum class Normalization { kNone, kMinMax, kZScore };

Normalization parse_normalization(std::string_view text);
std::string_view to_string(Normalization mode);

/// Per-column scaling. Constant columns map to 0 under both minmax and zscore.
PointSet normalize(const PointSet& points, Normalization mode);

/// Relabels by first occurrence: the first distinct value becomes 0, etc.
LabelVector canonicalize_labels(std::span<const int> labels);

/// One integer per line; line i holds the label of point i.
void write_labels(std::ostream& out, std::span<const int> labels);
void write_labels(const std::filesystem::path& path, std::span<const int> labels);
LabelVector read_labels(std::istream& in);
LabelVector read_labels(const std::filesystem::path& path);

}  // namespace ch2pp
