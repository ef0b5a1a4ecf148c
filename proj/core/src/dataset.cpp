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

#include "ch2pp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "ch2pp/error.hpp"

namespace ch2pp {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

PointSet::PointSet(std::size_t n, std::size_t d, std::vector<double> values)
    : n_(n), d_(d), values_(std::move(values)) {
  if (n_ == 0 || d_ == 0) throw DataError("point set must have n >= 1 and d >= 1");
  if (values_.size() != n_ * d_) {
    throw DataError("point set holds " + std::to_string(values_.size()) +
                    " values, expected " + std::to_string(n_ * d_));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("non-finite value at row " + std::to_string(i / d_ + 1) + ", column " +
                      std::to_string(i % d_ + 1));
    }
  }
}

LabelColumn LabelColumn::parse(std::string_view text) {
  text = trim(text);
  if (text == "last") return last_column();
  std::size_t index = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), index);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError("label column must be 'last' or a zero-based index, got '" +
                     std::string(text) + "'");
  }
  return at(index);
}

std::string LabelColumn::to_string() const { return last ? "last" : std::to_string(index); }

Dataset parse_csv(std::istream& in, std::optional<LabelColumn> label_column) {
  std::vector<std::string> lines;
  std::vector<std::size_t> line_numbers;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (trim(line).empty()) continue;
    lines.push_back(line);
    line_numbers.push_back(number);
  }
  if (lines.empty()) throw DataError("empty input: no data rows");

  const std::size_t columns = split_cells(lines.front()).size();
  std::optional<std::size_t> label_index;
  if (label_column) {
    label_index = label_column->last ? columns - 1 : label_column->index;
    if (*label_index >= columns) {
      throw UsageError("label column " + std::to_string(*label_index) + " out of range (" +
                       std::to_string(columns) + " columns)");
    }
  }
  const std::size_t d = columns - (label_index ? 1 : 0);
  if (d == 0) throw DataError("no feature columns left after removing the label column");

  Dataset dataset;
  std::size_t first_data = 0;
  if (lines.size() > 1) {
    const auto cells = split_cells(lines.front());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (label_index && c == *label_index) continue;
      if (!parse_number(cells[c])) {
        dataset.has_header = true;
        first_data = 1;
        break;
      }
    }
  }

  std::vector<double> values;
  values.reserve((lines.size() - first_data) * d);
  LabelVector labels;
  std::unordered_map<std::string, int> label_ids;
  for (std::size_t r = first_data; r < lines.size(); ++r) {
    const auto cells = split_cells(lines[r]);
    const std::string row = std::to_string(line_numbers[r]);
    if (cells.size() != columns) {
      throw DataError("ragged row " + row + ": " + std::to_string(cells.size()) +
                      " columns, expected " + std::to_string(columns));
    }
    for (std::size_t c = 0; c < columns; ++c) {
      if (label_index && c == *label_index) {
        std::string key(cells[c]);
        auto [it, inserted] = label_ids.try_emplace(key, static_cast<int>(label_ids.size()));
        if (inserted) dataset.class_names.push_back(key);
        labels.push_back(it->second);
        continue;
      }
      const auto value = parse_number(cells[c]);
      if (!value) {
        throw DataError("non-numeric feature at row " + row + ", column " +
                        std::to_string(c + 1) + ": '" + std::string(cells[c]) + "'");
      }
      if (!std::isfinite(*value)) {
        throw DataError("non-finite feature at row " + row + ", column " + std::to_string(c + 1));
      }
      values.push_back(*value);
    }
  }
  const std::size_t n = lines.size() - first_data;
  dataset.points = PointSet(n, d, std::move(values));
  if (label_index) dataset.labels = std::move(labels);
  return dataset;
}

Dataset load_csv(const std::filesystem::path& path, std::optional<LabelColumn> label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return parse_csv(in, label_column);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_csv(std::ostream& out, const PointSet& points, const LabelVector* labels) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto row = points[i];
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << format_double(row[j]);
    }
    if (labels) out << ',' << (*labels)[i];
    out << '\n';
  }
}

Normalization parse_normalization(std::string_view text) {
  if (text == "none") return Normalization::kNone;
  if (text == "minmax") return Normalization::kMinMax;
  if (text == "zscore") return Normalization::kZScore;
  throw UsageError("unknown normalization '" + std::string(text) + "' (none|minmax|zscore)");
}

std::string_view to_string(Normalization mode) {
  switch (mode) {
    case Normalization::kNone: return "none";
    case Normalization::kMinMax: return "minmax";
    case Normalization::kZScore: return "zscore";
  }
  return "none";
}

PointSet normalize(const PointSet& points, Normalization mode) {
  if (mode == Normalization::kNone) return points;
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  std::vector<double> out = points.values();
  for (std::size_t j = 0; j < d; ++j) {
    if (mode == Normalization::kMinMax) {
      double lo = out[j];
      double hi = out[j];
      for (std::size_t i = 0; i < n; ++i) {
        lo = std::min(lo, out[i * d + j]);
        hi = std::max(hi, out[i * d + j]);
      }
      const double range = hi - lo;
      for (std::size_t i = 0; i < n; ++i) {
        double& v = out[i * d + j];
        v = range > 0.0 ? std::clamp((v - lo) / range, 0.0, 1.0) : 0.0;
      }
    } else {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += out[i * d + j];
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double diff = out[i * d + j] - mean;
        var += diff * diff;
      }
      const double stdev = std::sqrt(var / static_cast<double>(n));
      for (std::size_t i = 0; i < n; ++i) {
        double& v = out[i * d + j];
        v = stdev > 0.0 ? (v - mean) / stdev : 0.0;
      }
    }
  }
  return PointSet(n, d, std::move(out));
}

LabelVector canonicalize_labels(std::span<const int> labels) {
  std::unordered_map<int, int> ids;
  LabelVector out;
  out.reserve(labels.size());
  for (int label : labels) {
    auto [it, inserted] = ids.try_emplace(label, static_cast<int>(ids.size()));
    out.push_back(it->second);
  }
  return out;
}

void write_labels(std::ostream& out, std::span<const int> labels) {
  for (int label : labels) out << label << '\n';
}

void write_labels(const std::filesystem::path& path, std::span<const int> labels) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_labels(out, labels);
}

LabelVector read_labels(std::istream& in) {
  LabelVector labels;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const auto cell = trim(line);
    if (cell.empty()) continue;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || value < 0) {
      throw DataError("label file line " + std::to_string(number) +
                      ": expected a non-negative integer, got '" + std::string(cell) + "'");
    }
    labels.push_back(value);
  }
  if (labels.empty()) throw DataError("label file is empty");
  return labels;
}

LabelVector read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return read_labels(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace ch2pp
