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

#include "ch2pp/blobs.hpp"

#include <string>
#include <vector>

#include "ch2pp/error.hpp"
#include "ch2pp/random.hpp"

namespace ch2pp {

Dataset make_blobs(const BlobSpec& spec) {
  if (spec.points == 0 || spec.dim == 0 || spec.centers == 0) {
    throw UsageError("blob spec needs points, dim and centers >= 1");
  }
  Rng rng(spec.seed);
  std::vector<double> centers(spec.centers * spec.dim);
  for (double& c : centers) c = (2.0 * rng.uniform() - 1.0) * spec.box;

  std::vector<double> values(spec.points * spec.dim);
  LabelVector labels(spec.points);
  for (std::size_t i = 0; i < spec.points; ++i) {
    const std::size_t blob = i % spec.centers;
    labels[i] = static_cast<int>(blob);
    for (std::size_t j = 0; j < spec.dim; ++j) {
      values[i * spec.dim + j] = centers[blob * spec.dim + j] + spec.spread * rng.normal();
    }
  }
  Dataset out;
  out.points = PointSet(spec.points, spec.dim, std::move(values));
  out.labels = std::move(labels);
  for (std::size_t b = 0; b < spec.centers; ++b) out.class_names.push_back(std::to_string(b));
  return out;
}

}  // namespace ch2pp
