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

#include "ch2pp/dataset.hpp"

namespace ch2pp {

struct BlobSpec {
  std::size_t points = 1000;
  std::size_t dim = 8;
  std::size_t centers = 10;
  /// Centers are drawn uniformly from [-box, box]^dim.
  double box = 10.0;
  /// Per-coordinate standard deviation around each center.
  double spread = 1.0;
  std::uint64_t seed = 0;
};

/// Isotropic Gaussian blobs; point i belongs to blob i % centers. Labels are
/// the blob ids. Identical for identical specs on every platform.
Dataset make_blobs(const BlobSpec& spec);

}  // namespace ch2pp
