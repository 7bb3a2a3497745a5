// Copyright 2026 The dsnmf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dsnmf/doc_term_matrix.hpp"

namespace dsnmf {

struct SingularSpectrum {
  std::vector<double> values;  // descending
  Index rows = 0;
  Index cols = 0;
};

struct SvdOptions {
  /// Matrices with min(rows, cols) at or below this use a dense SVD.
  Index dense_threshold = 64;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
  /// Ritz residual bound, relative to the largest singular value.
  double tolerance = 1e-12;
};

/// Leading singular triplets: A ~ U diag(S) V^T.
struct TruncatedSvd {
  Matrix U;
  Vector S;
  Matrix V;
};

/// The `count` largest singular triplets. Uses a dense decomposition for
/// small matrices, otherwise Golub-Kahan-Lanczos bidiagonalization with full
/// reorthogonalization and a seeded start vector; the Krylov dimension grows
/// until every requested triplet converges.
TruncatedSvd truncated_svd(const SparseMatrix& a, Index count, const SvdOptions& options = {});

SingularSpectrum singular_values(const SparseMatrix& a, Index count, const SvdOptions& options = {});

/// Descending values split into two normal populations with separate means
/// and a pooled variance (floor 1e-12); returns the size q of the leading
/// population maximizing the profile log-likelihood, q in [1, p-1].
std::size_t zg_elbow(std::span<const double> values);

/// Profile log-likelihood of the split after the first q values.
double zg_profile_log_likelihood(std::span<const double> values, std::size_t q);

struct ElbowEstimate {
  std::size_t first = 0;
  std::size_t second = 0;
  /// Set when fewer than two values remained after the first elbow.
  bool degenerate = false;
};

/// First elbow, then the elbow of the remaining tail, reported as an
/// absolute count of leading values.
ElbowEstimate second_elbow(std::span<const double> values);

/// Ranks [second - radius, second + radius] clipped to [lo, hi].
std::vector<Index> sweep_range(const ElbowEstimate& elbow, Index radius, Index lo, Index hi);

}  // namespace dsnmf
