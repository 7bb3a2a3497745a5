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

#include <array>
#include <string>
#include <string_view>

#include "dsnmf/doc_term_matrix.hpp"

namespace dsnmf {

enum class ScalingKind { Counts, RowScaling, ColumnScaling, NormalizedLaplacian, Pwmi };

inline constexpr std::array<ScalingKind, 5> kAllScalings = {
    ScalingKind::Counts, ScalingKind::RowScaling, ScalingKind::ColumnScaling, ScalingKind::NormalizedLaplacian,
    ScalingKind::Pwmi};

/// Short identifier used on the command line and in reports: none, rs, cs, nl, pwmi.
std::string_view to_string(ScalingKind kind);
/// Display label: None, RS, CS, NL, PWMI.
std::string_view display_name(ScalingKind kind);
ScalingKind parse_scaling(std::string_view name);

struct ScalingOptions {
  /// Multiply the PWMI matrix by the grand total so entries are ratios of
  /// maximum-likelihood probabilities.
  bool pwmi_times_n = false;
};

/// A document-term matrix after one diagonal scaling, with the marginals of
/// the original counts kept for post-scaling.
struct ScaledMatrix {
  SparseMatrix matrix;
  ScalingKind kind = ScalingKind::Counts;
  Vector row_marginals;
  Vector col_marginals;
  /// Constant folded into the PWMI matrix (total count or 1).
  double pwmi_factor = 1.0;
};

ScaledMatrix apply_scaling(const DocTermMatrix& m, ScalingKind kind, ScalingOptions options = {});

/// Per-row and per-column multipliers that undo the pre-scaling of `s`.
Vector row_post_scalers(const ScaledMatrix& s);
Vector col_post_scalers(const ScaledMatrix& s);

struct Factors {
  Matrix W;
  Matrix H;
};

/// W = diag(row scalers) * W~, H = H~ * diag(col scalers).
Factors post_scale(const Matrix& w_scaled, const Matrix& h_scaled, const ScaledMatrix& s);

/// Adjacency of the weighted document-term bipartite graph,
/// [[0, M], [M^T, 0]], with documents first.
struct BipartiteMatrix {
  SparseMatrix adjacency;
  Index n_docs = 0;
  Index n_terms = 0;
};

BipartiteMatrix bipartite_block(const DocTermMatrix& m);

struct SpectralBoundReport {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  bool within_unit = false;
  /// False when only the leading part of the spectrum was computed, in which
  /// case sigma_min is the smallest computed value.
  bool full_spectrum = false;
};

/// Extreme singular values of a normalized-Laplacian scaled matrix, with
/// within_unit = sigma_max <= 1 + 1e-8.
SpectralBoundReport nl_singular_bound_check(const ScaledMatrix& s);

}  // namespace dsnmf
