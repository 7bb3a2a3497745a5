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


#include "dsnmf/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "dsnmf/error.hpp"
#include "dsnmf/rank.hpp"

namespace dsnmf {

std::string_view to_string(ScalingKind kind) {
  switch (kind) {
    case ScalingKind::Counts: return "none";
    case ScalingKind::RowScaling: return "rs";
    case ScalingKind::ColumnScaling: return "cs";
    case ScalingKind::NormalizedLaplacian: return "nl";
    case ScalingKind::Pwmi: return "pwmi";
  }
  return "?";
}

std::string_view display_name(ScalingKind kind) {
  switch (kind) {
    case ScalingKind::Counts: return "None";
    case ScalingKind::RowScaling: return "RS";
    case ScalingKind::ColumnScaling: return "CS";
    case ScalingKind::NormalizedLaplacian: return "NL";
    case ScalingKind::Pwmi: return "PWMI";
  }
  return "?";
}

ScalingKind parse_scaling(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "none" || lower == "counts") return ScalingKind::Counts;
  if (lower == "rs" || lower == "row") return ScalingKind::RowScaling;
  if (lower == "cs" || lower == "column") return ScalingKind::ColumnScaling;
  if (lower == "nl" || lower == "laplacian") return ScalingKind::NormalizedLaplacian;
  if (lower == "pwmi") return ScalingKind::Pwmi;
  throw UsageError("unknown scaling '" + std::string(name) + "' (expected none, rs, cs, nl or pwmi)");
}

ScaledMatrix apply_scaling(const DocTermMatrix& m, ScalingKind kind, ScalingOptions options) {
  Marginals sums = marginals(m.counts());
  const double factor = (kind == ScalingKind::Pwmi && options.pwmi_times_n) ? m.total_count() : 1.0;
  SparseMatrix scaled = m.counts();
  if (kind != ScalingKind::Counts) {
    for (Index i = 0; i < scaled.outerSize(); ++i) {
      for (SparseMatrix::InnerIterator it(scaled, i); it; ++it) {
        const double r = sums.rows[it.row()];
        const double c = sums.cols[it.col()];
        double& v = it.valueRef();
        switch (kind) {
          case ScalingKind::RowScaling: v = v / r; break;
          case ScalingKind::ColumnScaling: v = v / c; break;
          case ScalingKind::NormalizedLaplacian: v = v / std::sqrt(r * c); break;
          case ScalingKind::Pwmi: v = factor * (v / (r * c)); break;
          case ScalingKind::Counts: break;
        }
      }
    }
  }
  return {std::move(scaled), kind, std::move(sums.rows), std::move(sums.cols), factor};
}

Vector row_post_scalers(const ScaledMatrix& s) {
  switch (s.kind) {
    case ScalingKind::Counts:
    case ScalingKind::ColumnScaling: return Vector::Ones(s.row_marginals.size());
    case ScalingKind::RowScaling: return s.row_marginals;
    case ScalingKind::NormalizedLaplacian: return s.row_marginals.cwiseSqrt();
    case ScalingKind::Pwmi: return s.row_marginals / s.pwmi_factor;
  }
  throw UsageError("unknown scaling kind");
}

Vector col_post_scalers(const ScaledMatrix& s) {
  switch (s.kind) {
    case ScalingKind::Counts:
    case ScalingKind::RowScaling: return Vector::Ones(s.col_marginals.size());
    case ScalingKind::ColumnScaling:
    case ScalingKind::Pwmi: return s.col_marginals;
    case ScalingKind::NormalizedLaplacian: return s.col_marginals.cwiseSqrt();
  }
  throw UsageError("unknown scaling kind");
}

Factors post_scale(const Matrix& w_scaled, const Matrix& h_scaled, const ScaledMatrix& s) {
  if (w_scaled.rows() != s.row_marginals.size() || h_scaled.cols() != s.col_marginals.size() ||
      w_scaled.cols() != h_scaled.rows()) {
    throw UsageError("post_scale: factor shapes (" + std::to_string(w_scaled.rows()) + "x" +
                     std::to_string(w_scaled.cols()) + ", " + std::to_string(h_scaled.rows()) + "x" +
                     std::to_string(h_scaled.cols()) + ") do not match a " + std::to_string(s.row_marginals.size()) +
                     "x" + std::to_string(s.col_marginals.size()) + " scaled matrix");
  }
  return {row_post_scalers(s).asDiagonal() * w_scaled, h_scaled * col_post_scalers(s).asDiagonal()};
}

BipartiteMatrix bipartite_block(const DocTermMatrix& m) {
  const Index n = m.n_docs();
  const Index t = m.n_terms();
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(2 * m.nnz()));
  const SparseMatrix& c = m.counts();
  for (Index i = 0; i < c.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(c, i); it; ++it) {
      entries.emplace_back(it.row(), n + it.col(), it.value());
      entries.emplace_back(n + it.col(), it.row(), it.value());
    }
  }
  SparseMatrix a(n + t, n + t);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  return {std::move(a), n, t};
}

SpectralBoundReport nl_singular_bound_check(const ScaledMatrix& s) {
  if (s.kind != ScalingKind::NormalizedLaplacian) {
    throw UsageError("nl_singular_bound_check requires a normalized-Laplacian scaled matrix");
  }
  const Index full = std::min(s.matrix.rows(), s.matrix.cols());
  // Full spectra stay affordable up to a few hundred; beyond that only the
  // leading block is computed.
  const Index count = full <= 256 ? full : std::min<Index>(full, 64);
  SvdOptions options;
  options.dense_threshold = 256;
  const SingularSpectrum spectrum = singular_values(s.matrix, count, options);
  SpectralBoundReport report;
  report.sigma_max = spectrum.values.front();
  report.sigma_min = spectrum.values.back();
  report.within_unit = report.sigma_max <= 1.0 + 1e-8;
  report.full_spectrum = count == full;
  return report;
}

}  // namespace dsnmf
