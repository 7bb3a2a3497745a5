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
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "dsnmf/doc_term_matrix.hpp"
#include "dsnmf/scaling.hpp"

namespace dsnmf {

/// Member of the beta-divergence family. beta = 2 is the squared Frobenius
/// loss, 1 generalized Kullback-Leibler, 0 Itakura-Saito.
struct BetaLoss {
  double beta = 2.0;

  static constexpr BetaLoss frobenius() { return {2.0}; }
  static constexpr BetaLoss kullback_leibler() { return {1.0}; }
  static constexpr BetaLoss itakura_saito() { return {0.0}; }

  bool operator==(const BetaLoss&) const = default;
};

/// "frobenius" | "kl" | "is" or a numeric beta.
BetaLoss parse_loss(std::string_view name);
std::string to_string(BetaLoss loss);

/// Per-entry loss: (x-y)^2 for beta 2, x log(x/y) - x + y for beta 1,
/// x/y - log(x/y) - 1 for beta 0, the general beta-divergence otherwise.
double component_loss(double x, double y, BetaLoss loss);

/// The Kullback-Leibler summand x log(x/y) on its own, without the linear
/// terms that make the sum a divergence.
double kl_summand(double x, double y);

enum class InitMethod { SeededRandom, Nndsvda };

InitMethod parse_init(std::string_view name);
std::string_view to_string(InitMethod init);

struct NmfConfig {
  Index rank = 1;
  BetaLoss loss = BetaLoss::frobenius();
  int max_iter = 200;
  /// Stop once |f_prev - f| / f_prev falls below this.
  double tol = 1e-4;
  std::uint64_t seed = 0;
  InitMethod init = InitMethod::SeededRandom;
  /// Floor for update denominators and for the model entries inside KL/IS.
  double epsilon = 1e-12;
  // Reserved; the solver rejects non-zero values.
  double l1_penalty = 0.0;
  double l2_penalty = 0.0;
};

/// Throws UsageError when `config` is not valid for an n x m input.
void validate(const NmfConfig& config, Index n, Index m);

struct NmfModel {
  Matrix W;  // n x k
  Matrix H;  // k x m
  /// Objective at initialization followed by one value per iteration.
  std::vector<double> objective_history;
  bool converged = false;
  int iterations = 0;
  /// Frobenius norm of M - WH.
  double residual_norm = 0.0;
};

/// Sum over all entries of component_loss(M_ij, (WH)_ij). The model entry is
/// floored at epsilon for beta <= 1; for beta <= 0 zero data entries are
/// floored at epsilon too, which keeps the objective finite.
double objective(const SparseMatrix& m, const Matrix& w, const Matrix& h, BetaLoss loss, double epsilon = 1e-12);
double objective(const Matrix& m, const Matrix& w, const Matrix& h, BetaLoss loss, double epsilon = 1e-12);

double residual_norm(const SparseMatrix& m, const Matrix& w, const Matrix& h);

/// Strictly positive starting factors, fully determined by the config.
Factors initialize(const SparseMatrix& m, const NmfConfig& config);

/// Called after each iteration with the iteration number (1-based) and factors.
using IterationObserver = std::function<void(int, const Matrix&, const Matrix&)>;

/// Multiplicative beta-divergence updates, H then W on each iteration.
NmfModel factorize(const SparseMatrix& m, const NmfConfig& config, const IterationObserver& observer = {});
NmfModel factorize(const Matrix& m, const NmfConfig& config, const IterationObserver& observer = {});

}  // namespace dsnmf
