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


#include "dsnmf/nmf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>

#include "dsnmf/error.hpp"
#include "dsnmf/rank.hpp"

namespace dsnmf {

namespace {

// Rows of WH materialized at a time when a dense view of the model is needed.
constexpr Index kRowBlock = 256;

bool is_beta(BetaLoss loss, double beta) { return loss.beta == beta; }

// Exponent that makes the multiplicative update a majorization-minimization
// step outside [1, 2].
double update_exponent(double beta) {
  if (beta < 1.0) return 1.0 / (2.0 - beta);
  if (beta > 2.0) return 1.0 / (beta - 1.0);
  return 1.0;
}

double open_unit(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53; }

// Below this |d| the closed forms lose relative accuracy to cancellation and
// the alternating series (terms shrinking by |d|) is used instead.
constexpr double kSeriesCutoff = 0.25;

// d - log(1 + d) = sum_{k>=2} (-1)^k d^k / k.
double d_minus_log1p(double d) {
  if (std::abs(d) >= kSeriesCutoff) return d - std::log1p(d);
  double sum = 0.0;
  double power = -d;
  for (int k = 2; k < 64; ++k) {
    power *= -d;
    const double term = power / k;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// (1 + d) log(1 + d) - d = sum_{k>=2} (-1)^k d^k / (k (k - 1)).
double one_plus_d_log1p_minus_d(double d) {
  if (std::abs(d) >= kSeriesCutoff) return (1.0 + d) * std::log1p(d) - d;
  double sum = 0.0;
  double power = -d;
  for (int k = 2; k < 64; ++k) {
    power *= -d;
    const double term = power / (static_cast<double>(k) * (k - 1));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

void check_input(const SparseMatrix& m) {
  for (Index i = 0; i < m.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
      if (!(it.value() >= 0.0) || !std::isfinite(it.value())) {
        throw DataError("NMF input has a negative or non-finite entry at (" + std::to_string(it.row()) + ", " +
                        std::to_string(it.col()) + ")");
      }
    }
  }
  (void)marginals(m);
}

// Ratio matrix on the sparsity pattern of M: M_ij * max((WH)_ij, eps)^(beta-2).
SparseMatrix pattern_ratio(const SparseMatrix& m, const Matrix& w, const Matrix& h, double beta, double eps) {
  SparseMatrix r = m;
  Vector wrow(w.cols());
  for (Index i = 0; i < r.outerSize(); ++i) {
    wrow = w.row(i).transpose();
    for (SparseMatrix::InnerIterator it(r, i); it; ++it) {
      const double wh = std::max(wrow.dot(h.col(it.col())), eps);
      if (beta == 1.0) {
        it.valueRef() = it.value() / wh;
      } else if (beta == 0.0) {
        it.valueRef() = it.value() / (wh * wh);
      } else {
        it.valueRef() = it.value() * std::pow(wh, beta - 2.0);
      }
    }
  }
  return r;
}

// Element-wise max(WH, eps)^(beta-1), one row block at a time, folded into
// the two denominators of the general update.
Matrix power_block(const Matrix& w, const Matrix& h, Index r0, Index rows, double beta, double eps) {
  Matrix block = w.middleRows(r0, rows) * h;
  if (beta == 0.0) {
    block = block.array().max(eps).inverse();
  } else {
    block = block.array().max(eps).pow(beta - 1.0);
  }
  return block;
}

void multiply_update(Matrix& factor, const Matrix& num, const Matrix& den, double gamma, double eps) {
  if (gamma == 1.0) {
    factor.array() *= num.array() / (den.array() + eps);
  } else {
    factor.array() *= (num.array() / (den.array() + eps)).pow(gamma);
  }
}

void update_h(const SparseMatrix& m, const Matrix& w, Matrix& h, double beta, double eps) {
  if (beta == 2.0) {
    const Matrix num = (m.transpose() * w).transpose();
    const Matrix den = (w.transpose() * w) * h;
    multiply_update(h, num, den, 1.0, eps);
    return;
  }
  const SparseMatrix ratio = pattern_ratio(m, w, h, beta, eps);
  const Matrix num = (ratio.transpose() * w).transpose();
  Matrix den(h.rows(), h.cols());
  if (beta == 1.0) {
    den = w.colwise().sum().transpose().replicate(1, h.cols());
  } else {
    den.setZero();
    for (Index r0 = 0; r0 < m.rows(); r0 += kRowBlock) {
      const Index rows = std::min(kRowBlock, m.rows() - r0);
      den.noalias() += w.middleRows(r0, rows).transpose() * power_block(w, h, r0, rows, beta, eps);
    }
  }
  multiply_update(h, num, den, update_exponent(beta), eps);
}

void update_w(const SparseMatrix& m, Matrix& w, const Matrix& h, double beta, double eps) {
  if (beta == 2.0) {
    const Matrix num = m * h.transpose();
    const Matrix den = w * (h * h.transpose());
    multiply_update(w, num, den, 1.0, eps);
    return;
  }
  const SparseMatrix ratio = pattern_ratio(m, w, h, beta, eps);
  const Matrix num = ratio * h.transpose();
  Matrix den(w.rows(), w.cols());
  if (beta == 1.0) {
    den = h.rowwise().sum().transpose().replicate(w.rows(), 1);
  } else {
    for (Index r0 = 0; r0 < m.rows(); r0 += kRowBlock) {
      const Index rows = std::min(kRowBlock, m.rows() - r0);
      den.middleRows(r0, rows) = power_block(w, h, r0, rows, beta, eps) * h.transpose();
    }
  }
  multiply_update(w, num, den, update_exponent(beta), eps);
}

Factors nndsvda(const SparseMatrix& m, const NmfConfig& config) {
  const Index k = config.rank;
  SvdOptions options;
  options.seed = config.seed ^ 0x6a09e667f3bcc909ULL;
  const TruncatedSvd svd = truncated_svd(m, k, options);
  Matrix w = Matrix::Zero(m.rows(), k);
  Matrix h = Matrix::Zero(k, m.cols());

  w.col(0) = std::sqrt(svd.S[0]) * svd.U.col(0).cwiseAbs();
  h.row(0) = std::sqrt(svd.S[0]) * svd.V.col(0).cwiseAbs().transpose();
  for (Index j = 1; j < k; ++j) {
    const Vector x = svd.U.col(j);
    const Vector y = svd.V.col(j);
    const Vector xp = x.cwiseMax(0.0);
    const Vector xn = (-x).cwiseMax(0.0);
    const Vector yp = y.cwiseMax(0.0);
    const Vector yn = (-y).cwiseMax(0.0);
    const double pos = xp.norm() * yp.norm();
    const double neg = xn.norm() * yn.norm();
    const bool use_pos = pos > neg;
    const double mag = use_pos ? pos : neg;
    if (!(mag > 0.0)) continue;
    const Vector& u = use_pos ? xp : xn;
    const Vector& v = use_pos ? yp : yn;
    const double lambda = std::sqrt(svd.S[j] * mag);
    w.col(j) = lambda * u / u.norm();
    h.row(j) = lambda * v.transpose() / v.norm();
  }

  const double mean = m.sum() / static_cast<double>(m.rows() * m.cols());
  w = (w.array() <= config.epsilon).select(mean, w);
  h = (h.array() <= config.epsilon).select(mean, h);
  return {std::move(w), std::move(h)};
}

}  // namespace

BetaLoss parse_loss(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "frobenius" || lower == "fro") return BetaLoss::frobenius();
  if (lower == "kl" || lower == "kullback-leibler") return BetaLoss::kullback_leibler();
  if (lower == "is" || lower == "itakura-saito") return BetaLoss::itakura_saito();
  double beta = 0.0;
  const auto [ptr, ec] = std::from_chars(lower.data(), lower.data() + lower.size(), beta);
  if (ec != std::errc() || ptr != lower.data() + lower.size() || !std::isfinite(beta)) {
    throw UsageError("unknown loss '" + std::string(name) + "' (expected frobenius, kl, is or a number)");
  }
  return {beta};
}

std::string to_string(BetaLoss loss) {
  if (is_beta(loss, 2.0)) return "frobenius";
  if (is_beta(loss, 1.0)) return "kl";
  if (is_beta(loss, 0.0)) return "is";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", loss.beta);
  return buf;
}

double component_loss(double x, double y, BetaLoss loss) {
  const double beta = loss.beta;
  if (!(x >= 0.0)) throw DataError("component loss needs x >= 0");
  if (beta == 2.0) return (x - y) * (x - y);
  if (beta <= 1.0 && !(y > 0.0)) throw DataError("component loss needs y > 0 for beta <= 1");
  if (beta == 1.0) return x == 0.0 ? y : y * one_plus_d_log1p_minus_d((x - y) / y);
  if (beta <= 0.0 && x == 0.0) throw DataError("component loss is undefined at x = 0 for beta <= 0");
  if (beta == 0.0) return d_minus_log1p((x - y) / y);
  return (std::pow(x, beta) + (beta - 1.0) * std::pow(y, beta) - beta * x * std::pow(y, beta - 1.0)) /
         (beta * (beta - 1.0));
}

double kl_summand(double x, double y) {
  if (!(x >= 0.0) || !(y > 0.0)) throw DataError("KL summand needs x >= 0 and y > 0");
  if (x == 0.0) return 0.0;
  const double d = (x - y) / y;
  return std::abs(d) < kSeriesCutoff ? x * std::log1p(d) : x * std::log(x / y);
}

InitMethod parse_init(std::string_view name) {
  if (name == "random" || name == "seeded-random") return InitMethod::SeededRandom;
  if (name == "nndsvda") return InitMethod::Nndsvda;
  throw UsageError("unknown init '" + std::string(name) + "' (expected random or nndsvda)");
}

std::string_view to_string(InitMethod init) {
  return init == InitMethod::Nndsvda ? "nndsvda" : "random";
}

void validate(const NmfConfig& c, Index n, Index m) {
  if (c.rank < 1 || c.rank > std::min(n, m)) {
    throw UsageError("rank " + std::to_string(c.rank) + " outside [1, " + std::to_string(std::min(n, m)) + "]");
  }
  if (c.max_iter < 1) throw UsageError("max_iter must be positive");
  if (!(c.tol >= 0.0)) throw UsageError("tol must be non-negative");
  if (!(c.epsilon > 0.0)) throw UsageError("epsilon must be positive");
  if (!std::isfinite(c.loss.beta)) throw UsageError("beta must be finite");
  if (c.l1_penalty != 0.0 || c.l2_penalty != 0.0) throw UsageError("regularization is not supported");
}

double objective(const SparseMatrix& m, const Matrix& w, const Matrix& h, BetaLoss loss, double epsilon) {
  const double beta = loss.beta;
  const bool frob = beta == 2.0;
  double total = 0.0;
  for (Index r0 = 0; r0 < m.rows(); r0 += kRowBlock) {
    const Index rows = std::min(kRowBlock, m.rows() - r0);
    const Matrix wh = w.middleRows(r0, rows) * h;
    for (Index b = 0; b < rows; ++b) {
      SparseMatrix::InnerIterator it(m, r0 + b);
      for (Index j = 0; j < m.cols(); ++j) {
        double x = 0.0;
        if (it && it.col() == j) {
          x = it.value();
          ++it;
        }
        const double y = wh(b, j);
        if (frob) {
          total += (x - y) * (x - y);
          continue;
        }
        if (beta <= 0.0 && x == 0.0) x = epsilon;
        total += component_loss(x, std::max(y, epsilon), loss);
      }
    }
  }
  return total;
}

double objective(const Matrix& m, const Matrix& w, const Matrix& h, BetaLoss loss, double epsilon) {
  return objective(SparseMatrix(m.sparseView(0.0, 0.0)), w, h, loss, epsilon);
}

double residual_norm(const SparseMatrix& m, const Matrix& w, const Matrix& h) {
  return std::sqrt(objective(m, w, h, BetaLoss::frobenius()));
}

Factors initialize(const SparseMatrix& m, const NmfConfig& config) {
  validate(config, m.rows(), m.cols());
  if (config.init == InitMethod::Nndsvda) return nndsvda(m, config);
  const double mean = m.sum() / static_cast<double>(m.rows() * m.cols());
  const double scale = std::sqrt(mean / static_cast<double>(config.rank));
  std::mt19937_64 rng(config.seed);
  Matrix w(m.rows(), config.rank);
  Matrix h(config.rank, m.cols());
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index j = 0; j < w.cols(); ++j) w(i, j) = scale * open_unit(rng());
  }
  for (Index i = 0; i < h.rows(); ++i) {
    for (Index j = 0; j < h.cols(); ++j) h(i, j) = scale * open_unit(rng());
  }
  return {std::move(w), std::move(h)};
}

NmfModel factorize(const SparseMatrix& m, const NmfConfig& config, const IterationObserver& observer) {
  validate(config, m.rows(), m.cols());
  check_input(m);
  const double beta = config.loss.beta;
  const double eps = config.epsilon;

  Factors f = initialize(m, config);
  NmfModel model;
  double prev = objective(m, f.W, f.H, config.loss, eps);
  model.objective_history.push_back(prev);

  for (int iter = 1; iter <= config.max_iter; ++iter) {
    update_h(m, f.W, f.H, beta, eps);
    update_w(m, f.W, f.H, beta, eps);
    if (!f.W.allFinite() || !f.H.allFinite()) {
      throw NumericalError("non-finite factor entries at iteration " + std::to_string(iter));
    }
    const double current = objective(m, f.W, f.H, config.loss, eps);
    if (!std::isfinite(current)) throw NumericalError("non-finite objective at iteration " + std::to_string(iter));
    model.objective_history.push_back(current);
    model.iterations = iter;
    if (observer) observer(iter, f.W, f.H);
    if (current == 0.0 || std::abs(prev - current) <= config.tol * std::abs(prev)) {
      model.converged = true;
      break;
    }
    prev = current;
  }
  model.residual_norm = residual_norm(m, f.W, f.H);
  model.W = std::move(f.W);
  model.H = std::move(f.H);
  return model;
}

NmfModel factorize(const Matrix& m, const NmfConfig& config, const IterationObserver& observer) {
  if ((m.array() < 0.0).any()) throw DataError("NMF input has a negative entry");
  return factorize(SparseMatrix(m.sparseView(0.0, 0.0)), config, observer);
}

}  // namespace dsnmf
