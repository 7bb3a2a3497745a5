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


#include "dsnmf/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/SVD>

#include "dsnmf/error.hpp"

namespace dsnmf {

namespace {

constexpr double kZgVarianceFloor = 1e-12;

TruncatedSvd dense_svd(const SparseMatrix& a, Index count) {
  const Matrix dense(a);
  Eigen::BDCSVD<Matrix> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU().leftCols(count), svd.singularValues().head(count), svd.matrixV().leftCols(count)};
}

Vector gaussian(Index size, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(size);
  for (Index i = 0; i < size; ++i) v[i] = normal(rng);
  return v;
}

// Orthogonalizes x against the first `cols` columns of basis (two passes).
void orthogonalize(Vector& x, const Matrix& basis, Index cols) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Vector coeff = basis.leftCols(cols).transpose() * x;
    x.noalias() -= basis.leftCols(cols) * coeff;
  }
}

// Golub-Kahan-Lanczos bidiagonalization A V = U B, grown one step at a time.
// Start vectors are drawn from the row (resp. column) space of A, so once that
// space is exhausted the factorization is exact.
class Bidiagonalization {
 public:
  Bidiagonalization(const SparseMatrix& a, std::uint64_t seed)
      : a_(a), at_(a.transpose()), rng_(seed), scale_(std::max(a.norm(), 1e-300)) {
    const Index cap = std::min(a.rows(), a.cols());
    u_.resize(a.rows(), cap);
    v_.resize(a.cols(), cap);
    alpha_.resize(cap);
    beta_.resize(cap);
  }

  Index steps() const { return steps_; }
  bool exhausted() const { return exhausted_; }
  double beta(Index j) const { return beta_[j]; }

  // Extends the factorization to `target` steps (or until exhaustion).
  void extend(Index target) {
    while (steps_ < target && !exhausted_) {
      const Index j = steps_;
      if (j == 0) {
        Vector v = at_ * gaussian(a_.rows(), rng_);
        if (!normalize(v)) {
          exhausted_ = true;
          return;
        }
        v_.col(0) = v;
      }
      Vector u = a_ * v_.col(j);
      if (j > 0) u -= beta_[j - 1] * u_.col(j - 1);
      orthogonalize(u, u_, j);
      alpha_[j] = u.norm();
      if (!(alpha_[j] > breakdown())) {
        alpha_[j] = 0.0;
        u = a_ * gaussian(a_.cols(), rng_);
        orthogonalize(u, u_, j);
        if (!normalize(u)) {
          exhausted_ = true;
          return;
        }
      } else {
        u /= alpha_[j];
      }
      u_.col(j) = u;
      steps_ = j + 1;

      Vector v = at_ * u_.col(j) - alpha_[j] * v_.col(j);
      orthogonalize(v, v_, j + 1);
      beta_[j] = v.norm();
      if (j + 1 >= v_.cols()) {
        exhausted_ = true;
        return;
      }
      if (!(beta_[j] > breakdown())) {
        beta_[j] = 0.0;
        v = at_ * gaussian(a_.rows(), rng_);
        orthogonalize(v, v_, j + 1);
        if (!normalize(v)) {
          exhausted_ = true;
          return;
        }
      } else {
        v /= beta_[j];
      }
      v_.col(j + 1) = v;
    }
  }

  Matrix bidiagonal() const {
    Matrix b = Matrix::Zero(steps_, steps_);
    for (Index j = 0; j < steps_; ++j) {
      b(j, j) = alpha_[j];
      if (j + 1 < steps_) b(j, j + 1) = beta_[j];
    }
    return b;
  }

  const Matrix& u() const { return u_; }
  const Matrix& v() const { return v_; }

 private:
  double breakdown() const { return 1e-13 * scale_; }

  bool normalize(Vector& x) const {
    const double n = x.norm();
    if (!(n > breakdown())) return false;
    x /= n;
    return true;
  }

  const SparseMatrix& a_;
  SparseMatrix at_;
  std::mt19937_64 rng_;
  double scale_;
  Matrix u_;
  Matrix v_;
  Vector alpha_;
  Vector beta_;
  Index steps_ = 0;
  bool exhausted_ = false;
};

TruncatedSvd lanczos_svd(const SparseMatrix& a, Index count, const SvdOptions& options) {
  const Index cap = std::min(a.rows(), a.cols());
  Bidiagonalization gkl(a, options.seed);
  Index target = std::min(cap, std::max<Index>(2 * count + 10, 20));
  while (true) {
    gkl.extend(target);
    const Index d = gkl.steps();
    Eigen::BDCSVD<Matrix> small(gkl.bidiagonal(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sigma = small.singularValues();
    const Index found = std::min(count, d);
    bool converged = gkl.exhausted();
    if (!converged && d > 0) {
      const double bound = options.tolerance * std::max(sigma[0], 1e-300);
      converged = true;
      for (Index i = 0; i < found && converged; ++i) {
        converged = std::abs(gkl.beta(d - 1) * small.matrixU()(d - 1, i)) <= bound;
      }
      converged = converged && found == count;
    }
    if (converged) {
      TruncatedSvd out{Matrix::Zero(a.rows(), count), Vector::Zero(count), Matrix::Zero(a.cols(), count)};
      out.S.head(found) = sigma.head(found);
      out.U.leftCols(found) = gkl.u().leftCols(d) * small.matrixU().leftCols(found);
      out.V.leftCols(found) = gkl.v().leftCols(d) * small.matrixV().leftCols(found);
      return out;
    }
    if (d >= cap) {
      throw NumericalError("singular values did not converge after " + std::to_string(d) + " Lanczos steps");
    }
    target = std::min(cap, 2 * target);
  }
}

}  // namespace

TruncatedSvd truncated_svd(const SparseMatrix& a, Index count, const SvdOptions& options) {
  const Index cap = std::min(a.rows(), a.cols());
  if (count < 1 || count > cap) {
    throw UsageError("requested " + std::to_string(count) + " singular values of a " + std::to_string(a.rows()) +
                     "x" + std::to_string(a.cols()) + " matrix");
  }
  if (cap <= options.dense_threshold) return dense_svd(a, count);
  // The right basis must be the shorter side so that exhausting it leaves an
  // exact factorization A V = U B.
  if (a.rows() >= a.cols()) return lanczos_svd(a, count, options);
  TruncatedSvd t = lanczos_svd(SparseMatrix(a.transpose()), count, options);
  std::swap(t.U, t.V);
  return t;
}

SingularSpectrum singular_values(const SparseMatrix& a, Index count, const SvdOptions& options) {
  const TruncatedSvd svd = truncated_svd(a, count, options);
  SingularSpectrum out{std::vector<double>(svd.S.data(), svd.S.data() + svd.S.size()), a.rows(), a.cols()};
  for (double& v : out.values) v = std::max(v, 0.0);
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

double zg_profile_log_likelihood(std::span<const double> values, std::size_t q) {
  const std::size_t p = values.size();
  if (q < 1 || q >= p) throw UsageError("split outside [1, p-1]");
  double mean1 = 0.0;
  double mean2 = 0.0;
  for (std::size_t i = 0; i < q; ++i) mean1 += values[i];
  for (std::size_t i = q; i < p; ++i) mean2 += values[i];
  mean1 /= static_cast<double>(q);
  mean2 /= static_cast<double>(p - q);
  double ss = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double d = values[i] - (i < q ? mean1 : mean2);
    ss += d * d;
  }
  const double dof = p > 2 ? static_cast<double>(p - 2) : 1.0;
  const double var = std::max(ss / dof, kZgVarianceFloor);
  const double n = static_cast<double>(p);
  return -0.5 * n * std::log(2.0 * std::numbers::pi * var) - ss / (2.0 * var);
}

std::size_t zg_elbow(std::span<const double> values) {
  if (values.size() < 2) throw DataError("elbow detection needs at least two values");
  std::size_t best = 1;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t q = 1; q < values.size(); ++q) {
    const double ll = zg_profile_log_likelihood(values, q);
    if (ll > best_ll) {
      best_ll = ll;
      best = q;
    }
  }
  return best;
}

ElbowEstimate second_elbow(std::span<const double> values) {
  ElbowEstimate e;
  e.first = zg_elbow(values);
  const auto tail = values.subspan(e.first);
  if (tail.size() < 2) {
    e.second = e.first + 1;
    e.degenerate = true;
  } else {
    e.second = e.first + zg_elbow(tail);
  }
  return e;
}

std::vector<Index> sweep_range(const ElbowEstimate& elbow, Index radius, Index lo, Index hi) {
  if (lo > hi) throw DataError("empty rank bounds [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  if (radius < 0) throw UsageError("sweep radius must be non-negative");
  const auto centre = static_cast<Index>(elbow.second);
  std::vector<Index> ranks;
  for (Index r = std::max(lo, centre - radius); r <= std::min(hi, centre + radius); ++r) ranks.push_back(r);
  if (ranks.empty()) {
    throw DataError("rank sweep around " + std::to_string(centre) + " falls outside [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  return ranks;
}

}  // namespace dsnmf
