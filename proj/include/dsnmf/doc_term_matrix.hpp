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

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dsnmf {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Row sums and column sums of a non-negative matrix.
struct Marginals {
  Vector rows;
  Vector cols;
};

/// Computes row and column sums. Throws DataError naming the first empty row
/// or column, since every scaling divides by these sums.
Marginals marginals(const SparseMatrix& m);

/// Sparse non-negative document-term counts: rows are documents, columns are
/// terms. Structural zeros are never stored and every row and column has at
/// least one positive entry.
class DocTermMatrix {
 public:
  explicit DocTermMatrix(SparseMatrix counts);

  static DocTermMatrix from_triplets(Index rows, Index cols, const std::vector<Triplet>& entries);
  static DocTermMatrix from_dense(const Matrix& dense);

  Index n_docs() const { return counts_.rows(); }
  Index n_terms() const { return counts_.cols(); }
  Index nnz() const { return counts_.nonZeros(); }

  const SparseMatrix& counts() const { return counts_; }
  /// Grand sum of all entries.
  double total_count() const { return total_; }

  Matrix dense() const { return Matrix(counts_); }

 private:
  SparseMatrix counts_;
  double total_ = 0.0;
};

// Sparse triplet text format:
//   rows cols nnz
//   i j value        (one line per stored entry, 0-based, row-major order)
// Values are written with 17 significant digits so a round trip is exact.
void write_triplets(std::ostream& out, const SparseMatrix& m);
SparseMatrix read_triplets(std::istream& in);

/// Dense block written in the same layout, with every entry listed.
void write_dense_triplets(std::ostream& out, const Matrix& m);
Matrix read_dense_triplets(std::istream& in);

}  // namespace dsnmf
