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


#include "dsnmf/doc_term_matrix.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dsnmf/error.hpp"

namespace dsnmf {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct TripletHeader {
  Index rows = 0;
  Index cols = 0;
  Index nnz = 0;
};

TripletHeader read_header(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  std::istringstream hs(line);
  TripletHeader h;
  if (!(hs >> h.rows >> h.cols >> h.nnz) || h.rows < 0 || h.cols < 0 || h.nnz < 0) {
    throw DataError("triplet format: bad header line '" + line + "'");
  }
  return h;
}

}  // namespace

Marginals marginals(const SparseMatrix& m) {
  Marginals out{Vector::Zero(m.rows()), Vector::Zero(m.cols())};
  for (Index i = 0; i < m.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
      out.rows[it.row()] += it.value();
      out.cols[it.col()] += it.value();
    }
  }
  for (Index i = 0; i < m.rows(); ++i) {
    if (!(out.rows[i] > 0.0)) throw DataError("row " + std::to_string(i) + " has no positive entries");
  }
  for (Index j = 0; j < m.cols(); ++j) {
    if (!(out.cols[j] > 0.0)) throw DataError("column " + std::to_string(j) + " has no positive entries");
  }
  return out;
}

DocTermMatrix::DocTermMatrix(SparseMatrix counts) : counts_(std::move(counts)) {
  if (counts_.rows() == 0 || counts_.cols() == 0) throw DataError("document-term matrix is empty");
  counts_.prune(0.0, 0.0);
  counts_.makeCompressed();
  for (Index i = 0; i < counts_.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(counts_, i); it; ++it) {
      if (!(it.value() > 0.0) || !std::isfinite(it.value())) {
        throw DataError("entry (" + std::to_string(it.row()) + ", " + std::to_string(it.col()) +
                        ") is not a positive finite count");
      }
    }
  }
  const Marginals sums = marginals(counts_);
  total_ = sums.rows.sum();
}

DocTermMatrix DocTermMatrix::from_triplets(Index rows, Index cols, const std::vector<Triplet>& entries) {
  SparseMatrix m(rows, cols);
  for (const auto& t : entries) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols) {
      throw DataError("triplet (" + std::to_string(t.row()) + ", " + std::to_string(t.col()) + ") out of range");
    }
    if (t.value() < 0.0) {
      throw DataError("negative entry at (" + std::to_string(t.row()) + ", " + std::to_string(t.col()) + ")");
    }
  }
  m.setFromTriplets(entries.begin(), entries.end());
  return DocTermMatrix(std::move(m));
}

DocTermMatrix DocTermMatrix::from_dense(const Matrix& dense) {
  if ((dense.array() < 0.0).any()) throw DataError("negative entry in dense matrix");
  return DocTermMatrix(SparseMatrix(dense.sparseView(0.0, 0.0)));
}

void write_triplets(std::ostream& out, const SparseMatrix& m) {
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (Index i = 0; i < m.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << format_value(it.value()) << '\n';
    }
  }
}

SparseMatrix read_triplets(std::istream& in) {
  const TripletHeader h = read_header(in);
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(h.nnz));
  for (Index k = 0; k < h.nnz; ++k) {
    Index i = 0;
    Index j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw DataError("triplet format: expected " + std::to_string(h.nnz) +
                                              " entries, got " + std::to_string(k));
    if (i < 0 || i >= h.rows || j < 0 || j >= h.cols) {
      throw DataError("triplet format: entry " + std::to_string(k) + " out of range");
    }
    entries.emplace_back(i, j, v);
  }
  SparseMatrix m(h.rows, h.cols);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

void write_dense_triplets(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << ' ' << m.size() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << i << ' ' << j << ' ' << format_value(m(i, j)) << '\n';
  }
}

Matrix read_dense_triplets(std::istream& in) {
  const TripletHeader h = read_header(in);
  Matrix m = Matrix::Zero(h.rows, h.cols);
  for (Index k = 0; k < h.nnz; ++k) {
    Index i = 0;
    Index j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw DataError("dense block: truncated at entry " + std::to_string(k));
    if (i < 0 || i >= h.rows || j < 0 || j >= h.cols) {
      throw DataError("dense block: entry " + std::to_string(k) + " out of range");
    }
    m(i, j) = v;
  }
  return m;
}

}  // namespace dsnmf
