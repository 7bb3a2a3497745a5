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


#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dsnmf/error.hpp"
#include "dsnmf/nmf.hpp"
#include "dsnmf/scaling.hpp"
#include "oracles.hpp"

using namespace dsnmf;

namespace {

DocTermMatrix two_by_two() {
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  return DocTermMatrix::from_dense(m);
}

void check_matrix(const Matrix& actual, const Matrix& expected, double tol = 1e-15) {
  REQUIRE(actual.rows() == expected.rows());
  REQUIRE(actual.cols() == expected.cols());
  for (Index i = 0; i < actual.rows(); ++i)
    for (Index j = 0; j < actual.cols(); ++j) CHECK(actual(i, j) == doctest::Approx(expected(i, j)).epsilon(tol));
}

}  // namespace

TEST_CASE("marginals") {
  const auto m = two_by_two();
  const auto mg = marginals(m.counts());
  CHECK(mg.rows(0) == 3);
  CHECK(mg.rows(1) == 7);
  CHECK(mg.cols(0) == 4);
  CHECK(mg.cols(1) == 6);

  CHECK(marginals(DocTermMatrix::from_dense(Matrix::Identity(2, 2)).counts()).rows == Vector::Ones(2));
  Matrix perm(2, 2);
  perm << 0, 1, 1, 0;
  CHECK(marginals(DocTermMatrix::from_dense(perm).counts()).cols == Vector::Ones(2));

  SparseMatrix empty_row(2, 2);
  empty_row.insert(0, 0) = 1;
  empty_row.insert(0, 1) = 1;
  try {
    marginals(empty_row);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("DocTermMatrix validates entries") {
  Matrix neg(1, 2);
  neg << 1, -1;
  CHECK_THROWS_AS(DocTermMatrix::from_dense(neg), DataError);
  Matrix nan(1, 1);
  nan << std::nan("");
  CHECK_THROWS_AS(DocTermMatrix::from_dense(nan), DataError);
}

TEST_CASE("apply_scaling on the 2x2 example") {
  const auto m = two_by_two();
  Matrix rs(2, 2), nl(2, 2), pw(2, 2), cs(2, 2);
  rs << 1.0 / 3, 2.0 / 3, 3.0 / 7, 4.0 / 7;
  cs << 1.0 / 4, 2.0 / 6, 3.0 / 4, 4.0 / 6;
  nl << 1 / std::sqrt(12.0), 2 / std::sqrt(18.0), 3 / std::sqrt(28.0), 4 / std::sqrt(42.0);
  pw << 1.0 / 12, 2.0 / 18, 3.0 / 28, 4.0 / 42;
  check_matrix(Matrix(apply_scaling(m, ScalingKind::Counts).matrix), m.dense());
  check_matrix(Matrix(apply_scaling(m, ScalingKind::RowScaling).matrix), rs);
  check_matrix(Matrix(apply_scaling(m, ScalingKind::ColumnScaling).matrix), cs);
  check_matrix(Matrix(apply_scaling(m, ScalingKind::NormalizedLaplacian).matrix), nl);
  check_matrix(Matrix(apply_scaling(m, ScalingKind::Pwmi).matrix), pw);
  // total_count x Pwmi is the n-scaled form.
  check_matrix(Matrix(apply_scaling(m, ScalingKind::Pwmi, {true}).matrix), 10.0 * pw);
  const auto s = apply_scaling(m, ScalingKind::NormalizedLaplacian);
  CHECK(s.row_marginals == marginals(m.counts()).rows);
  CHECK(s.col_marginals == marginals(m.counts()).cols);
}

TEST_CASE("scaling names round trip") {
  for (const auto kind : kAllScalings) CHECK(parse_scaling(to_string(kind)) == kind);
  CHECK(parse_scaling("NL") == ScalingKind::NormalizedLaplacian);
  CHECK(parse_scaling("counts") == ScalingKind::Counts);
  CHECK_THROWS_AS(parse_scaling("bogus"), UsageError);
}

TEST_CASE("post_scale inverts each pre-scaler") {
  const auto m = two_by_two();
  const Matrix eye = Matrix::Identity(2, 2);
  const auto counts = apply_scaling(m, ScalingKind::Counts);
  auto f = post_scale(eye, eye, counts);
  CHECK(f.W == eye);
  CHECK(f.H == eye);

  const auto rs = apply_scaling(m, ScalingKind::RowScaling);
  f = post_scale(eye, eye, rs);
  Matrix w(2, 2);
  w << 3, 0, 0, 7;
  CHECK(f.W == w);
  CHECK(f.H == eye);

  CHECK_THROWS_AS(post_scale(Matrix::Identity(3, 2), eye, rs), UsageError);
}

TEST_CASE("exact factorization of the scaled matrix post-scales back to M") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix dense = oracle::random_positive_sparse(rng, 6, 5, 1.0);
    const auto m = DocTermMatrix::from_dense(dense);
    for (const auto kind : kAllScalings) {
      for (const bool times_n : {false, true}) {
        const auto s = apply_scaling(m, kind, {times_n});
        // W~ = scaled matrix, H~ = I is an exact rank-min(n,m) factorization.
        const auto f = post_scale(Matrix(s.matrix), Matrix::Identity(5, 5), s);
        check_matrix(f.W * f.H, dense, 1e-12);
      }
    }
  }
}

TEST_CASE("scaled matrix entries lie in [0,1] for RS, CS and NL") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = DocTermMatrix::from_dense(oracle::random_counts(rng, 15, 25, 0.3, 20));
    for (const auto kind : {ScalingKind::RowScaling, ScalingKind::ColumnScaling, ScalingKind::NormalizedLaplacian}) {
      const Matrix s(apply_scaling(m, kind).matrix);
      CHECK(s.minCoeff() >= 0.0);
      CHECK(s.maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("bipartite block") {
  Matrix one(1, 1);
  one << 2;
  const auto b1 = bipartite_block(DocTermMatrix::from_dense(one));
  Matrix expect(2, 2);
  expect << 0, 2, 2, 0;
  CHECK(Matrix(b1.adjacency) == expect);

  const auto m = two_by_two();
  const auto b = bipartite_block(m);
  const Matrix a(b.adjacency);
  CHECK(a.rows() == 4);
  CHECK(a == a.transpose());
  CHECK(a.topLeftCorner(2, 2).isZero());
  CHECK(a.bottomRightCorner(2, 2).isZero());
  Vector sums(4);
  sums << 3, 7, 4, 6;
  CHECK(Vector(a.rowwise().sum()) == sums);
}

TEST_CASE("NL singular value bound") {
  Matrix one(1, 1);
  one << 5;
  auto r = nl_singular_bound_check(apply_scaling(DocTermMatrix::from_dense(one), ScalingKind::NormalizedLaplacian));
  CHECK(r.sigma_max == doctest::Approx(1.0).epsilon(1e-14));

  Vector u(6), v(9);
  u << 1, 2, 3, 4, 5, 6;
  v << 1, 1, 2, 3, 5, 8, 13, 21, 34;
  r = nl_singular_bound_check(
      apply_scaling(DocTermMatrix::from_dense(u * v.transpose()), ScalingKind::NormalizedLaplacian));
  CHECK(r.sigma_max == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.sigma_min == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.full_spectrum);

  std::mt19937_64 rng(2);
  r = nl_singular_bound_check(
      apply_scaling(DocTermMatrix::from_dense(oracle::random_counts(rng, 20, 30, 0.3, 9)),
                    ScalingKind::NormalizedLaplacian));
  CHECK(r.within_unit);
}

TEST_CASE("triplet text round trip is exact") {
  std::mt19937_64 rng(1);
  const SparseMatrix m = oracle::random_positive_sparse(rng, 7, 9, 0.3).sparseView();
  std::stringstream ss;
  write_triplets(ss, m);
  const SparseMatrix back = read_triplets(ss);
  CHECK(Matrix(back) == Matrix(m));
  std::istringstream bad("2 2 1\n5 0 1\n");
  CHECK_THROWS_AS(read_triplets(bad), DataError);
}
