#include <doctest.h>

#include <cmath>

#include "pading/matrix.hpp"
#include "pading/rng.hpp"

using namespace pading;

TEST_SUITE("matrix") {

TEST_CASE("matmul identity leaves any 2xk matrix unchanged") {
  const Matrix m{{1.5, -2.0, 7.0}, {0.0, 3.25, -1.0}};
  CHECK(matmul(Matrix::identity(2), m) == m);
}

TEST_CASE("matmul by a zero matrix annihilates") {
  const Matrix z = Matrix::zeros(3, 2);
  const Matrix m{{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}};
  const Matrix out = matmul(m, transpose(Matrix::zeros(4, 3)));
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.at(i) == 0.0);
  CHECK(out.rows() == 2);
  CHECK(out.cols() == 4);
  CHECK(matmul(z, Matrix::zeros(2, 5)).rows() == 3);
}

TEST_CASE("matmul hand-multiplied 2x2 by 2x1") {
  const Matrix a{{1.0, 2.0}, {3.0, 4.0}};
  const Matrix b{{5.0}, {6.0}};
  const Matrix c = matmul(a, b);
  CHECK(c(0, 0) == doctest::Approx(17.0).epsilon(1e-12));
  CHECK(c(1, 0) == doctest::Approx(39.0).epsilon(1e-12));
}

TEST_CASE("matmul rejects mismatched inner dims with both shapes named") {
  const Matrix a(2, 3);
  const Matrix b(4, 2);
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("2x3"), DimensionError);
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("4x2"), DimensionError);
}

TEST_CASE("matmul is associative on random 4x4 triples") {
  Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = rng.normal_matrix(4, 4);
    const Matrix b = rng.normal_matrix(4, 4);
    const Matrix c = rng.normal_matrix(4, 4);
    const Matrix left = matmul(matmul(a, b), c);
    const Matrix right = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < left.size(); ++i) {
      CHECK(left.at(i) == doctest::Approx(right.at(i)).epsilon(1e-9));
    }
  }
}

TEST_CASE("softmax of a constant row is uniform") {
  const Matrix m{{3.7, 3.7, 3.7, 3.7}};
  const Matrix s = softmax_rows(m);
  for (std::size_t j = 0; j < 4; ++j) CHECK(s(0, j) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("softmax is invariant to a constant shift") {
  Rng rng(3);
  const Matrix m = rng.normal_matrix(2, 5);
  Matrix shifted = m;
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted.at(i) += 123.456;
  const Matrix a = softmax_rows(m);
  const Matrix b = softmax_rows(shifted);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.at(i) == doctest::Approx(b.at(i)).epsilon(1e-12));
  }
}

TEST_CASE("softmax of [0, ln 3] is [0.25, 0.75]") {
  const Matrix m{{0.0, std::log(3.0)}};
  const Matrix s = softmax_rows(m, 1.0);
  CHECK(s(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s(0, 1) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("softmax rejects non-positive temperature") {
  CHECK_THROWS_AS(softmax_rows(Matrix{{1.0}}, 0.0), ParameterError);
  CHECK_THROWS_AS(softmax_rows(Matrix{{1.0}}, -2.0), ParameterError);
}

TEST_CASE("softmax rows sum to one across magnitudes") {
  Rng rng(11);
  for (double mag : {1e-3, 1.0, 1e3}) {
    const Matrix m = rng.normal_matrix(8, 6, mag);
    const Matrix s = softmax_rows(m);
    for (std::size_t i = 0; i < s.rows(); ++i) {
      double sum = 0.0;
      for (double v : s.row(i)) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("l2_normalize_rows divides [3,4] by 5") {
  const Matrix m{{3.0, 4.0}};
  const Matrix n = l2_normalize_rows(m);
  CHECK(n(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(n(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("l2_normalize_rows keeps unit vectors and flags zero rows") {
  const Matrix m{{1.0, 0.0}, {0.0, 0.0}};
  std::size_t zeros = 0;
  const Matrix n = l2_normalize_rows(m, &zeros);
  CHECK(zeros == 1);
  CHECK(n(0, 0) == 1.0);
  CHECK(n(1, 0) == 0.0);
  CHECK(n(1, 1) == 0.0);
}

TEST_CASE("normalized rows have unit norm within 1e-9") {
  Rng rng(5);
  const Matrix n = l2_normalize_rows(rng.normal_matrix(10, 7, 3.0));
  for (std::size_t i = 0; i < n.rows(); ++i) {
    double sq = 0.0;
    for (double v : n.row(i)) sq += v * v;
    CHECK(std::sqrt(sq) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("cosine_matrix basics") {
  const Matrix same{{1.0, 2.0}, {2.0, 4.0}};
  const Matrix ones = cosine_matrix(same);
  for (std::size_t i = 0; i < ones.size(); ++i) {
    CHECK(ones.at(i) == doctest::Approx(1.0).epsilon(1e-12));
  }

  const Matrix orth{{1.0, 0.0}, {0.0, 2.0}};
  const Matrix id = cosine_matrix(orth);
  CHECK(id(0, 0) == doctest::Approx(1.0));
  CHECK(id(0, 1) == doctest::Approx(0.0));

  const Matrix pair{{1.0, 0.0}, {1.0, 1.0}};
  const Matrix c = cosine_matrix(pair);
  CHECK(c(0, 1) == doctest::Approx(0.7071067811865475).epsilon(1e-9));
  CHECK(c(1, 0) == c(0, 1));
}

TEST_CASE("cosine_matrix rejects a near-zero row by index") {
  const Matrix m{{1.0, 0.0}, {0.0, 0.0}};
  CHECK_THROWS_WITH_AS(cosine_matrix(m), doctest::Contains("row 1"), DegenerateInputError);
}

}  // TEST_SUITE
