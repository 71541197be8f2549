// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "odor/matrix.hpp"
#include "odor/rng.hpp"

using namespace odor;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.at(i) = rng.uniform(-2.0, 2.0);
  return m;
}

}  // namespace

TEST_CASE("matmul computes the product and rejects bad shapes") {
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  const Matrix b = Matrix::from_rows({{5, 6}, {7, 8}});
  const Matrix c = matmul(a, b);
  CHECK(c(0, 0) == 19);
  CHECK(c(0, 1) == 22);
  CHECK(c(1, 0) == 43);
  CHECK(c(1, 1) == 50);

  CHECK_THROWS_AS(matmul(a, Matrix(3, 2)), ShapeMismatch);
}

TEST_CASE("matmul is associative on random matrices") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(4, 3, rng);
    const Matrix b = random_matrix(3, 5, rng);
    const Matrix c = random_matrix(5, 2, rng);
    const Matrix left = matmul(matmul(a, b), c);
    const Matrix right = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < left.size(); ++i) {
      const double denom = std::max(1.0, std::fabs(left.at(i)));
      CHECK(std::fabs(left.at(i) - right.at(i)) / denom < 1e-9);
    }
  }
}

TEST_CASE("transpose is an exact involution") {
  Rng rng(5);
  const Matrix a = random_matrix(6, 4, rng);
  const Matrix back = transpose(transpose(a));
  REQUIRE(back.same_shape(a));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(back.at(i) == a.at(i));
}

TEST_CASE("hadamard with ones is the identity") {
  Rng rng(3);
  const Matrix a = random_matrix(3, 7, rng);
  const Matrix ones(3, 7, 1.0);
  const Matrix h = hadamard(a, ones);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(h.at(i) == a.at(i));
}

TEST_CASE("sigmoid hits 0.5 at zero and stays in (0,1)") {
  CHECK(sigmoid(Matrix(1, 1, 0.0))(0, 0) == 0.5);
  const Matrix wide = Matrix::from_rows({{-700.0, -10.0, 0.0, 10.0, 700.0}});
  const Matrix s = sigmoid(wide);
  for (std::size_t j = 0; j < s.cols(); ++j) {
    CHECK(s(0, j) > 0.0);
    CHECK(s(0, j) < 1.0);
  }
  CHECK(s(0, 4) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("layer_norm rows have zero mean and unit variance before affine") {
  Rng rng(9);
  const Matrix a = random_matrix(5, 8, rng);
  const Matrix gain(1, 8, 1.0);
  const Matrix bias(1, 8, 0.0);
  const Matrix normed = layer_norm(a, gain, bias);
  for (std::size_t i = 0; i < normed.rows(); ++i) {
    double mean = 0.0, var = 0.0;
    for (std::size_t j = 0; j < normed.cols(); ++j) mean += normed(i, j);
    mean /= 8.0;
    for (std::size_t j = 0; j < normed.cols(); ++j) {
      var += (normed(i, j) - mean) * (normed(i, j) - mean);
    }
    var /= 8.0;
    CHECK(std::fabs(mean) < 1e-9);
    // epsilon inside the sqrt shaves variance slightly below 1
    CHECK(std::fabs(var - 1.0) < 1e-4);
  }
}

TEST_CASE("layer_norm of a constant row is all zeros before affine") {
  const Matrix a(2, 6, 3.141);
  const Matrix normed = layer_norm(a, Matrix(1, 6, 1.0), Matrix(1, 6, 0.0));
  for (std::size_t i = 0; i < normed.size(); ++i) CHECK(normed.at(i) == 0.0);
}

TEST_CASE("layer_norm applies per-column gain and bias") {
  const Matrix a = Matrix::from_rows({{1.0, 2.0, 3.0, 4.0}});
  Matrix gain(1, 4, 2.0);
  Matrix bias(1, 4, 0.0);
  bias(0, 2) = 10.0;
  const Matrix plain = layer_norm(a, Matrix(1, 4, 1.0), Matrix(1, 4, 0.0));
  const Matrix affine = layer_norm(a, gain, bias);
  for (std::size_t j = 0; j < 4; ++j) {
    const double expected = plain(0, j) * 2.0 + (j == 2 ? 10.0 : 0.0);
    CHECK(affine(0, j) == doctest::Approx(expected).epsilon(1e-12));
  }
}
