// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace odor {

class ShapeMismatch : public std::runtime_error {
 public:
  explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// Dense row-major matrix of 64-bit reals. All arithmetic in this project is
/// double precision; operations return new values and never alias inputs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double& at(std::size_t flat) { return data_[flat]; }
  double at(std::size_t flat) const { return data_[flat]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix sigmoid(const Matrix& a);

/// Normalizes each row to zero mean and unit variance (epsilon 1e-5 inside the
/// square root), then applies per-column gain and bias. `gain` and `bias` are
/// 1 x cols.
Matrix layer_norm(const Matrix& a, const Matrix& gain, const Matrix& bias);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);

/// Adds a 1 x cols row vector to every row of `a`.
Matrix add_row(const Matrix& a, const Matrix& row);
/// Multiplies every row of `a` elementwise by a 1 x cols row vector.
Matrix mul_row(const Matrix& a, const Matrix& row);

Matrix map(const Matrix& a, double (*fn)(double));

double sum(const Matrix& a);
std::vector<double> row_sums(const Matrix& a);
std::vector<double> col_sums(const Matrix& a);
std::vector<double> col_means(const Matrix& a);
double frobenius_sq(const Matrix& a);

constexpr double kLayerNormEpsilon = 1e-5;

}  // namespace odor
