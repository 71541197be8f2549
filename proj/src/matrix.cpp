// SPDX-License-Identifier: Apache-2.0

#include "odor/matrix.hpp"

#include <cmath>

namespace odor {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw ShapeMismatch(what);
}

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != m.cols_) throw ShapeMismatch("from_rows: ragged row lengths");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(),
          "matmul: " + shape_str(a) + " * " + shape_str(b));
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "hadamard: " + shape_str(a) + " vs " + shape_str(b));
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) *= b.at(i);
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix sigmoid(const Matrix& a) {
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double z = out.at(i);
    // Split on sign so exp never overflows.
    out.at(i) = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                         : std::exp(z) / (1.0 + std::exp(z));
  }
  return out;
}

Matrix layer_norm(const Matrix& a, const Matrix& gain, const Matrix& bias) {
  require(gain.rows() == 1 && gain.cols() == a.cols(),
          "layer_norm: gain must be 1x" + std::to_string(a.cols()));
  require(bias.rows() == 1 && bias.cols() == a.cols(),
          "layer_norm: bias must be 1x" + std::to_string(a.cols()));
  Matrix out(a.rows(), a.cols());
  const double n = static_cast<double>(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) mean += a(i, j);
    mean /= n;
    double var = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double d = a(i, j) - mean;
      var += d * d;
    }
    var /= n;
    const double inv_std = 1.0 / std::sqrt(var + kLayerNormEpsilon);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out(i, j) = (a(i, j) - mean) * inv_std * gain(0, j) + bias(0, j);
    }
  }
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "add: " + shape_str(a) + " vs " + shape_str(b));
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) += b.at(i);
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "sub: " + shape_str(a) + " vs " + shape_str(b));
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) -= b.at(i);
  return out;
}

Matrix scale(const Matrix& a, double s) {
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) *= s;
  return out;
}

Matrix add_row(const Matrix& a, const Matrix& row) {
  require(row.rows() == 1 && row.cols() == a.cols(),
          "add_row: row must be 1x" + std::to_string(a.cols()));
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) += row(0, j);
  return out;
}

Matrix mul_row(const Matrix& a, const Matrix& row) {
  require(row.rows() == 1 && row.cols() == a.cols(),
          "mul_row: row must be 1x" + std::to_string(a.cols()));
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) *= row(0, j);
  return out;
}

Matrix map(const Matrix& a, double (*fn)(double)) {
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) = fn(out.at(i));
  return out;
}

double sum(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return s;
}

std::vector<double> row_sums(const Matrix& a) {
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j);
  return out;
}

std::vector<double> col_sums(const Matrix& a) {
  std::vector<double> out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(i, j);
  return out;
}

std::vector<double> col_means(const Matrix& a) {
  std::vector<double> out = col_sums(a);
  for (double& v : out) v /= static_cast<double>(a.rows());
  return out;
}

double frobenius_sq(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return s;
}

}  // namespace odor
