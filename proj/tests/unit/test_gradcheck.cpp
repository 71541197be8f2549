// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <limits>

#include "odor/cil.hpp"
#include "odor/gradcheck.hpp"
#include "odor/rng.hpp"

using namespace odor;

TEST_CASE("grad_check on a quadratic is exact up to roundoff") {
  Rng rng(21);
  Matrix theta(3, 4);
  for (std::size_t i = 0; i < theta.size(); ++i) theta.at(i) = rng.uniform(-1, 1);

  auto f = [](const Matrix& m) {
    double acc = 0.0;
    for (double v : m.data()) acc += v * v;
    return acc;
  };
  const Matrix analytic = scale(theta, 2.0);
  const GradCheckReport report = grad_check(f, analytic, theta);
  CHECK(report.max_rel_err < 1e-7);
}

TEST_CASE("grad_check of a constant function is exactly zero") {
  const Matrix theta(2, 2, 0.7);
  auto f = [](const Matrix&) { return 42.0; };
  const GradCheckReport report = grad_check(f, Matrix(2, 2, 0.0), theta);
  CHECK(report.max_rel_err == 0.0);
}

TEST_CASE("grad_check verifies the weighted BCE gradient on a random batch") {
  Rng rng(33);
  Matrix logits(8, 10);
  for (std::size_t i = 0; i < logits.size(); ++i) logits.at(i) = rng.uniform(-2, 2);
  Matrix y(8, 10);
  for (std::size_t i = 0; i < y.size(); ++i) {
    y.at(i) = rng.next_double() < 0.4 ? 1.0 : 0.0;
  }
  const LabelMatrix labels(std::move(y));
  LossConfig cfg;
  const std::vector<double> weights =
      class_weights(labels, cfg);

  auto f = [&](const Matrix& theta) {
    return loss_basis(PredictionMatrix::from_logits(theta), labels, weights);
  };
  const Matrix analytic =
      component_with_logit_grad(LossComponent::Basis,
                                PredictionMatrix::from_logits(logits), labels,
                                Matrix(8, 3, 0.0), cfg)
          .second;
  const GradCheckReport report = grad_check(f, analytic, logits);
  CHECK(report.max_rel_err < 1e-4);
}

TEST_CASE("grad_check rejects non-finite function values") {
  const Matrix theta(1, 1, 0.0);
  auto f = [](const Matrix&) { return std::numeric_limits<double>::infinity(); };
  CHECK_THROWS_AS(grad_check(f, Matrix(1, 1, 0.0), theta), NonFiniteFunctionValue);
}

TEST_CASE("grad_check rejects shape mismatches") {
  auto f = [](const Matrix&) { return 0.0; };
  CHECK_THROWS_AS(grad_check(f, Matrix(2, 2, 0.0), Matrix(1, 2, 0.0)),
                  ShapeMismatch);
}
