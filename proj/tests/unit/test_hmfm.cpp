// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "odor/gradcheck.hpp"
#include "odor/hmfm.hpp"
#include "support/oracles.hpp"

using namespace odor;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.at(i) = rng.uniform(lo, hi);
  return m;
}

HmfmParams zero_params(std::size_t a, std::size_t d, double sigma_prime) {
  Rng rng(0);
  HmfmParams p = init_hmfm_params({a, d, sigma_prime, false}, rng);
  p.imp_weight = Matrix(a, a);
  p.imp_bias = Matrix(1, a);
  p.mod_weight = Matrix(a, d);
  p.mod_bias = Matrix(1, d);
  p.proj_weight = Matrix(a, d);
  return p;
}

test_oracle::NaiveHmfmInputs to_oracle(const Matrix& x, const HmfmParams& p) {
  test_oracle::NaiveHmfmInputs in;
  auto rows_of = [](const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
    return rows;
  };
  in.x = rows_of(x);
  in.imp_w = rows_of(p.imp_weight);
  in.imp_b = p.imp_bias.data();
  in.norm_gain = p.imp_norm_gain.data();
  in.norm_bias = p.imp_norm_bias.data();
  in.mod_w = rows_of(p.mod_weight);
  in.mod_b = p.mod_bias.data();
  in.proj_w = rows_of(p.proj_weight);
  in.sigma_prime = p.sigma_prime;
  in.identity_projection = p.identity_projection;
  return in;
}

}  // namespace

TEST_CASE("base frequencies follow the ladder and never train") {
  Rng rng(1);
  const HmfmParams p = init_hmfm_params({5, 8, 1.5, false}, rng);
  REQUIRE(p.base_freq.cols() == 8);
  CHECK(p.base_freq(0, 0) == 0.0);
  const double pi = std::acos(-1.0);
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(p.base_freq(0, j) ==
          doctest::Approx(2.0 * pi * 1.5 * double(j) / 8.0).epsilon(1e-15));
    if (j > 0) CHECK(p.base_freq(0, j) > p.base_freq(0, j - 1));
  }
}

TEST_CASE("zero parameters gate everything at one half") {
  const HmfmParams p = zero_params(4, 6, 1.0);
  Rng rng(2);
  const Matrix x = random_matrix(3, 4, rng);
  const Matrix gates = importance_weights(x, p);
  for (double v : gates.data()) CHECK(v == 0.5);
}

TEST_CASE("importance weights stay strictly inside (0,1)") {
  Rng rng(3);
  const HmfmParams p = init_hmfm_params({6, 10, 1.0, false}, rng);
  const Matrix x = random_matrix(8, 6, rng, -5.0, 5.0);
  const Matrix gates = importance_weights(x, p);
  for (double v : gates.data()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("zero input collapses to the cos/sin constant pattern") {
  Rng rng(4);
  const HmfmParams p = init_hmfm_params({5, 7, 1.0, false}, rng);
  const HmfmOutput out = encode(Matrix(3, 5, 0.0), p);
  REQUIRE(out.encoded.cols() == 14);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 7; ++j) {
      CHECK(out.encoded(i, j) == 1.0);
      CHECK(out.encoded(i, j + 7) == 0.0);
    }
  }
}

TEST_CASE("sigma' of zero collapses the output regardless of input") {
  Rng rng(5);
  const HmfmParams p = init_hmfm_params({5, 7, 0.0, false}, rng);
  const Matrix x = random_matrix(4, 5, rng, -3.0, 3.0);
  const HmfmOutput out = encode(x, p);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 7; ++j) {
      CHECK(out.encoded(i, j) == 1.0);
      CHECK(out.encoded(i, j + 7) == 0.0);
    }
  }
}

TEST_CASE("encode matches the independent step-by-step recomputation") {
  Rng rng(6);
  const HmfmParams p = init_hmfm_params({3, 4, 1.0, false}, rng);
  const Matrix x = random_matrix(2, 3, rng);
  const HmfmOutput out = encode(x, p);
  const auto oracle = test_oracle::naive_hmfm_encode(to_oracle(x, p));
  REQUIRE(out.encoded.rows() == 2);
  REQUIRE(out.encoded.cols() == 8);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      CHECK(out.encoded(i, j) == doctest::Approx(oracle[i][j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("identity projection matches the oracle when D equals A") {
  Rng rng(7);
  const HmfmParams p = init_hmfm_params({4, 4, 1.0, true}, rng);
  const Matrix x = random_matrix(3, 4, rng);
  const HmfmOutput out = encode(x, p);
  const auto oracle = test_oracle::naive_hmfm_encode(to_oracle(x, p));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      CHECK(out.encoded(i, j) == doctest::Approx(oracle[i][j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("identity projection requires D == A") {
  Rng rng(8);
  CHECK_THROWS_AS(init_hmfm_params({4, 6, 1.0, true}, rng), ShapeMismatch);
}

TEST_CASE("output is bounded with the Pythagorean identity per pair") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const HmfmParams p = init_hmfm_params({6, 9, rng.uniform(0.0, 3.0), false}, rng);
    const Matrix x = random_matrix(4, 6, rng, -4.0, 4.0);
    const HmfmOutput out = encode(x, p);
    REQUIRE(out.encoded.cols() == 18);
    for (std::size_t i = 0; i < out.encoded.rows(); ++i) {
      for (std::size_t j = 0; j < 9; ++j) {
        const double c = out.encoded(i, j);
        const double s = out.encoded(i, j + 9);
        CHECK(c >= -1.0);
        CHECK(c <= 1.0);
        CHECK(s >= -1.0);
        CHECK(s <= 1.0);
        CHECK(std::fabs(c * c + s * s - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("encode is bitwise deterministic") {
  Rng rng(10);
  const HmfmParams p = init_hmfm_params({5, 6, 1.0, false}, rng);
  const Matrix x = random_matrix(3, 5, rng);
  const HmfmOutput a = encode(x, p);
  const HmfmOutput b = encode(x, p);
  for (std::size_t i = 0; i < a.encoded.size(); ++i) {
    CHECK(a.encoded.at(i) == b.encoded.at(i));
  }
}

TEST_CASE("zero upstream gradient zeroes every parameter gradient") {
  Rng rng(11);
  const HmfmParams p = init_hmfm_params({4, 5, 1.0, false}, rng);
  const Matrix x = random_matrix(3, 4, rng);
  const HmfmGradients g = encode_backward(x, p, Matrix(3, 10, 0.0));
  for (const Matrix* m :
       {&g.input, &g.imp_weight, &g.imp_bias, &g.imp_norm_gain, &g.imp_norm_bias,
        &g.mod_weight, &g.mod_bias, &g.proj_weight}) {
    for (double v : m->data()) CHECK(v == 0.0);
  }
}

TEST_CASE("sigma' of zero kills the projection gradient") {
  Rng rng(12);
  const HmfmParams p = init_hmfm_params({4, 5, 0.0, false}, rng);
  const Matrix x = random_matrix(3, 4, rng);
  const Matrix upstream = random_matrix(3, 10, rng);
  const HmfmGradients g = encode_backward(x, p, upstream);
  for (double v : g.proj_weight.data()) CHECK(v == 0.0);
}

TEST_CASE("backward matches finite differences for every tensor") {
  Rng rng(13);
  const HmfmParams params = init_hmfm_params({5, 6, 1.0, false}, rng);
  const Matrix x = random_matrix(4, 5, rng);
  const Matrix upstream = random_matrix(4, 12, rng);
  const HmfmGradients analytic = encode_backward(x, params, upstream);

  auto weighted_sum = [&](const HmfmParams& p) {
    const HmfmOutput out = encode(x, p);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.encoded.size(); ++i) {
      acc += out.encoded.at(i) * upstream.at(i);
    }
    return acc;
  };

  struct Case {
    Matrix HmfmParams::* member;
    const Matrix* grad;
  };
  for (const Case& c : {Case{&HmfmParams::imp_weight, &analytic.imp_weight},
                        Case{&HmfmParams::imp_bias, &analytic.imp_bias},
                        Case{&HmfmParams::imp_norm_gain, &analytic.imp_norm_gain},
                        Case{&HmfmParams::imp_norm_bias, &analytic.imp_norm_bias},
                        Case{&HmfmParams::mod_weight, &analytic.mod_weight},
                        Case{&HmfmParams::mod_bias, &analytic.mod_bias},
                        Case{&HmfmParams::proj_weight, &analytic.proj_weight}}) {
    HmfmParams probe = params;
    auto f = [&](const Matrix& theta) {
      probe.*(c.member) = theta;
      return weighted_sum(probe);
    };
    const GradCheckReport report = grad_check(f, *c.grad, params.*(c.member));
    CHECK(report.max_rel_err < 1e-4);
  }

  auto f_input = [&](const Matrix& xm) {
    const HmfmOutput out = encode(xm, params);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.encoded.size(); ++i) {
      acc += out.encoded.at(i) * upstream.at(i);
    }
    return acc;
  };
  const GradCheckReport input_report = grad_check(f_input, analytic.input, x);
  CHECK(input_report.max_rel_err < 1e-4);
}

TEST_CASE("backward rejects mis-shaped upstream gradients") {
  Rng rng(14);
  const HmfmParams p = init_hmfm_params({4, 5, 1.0, false}, rng);
  const Matrix x = random_matrix(3, 4, rng);
  CHECK_THROWS_AS(encode_backward(x, p, Matrix(3, 9, 0.0)), ShapeMismatch);
}
