// SPDX-License-Identifier: Apache-2.0

#include "odor/hmfm.hpp"

#include <cmath>

namespace odor {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Matrix uniform_matrix(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.at(i) = rng.uniform(-bound, bound);
  return m;
}

// Forward pass with everything the backward pass needs.
struct Trace {
  Matrix imp_linear;   // N x A, pre-normalization
  Matrix imp_normed;   // N x A, (u - mean) / std, before gain/bias
  std::vector<double> inv_std;  // per row
  HmfmOutput out;
  Matrix projected;    // N x D input to the phase product
};

Trace run_forward(const Matrix& x, const HmfmParams& p) {
  if (x.cols() != p.input_dim()) {
    throw ShapeMismatch("hmfm: input has " + std::to_string(x.cols()) +
                        " columns, params expect " + std::to_string(p.input_dim()));
  }
  Trace t;
  t.imp_linear = add_row(matmul(x, p.imp_weight), p.imp_bias);

  const std::size_t n = x.rows();
  const std::size_t a = x.cols();
  t.imp_normed = Matrix(n, a);
  t.inv_std.resize(n);
  Matrix normed_affine(n, a);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < a; ++j) mean += t.imp_linear(i, j);
    mean /= static_cast<double>(a);
    double var = 0.0;
    for (std::size_t j = 0; j < a; ++j) {
      const double d = t.imp_linear(i, j) - mean;
      var += d * d;
    }
    var /= static_cast<double>(a);
    t.inv_std[i] = 1.0 / std::sqrt(var + kLayerNormEpsilon);
    for (std::size_t j = 0; j < a; ++j) {
      t.imp_normed(i, j) = (t.imp_linear(i, j) - mean) * t.inv_std[i];
      normed_affine(i, j) =
          t.imp_normed(i, j) * p.imp_norm_gain(0, j) + p.imp_norm_bias(0, j);
    }
  }

  t.out.importance = sigmoid(normed_affine);
  t.out.weighted = hadamard(x, t.out.importance);
  t.out.mod_coeff = sigmoid(add_row(matmul(t.out.weighted, p.mod_weight), p.mod_bias));
  t.out.modulated = mul_row(t.out.mod_coeff, p.base_freq);
  t.projected = p.identity_projection ? t.out.weighted
                                      : matmul(t.out.weighted, p.proj_weight);
  t.out.phase = hadamard(t.out.modulated, t.projected);

  const std::size_t d = p.half_dim();
  t.out.encoded = Matrix(n, 2 * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      t.out.encoded(i, j) = std::cos(t.out.phase(i, j));
      t.out.encoded(i, j + d) = std::sin(t.out.phase(i, j));
    }
  }
  return t;
}

}  // namespace

HmfmParams init_hmfm_params(const HmfmConfig& cfg, Rng& rng) {
  if (cfg.identity_projection && cfg.half_dim != cfg.input_dim) {
    throw ShapeMismatch("hmfm: identity projection requires half_dim == input_dim");
  }
  HmfmParams p;
  const double in_bound = 1.0 / std::sqrt(static_cast<double>(cfg.input_dim));
  p.imp_weight = uniform_matrix(cfg.input_dim, cfg.input_dim, in_bound, rng);
  p.imp_bias = Matrix(1, cfg.input_dim);
  p.imp_norm_gain = Matrix(1, cfg.input_dim, 1.0);
  p.imp_norm_bias = Matrix(1, cfg.input_dim);
  p.mod_weight = uniform_matrix(cfg.input_dim, cfg.half_dim, in_bound, rng);
  p.mod_bias = Matrix(1, cfg.half_dim);
  p.proj_weight = uniform_matrix(cfg.input_dim, cfg.half_dim, in_bound, rng);
  p.base_freq = Matrix(1, cfg.half_dim);
  for (std::size_t j = 0; j < cfg.half_dim; ++j) {
    p.base_freq(0, j) = kTwoPi * cfg.sigma_prime * static_cast<double>(j) /
                        static_cast<double>(cfg.half_dim);
  }
  p.sigma_prime = cfg.sigma_prime;
  p.identity_projection = cfg.identity_projection;
  return p;
}

Matrix importance_weights(const Matrix& x, const HmfmParams& p) {
  return run_forward(x, p).out.importance;
}

HmfmOutput encode(const Matrix& x, const HmfmParams& p) {
  return run_forward(x, p).out;
}

HmfmGradients encode_backward(const Matrix& x, const HmfmParams& p,
                              const Matrix& upstream) {
  const std::size_t n = x.rows();
  const std::size_t a = p.input_dim();
  const std::size_t d = p.half_dim();
  if (upstream.rows() != n || upstream.cols() != 2 * d) {
    throw ShapeMismatch("hmfm backward: upstream gradient must be Nx2D");
  }
  const Trace t = run_forward(x, p);

  // Through cos/sin into the phase.
  Matrix d_phase(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      d_phase(i, j) = -std::sin(t.out.phase(i, j)) * upstream(i, j) +
                      std::cos(t.out.phase(i, j)) * upstream(i, j + d);
    }
  }

  const Matrix d_modulated = hadamard(d_phase, t.projected);
  const Matrix d_projected = hadamard(d_phase, t.out.modulated);

  // Modulation branch: sigmoid then linear.
  Matrix d_mod_lin = mul_row(d_modulated, p.base_freq);
  for (std::size_t i = 0; i < d_mod_lin.size(); ++i) {
    const double f = t.out.mod_coeff.at(i);
    d_mod_lin.at(i) *= f * (1.0 - f);
  }

  HmfmGradients g;
  g.mod_weight = matmul(transpose(t.out.weighted), d_mod_lin);
  Matrix mod_bias_grad(1, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mod_bias_grad(0, j) += d_mod_lin(i, j);
  g.mod_bias = std::move(mod_bias_grad);

  Matrix d_weighted = matmul(d_mod_lin, transpose(p.mod_weight));
  if (p.identity_projection) {
    g.proj_weight = Matrix(a, d);
    d_weighted = add(d_weighted, d_projected);
  } else {
    g.proj_weight = matmul(transpose(t.out.weighted), d_projected);
    d_weighted = add(d_weighted, matmul(d_projected, transpose(p.proj_weight)));
  }

  // Through the gate product into the importance branch.
  const Matrix d_importance = hadamard(d_weighted, x);
  Matrix d_input = hadamard(d_weighted, t.out.importance);

  Matrix d_norm_affine = d_importance;
  for (std::size_t i = 0; i < d_norm_affine.size(); ++i) {
    const double w = t.out.importance.at(i);
    d_norm_affine.at(i) *= w * (1.0 - w);
  }

  Matrix gain_grad(1, a);
  Matrix norm_bias_grad(1, a);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < a; ++j) {
      gain_grad(0, j) += d_norm_affine(i, j) * t.imp_normed(i, j);
      norm_bias_grad(0, j) += d_norm_affine(i, j);
    }
  }
  g.imp_norm_gain = std::move(gain_grad);
  g.imp_norm_bias = std::move(norm_bias_grad);

  // Layer-norm backward with biased row variance:
  // d_u = inv_std * (d_xhat - mean(d_xhat) - xhat * mean(d_xhat * xhat))
  Matrix d_imp_linear(n, a);
  for (std::size_t i = 0; i < n; ++i) {
    double mean_dxh = 0.0;
    double mean_dxh_xh = 0.0;
    for (std::size_t j = 0; j < a; ++j) {
      const double dxh = d_norm_affine(i, j) * p.imp_norm_gain(0, j);
      mean_dxh += dxh;
      mean_dxh_xh += dxh * t.imp_normed(i, j);
    }
    mean_dxh /= static_cast<double>(a);
    mean_dxh_xh /= static_cast<double>(a);
    for (std::size_t j = 0; j < a; ++j) {
      const double dxh = d_norm_affine(i, j) * p.imp_norm_gain(0, j);
      d_imp_linear(i, j) =
          t.inv_std[i] * (dxh - mean_dxh - t.imp_normed(i, j) * mean_dxh_xh);
    }
  }

  g.imp_weight = matmul(transpose(x), d_imp_linear);
  Matrix imp_bias_grad(1, a);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < a; ++j) imp_bias_grad(0, j) += d_imp_linear(i, j);
  g.imp_bias = std::move(imp_bias_grad);

  d_input = add(d_input, matmul(d_imp_linear, transpose(p.imp_weight)));
  g.input = std::move(d_input);
  return g;
}

}  // namespace odor
