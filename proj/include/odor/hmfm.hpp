// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "odor/matrix.hpp"
#include "odor/rng.hpp"

namespace odor {

struct HmfmConfig {
  std::size_t input_dim = 22;   // feature columns A
  std::size_t half_dim = 32;    // D; output width is 2D
  double sigma_prime = 1.0;
  bool identity_projection = false;  // requires half_dim == input_dim
};

/// Learnable state of the encoder. `base_freq` is fixed at construction
/// (entry j is 2*pi*sigma'*j/D) and never updated by training.
struct HmfmParams {
  Matrix imp_weight;      // A x A
  Matrix imp_bias;        // 1 x A
  Matrix imp_norm_gain;   // 1 x A
  Matrix imp_norm_bias;   // 1 x A
  Matrix mod_weight;      // A x D
  Matrix mod_bias;        // 1 x D
  Matrix proj_weight;     // A x D, bias-free; unused with identity projection
  Matrix base_freq;       // 1 x D, fixed
  double sigma_prime = 1.0;
  bool identity_projection = false;

  std::size_t input_dim() const { return imp_weight.rows(); }
  std::size_t half_dim() const { return base_freq.cols(); }
};

/// Linear weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero,
/// norm gain one.
HmfmParams init_hmfm_params(const HmfmConfig& cfg, Rng& rng);

struct HmfmOutput {
  Matrix encoded;      // N x 2D: [cos(phase) | sin(phase)]
  Matrix importance;   // N x A gate values in (0,1)
  Matrix weighted;     // N x A gated input
  Matrix mod_coeff;    // N x D frequency modulation in (0,1)
  Matrix modulated;    // N x D base frequency times modulation
  Matrix phase;        // N x D argument of cos/sin
};

/// Gate values sigmoid(layer_norm(linear(x))).
Matrix importance_weights(const Matrix& x, const HmfmParams& p);

/// Full encoder forward pass; every entry of `encoded` lies in [-1, 1].
HmfmOutput encode(const Matrix& x, const HmfmParams& p);

struct HmfmGradients {
  Matrix input;          // N x A
  Matrix imp_weight;
  Matrix imp_bias;
  Matrix imp_norm_gain;
  Matrix imp_norm_bias;
  Matrix mod_weight;
  Matrix mod_bias;
  Matrix proj_weight;    // zero with identity projection
};

/// Analytic gradients of encode() for an upstream N x 2D gradient. The fixed
/// base frequencies receive no gradient.
HmfmGradients encode_backward(const Matrix& x, const HmfmParams& p,
                              const Matrix& upstream);

}  // namespace odor
