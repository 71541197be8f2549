// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "odor/data.hpp"
#include "odor/hmfm.hpp"
#include "odor/matrix.hpp"

namespace odor {

class EmptyBatch : public std::runtime_error {
 public:
  explicit EmptyBatch(const std::string& what) : std::runtime_error(what) {}
};

struct ModelConfig {
  enum class Mode { Mlp, Graph };
  Mode mode = Mode::Mlp;
  std::vector<std::size_t> hidden_dims = {64, 64};
  std::size_t hmfm_half_dim = 32;  // D
  double hmfm_sigma_prime = 1.0;
  bool hmfm_identity_projection = false;
  std::size_t graph_rounds = 2;
  std::size_t feature_dim = kAtomFeatureCount;  // A
  std::size_t label_count = 0;                  // M
  std::uint64_t seed = 0;
};

using NamedTensors = std::vector<std::pair<std::string, Matrix*>>;

/// A trainable backbone around the encoder. forward() caches activations for
/// the matching backward() call; gradients() is valid after backward().
class Model {
 public:
  virtual ~Model() = default;
  virtual Matrix forward(const std::vector<const Example*>& batch) = 0;
  virtual void backward(const Matrix& grad_logits) = 0;
  virtual NamedTensors parameters() = 0;
  virtual NamedTensors gradients() = 0;
  virtual const ModelConfig& config() const = 0;
};

/// Builds an initialized model; parameter values are a pure function of the
/// config (including its seed).
std::unique_ptr<Model> make_model(const ModelConfig& cfg);

}  // namespace odor
