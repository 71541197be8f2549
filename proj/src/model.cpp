// SPDX-License-Identifier: Apache-2.0

#include "odor/model.hpp"

#include <cmath>

namespace odor {

namespace {

Matrix uniform_matrix(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.at(i) = rng.uniform(-bound, bound);
  return m;
}

struct LinearLayer {
  Matrix w;  // in x out
  Matrix b;  // 1 x out
  Matrix w_grad, b_grad;
  Matrix input_cache;

  void init(std::size_t in, std::size_t out, Rng& rng) {
    w = uniform_matrix(in, out, 1.0 / std::sqrt(static_cast<double>(in)), rng);
    b = Matrix(1, out);
    w_grad = Matrix(in, out);
    b_grad = Matrix(1, out);
  }

  Matrix forward(const Matrix& x) {
    input_cache = x;
    return add_row(matmul(x, w), b);
  }

  Matrix backward(const Matrix& upstream) {
    w_grad = matmul(transpose(input_cache), upstream);
    b_grad = Matrix(1, upstream.cols());
    for (std::size_t i = 0; i < upstream.rows(); ++i)
      for (std::size_t j = 0; j < upstream.cols(); ++j)
        b_grad(0, j) += upstream(i, j);
    return matmul(upstream, transpose(w));
  }
};

Matrix relu(const Matrix& x) {
  Matrix out = x;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out.at(i) < 0.0) out.at(i) = 0.0;
  return out;
}

Matrix relu_backward(const Matrix& upstream, const Matrix& pre_activation) {
  Matrix out = upstream;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (pre_activation.at(i) <= 0.0) out.at(i) = 0.0;
  return out;
}

void zero(Matrix& m) {
  for (double& v : m.data()) v = 0.0;
}

void accumulate(Matrix& into, const Matrix& from) {
  if (into.empty()) {
    into = from;
    return;
  }
  for (std::size_t i = 0; i < into.size(); ++i) into.at(i) += from.at(i);
}

void append_hmfm_tensors(NamedTensors& out, HmfmParams& p, HmfmGradients& g,
                         bool params_not_grads) {
  auto push = [&](const char* name, Matrix& param, Matrix& grad) {
    out.emplace_back(name, params_not_grads ? &param : &grad);
  };
  push("hmfm.imp_weight", p.imp_weight, g.imp_weight);
  push("hmfm.imp_bias", p.imp_bias, g.imp_bias);
  push("hmfm.imp_norm_gain", p.imp_norm_gain, g.imp_norm_gain);
  push("hmfm.imp_norm_bias", p.imp_norm_bias, g.imp_norm_bias);
  push("hmfm.mod_weight", p.mod_weight, g.mod_weight);
  push("hmfm.mod_bias", p.mod_bias, g.mod_bias);
  if (!p.identity_projection) {
    push("hmfm.proj_weight", p.proj_weight, g.proj_weight);
  }
}

// Dense stack shared by both modes: hidden layers with ReLU, then a linear
// output head.
struct DenseStack {
  std::vector<LinearLayer> layers;
  std::vector<Matrix> pre_activations;  // for all but the last layer
  std::string name_prefix;

  void init(const std::string& prefix, std::size_t in,
            const std::vector<std::size_t>& hidden, std::size_t out, Rng& rng) {
    name_prefix = prefix;
    std::size_t width = in;
    for (std::size_t h : hidden) {
      LinearLayer layer;
      layer.init(width, h, rng);
      layers.push_back(std::move(layer));
      width = h;
    }
    LinearLayer head;
    head.init(width, out, rng);
    layers.push_back(std::move(head));
  }

  Matrix forward(Matrix x) {
    pre_activations.clear();
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
      Matrix z = layers[l].forward(x);
      pre_activations.push_back(z);
      x = relu(z);
    }
    return layers.back().forward(x);
  }

  Matrix backward(Matrix upstream) {
    upstream = layers.back().backward(upstream);
    for (std::size_t l = layers.size() - 1; l-- > 0;) {
      upstream = relu_backward(upstream, pre_activations[l]);
      upstream = layers[l].backward(upstream);
    }
    return upstream;
  }

  void collect(NamedTensors& out, bool params_not_grads) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string base = name_prefix + ".layer" + std::to_string(l);
      out.emplace_back(base + ".weight",
                       params_not_grads ? &layers[l].w : &layers[l].w_grad);
      out.emplace_back(base + ".bias",
                       params_not_grads ? &layers[l].b : &layers[l].b_grad);
    }
  }
};

class MlpModel final : public Model {
 public:
  explicit MlpModel(const ModelConfig& cfg) : cfg_(cfg) {
    Rng rng(cfg.seed);
    HmfmConfig hc{cfg.feature_dim, cfg.hmfm_half_dim, cfg.hmfm_sigma_prime,
                  cfg.hmfm_identity_projection};
    hmfm_ = init_hmfm_params(hc, rng);
    stack_.init("mlp", 2 * cfg.hmfm_half_dim, cfg.hidden_dims, cfg.label_count, rng);
  }

  Matrix forward(const std::vector<const Example*>& batch) override {
    if (batch.empty()) throw EmptyBatch("forward: empty batch");
    input_ = stack_pooled(batch);
    return stack_.forward(encode(input_, hmfm_).encoded);
  }

  void backward(const Matrix& grad_logits) override {
    const Matrix grad_encoded = stack_.backward(grad_logits);
    hmfm_grads_ = encode_backward(input_, hmfm_, grad_encoded);
  }

  NamedTensors parameters() override {
    NamedTensors out;
    append_hmfm_tensors(out, hmfm_, hmfm_grads_, true);
    stack_.collect(out, true);
    return out;
  }

  NamedTensors gradients() override {
    NamedTensors out;
    append_hmfm_tensors(out, hmfm_, hmfm_grads_, false);
    stack_.collect(out, false);
    return out;
  }

  const ModelConfig& config() const override { return cfg_; }

 private:
  ModelConfig cfg_;
  HmfmParams hmfm_;
  HmfmGradients hmfm_grads_;
  DenseStack stack_;
  Matrix input_;
};

// Mean over the atom itself and its neighbors, per row.
Matrix neighbor_mean(const Matrix& h, const std::vector<std::vector<std::size_t>>& nb) {
  Matrix out(h.rows(), h.cols());
  for (std::size_t i = 0; i < h.rows(); ++i) {
    const double inv = 1.0 / static_cast<double>(1 + nb[i].size());
    for (std::size_t j = 0; j < h.cols(); ++j) {
      double acc = h(i, j);
      for (std::size_t k : nb[i]) acc += h(k, j);
      out(i, j) = acc * inv;
    }
  }
  return out;
}

Matrix neighbor_mean_transpose(const Matrix& upstream,
                               const std::vector<std::vector<std::size_t>>& nb) {
  Matrix out(upstream.rows(), upstream.cols());
  for (std::size_t i = 0; i < upstream.rows(); ++i) {
    const double inv = 1.0 / static_cast<double>(1 + nb[i].size());
    for (std::size_t j = 0; j < upstream.cols(); ++j) {
      const double g = upstream(i, j) * inv;
      out(i, j) += g;
      for (std::size_t k : nb[i]) out(k, j) += g;
    }
  }
  return out;
}

class GraphModel final : public Model {
 public:
  explicit GraphModel(const ModelConfig& cfg) : cfg_(cfg) {
    Rng rng(cfg.seed);
    HmfmConfig hc{cfg.feature_dim, cfg.hmfm_half_dim, cfg.hmfm_sigma_prime,
                  cfg.hmfm_identity_projection};
    hmfm_ = init_hmfm_params(hc, rng);
    const std::size_t width = 2 * cfg.hmfm_half_dim;
    rounds_.resize(cfg.graph_rounds);
    for (auto& layer : rounds_) layer.init(width, width, rng);
    head_.init("head", width, cfg.hidden_dims, cfg.label_count, rng);
  }

  Matrix forward(const std::vector<const Example*>& batch) override {
    if (batch.empty()) throw EmptyBatch("forward: empty batch");
    batch_ = batch;
    traces_.assign(batch.size(), {});
    const std::size_t width = 2 * cfg_.hmfm_half_dim;
    Matrix pooled(batch.size(), width);
    for (std::size_t m = 0; m < batch.size(); ++m) {
      MolTrace& trace = traces_[m];
      Matrix h = encode(batch[m]->atom_features, hmfm_).encoded;
      for (auto& layer : rounds_) {
        Matrix agg = neighbor_mean(h, batch[m]->neighbors);
        Matrix z = add_row(matmul(agg, layer.w), layer.b);
        trace.agg_inputs.push_back(std::move(agg));
        trace.pre_activations.push_back(z);
        h = relu(z);
      }
      const double inv = 1.0 / static_cast<double>(h.rows());
      for (std::size_t j = 0; j < width; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < h.rows(); ++i) acc += h(i, j);
        pooled(m, j) = acc * inv;
      }
      trace.atom_count = h.rows();
    }
    return head_.forward(pooled);
  }

  void backward(const Matrix& grad_logits) override {
    const Matrix grad_pooled = head_.backward(grad_logits);
    for (auto& layer : rounds_) {
      zero(layer.w_grad);
      zero(layer.b_grad);
    }
    hmfm_grads_ = HmfmGradients{};
    for (std::size_t m = 0; m < batch_.size(); ++m) {
      const MolTrace& trace = traces_[m];
      const double inv = 1.0 / static_cast<double>(trace.atom_count);
      Matrix grad_h(trace.atom_count, grad_pooled.cols());
      for (std::size_t i = 0; i < trace.atom_count; ++i)
        for (std::size_t j = 0; j < grad_pooled.cols(); ++j)
          grad_h(i, j) = grad_pooled(m, j) * inv;

      for (std::size_t r = rounds_.size(); r-- > 0;) {
        Matrix grad_z = relu_backward(grad_h, trace.pre_activations[r]);
        accumulate(rounds_[r].w_grad,
                   matmul(transpose(trace.agg_inputs[r]), grad_z));
        for (std::size_t i = 0; i < grad_z.rows(); ++i)
          for (std::size_t j = 0; j < grad_z.cols(); ++j)
            rounds_[r].b_grad(0, j) += grad_z(i, j);
        const Matrix grad_agg = matmul(grad_z, transpose(rounds_[r].w));
        grad_h = neighbor_mean_transpose(grad_agg, batch_[m]->neighbors);
      }

      HmfmGradients mol_grads =
          encode_backward(batch_[m]->atom_features, hmfm_, grad_h);
      accumulate(hmfm_grads_.imp_weight, mol_grads.imp_weight);
      accumulate(hmfm_grads_.imp_bias, mol_grads.imp_bias);
      accumulate(hmfm_grads_.imp_norm_gain, mol_grads.imp_norm_gain);
      accumulate(hmfm_grads_.imp_norm_bias, mol_grads.imp_norm_bias);
      accumulate(hmfm_grads_.mod_weight, mol_grads.mod_weight);
      accumulate(hmfm_grads_.mod_bias, mol_grads.mod_bias);
      accumulate(hmfm_grads_.proj_weight, mol_grads.proj_weight);
    }
  }

  NamedTensors parameters() override {
    NamedTensors out;
    append_hmfm_tensors(out, hmfm_, hmfm_grads_, true);
    for (std::size_t r = 0; r < rounds_.size(); ++r) {
      const std::string base = "graph.round" + std::to_string(r);
      out.emplace_back(base + ".weight", &rounds_[r].w);
      out.emplace_back(base + ".bias", &rounds_[r].b);
    }
    head_.collect(out, true);
    return out;
  }

  NamedTensors gradients() override {
    NamedTensors out;
    append_hmfm_tensors(out, hmfm_, hmfm_grads_, false);
    for (std::size_t r = 0; r < rounds_.size(); ++r) {
      const std::string base = "graph.round" + std::to_string(r);
      out.emplace_back(base + ".weight", &rounds_[r].w_grad);
      out.emplace_back(base + ".bias", &rounds_[r].b_grad);
    }
    head_.collect(out, false);
    return out;
  }

  const ModelConfig& config() const override { return cfg_; }

 private:
  struct MolTrace {
    std::vector<Matrix> agg_inputs;
    std::vector<Matrix> pre_activations;
    std::size_t atom_count = 0;
  };

  ModelConfig cfg_;
  HmfmParams hmfm_;
  HmfmGradients hmfm_grads_;
  std::vector<LinearLayer> rounds_;
  DenseStack head_;
  std::vector<const Example*> batch_;
  std::vector<MolTrace> traces_;
};

}  // namespace

std::unique_ptr<Model> make_model(const ModelConfig& cfg) {
  if (cfg.label_count == 0) {
    throw ShapeMismatch("make_model: label_count must be set");
  }
  if (cfg.hidden_dims.empty()) {
    throw ShapeMismatch("make_model: hidden_dims must be non-empty");
  }
  if (cfg.mode == ModelConfig::Mode::Graph) {
    return std::make_unique<GraphModel>(cfg);
  }
  return std::make_unique<MlpModel>(cfg);
}

}  // namespace odor
