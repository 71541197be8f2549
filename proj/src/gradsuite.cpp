// SPDX-License-Identifier: Apache-2.0

#include "odor/gradsuite.hpp"

#include <cmath>

#include "odor/cil.hpp"
#include "odor/hmfm.hpp"
#include "odor/model.hpp"
#include "odor/rng.hpp"

namespace odor {

namespace {

// Finite differences perturb logits by 1e-5; anything within this margin of
// a hinge boundary could flip its active set mid-check.
constexpr double kKinkMargin = 1e-3;

struct SuiteInputs {
  Matrix logits;
  LabelMatrix labels;
  Matrix mol_features;
  bool nudged = false;
};

bool kink_free(const Matrix& logits, const LabelMatrix& y, const LossConfig& cfg) {
  const PredictionMatrix pred = PredictionMatrix::from_logits(logits);
  const std::size_t n = pred.probs.rows();
  const std::size_t m = pred.probs.cols();

  // Class-energy hinges.
  const EnergyTargets targets = energy_targets(y, cfg);
  const std::vector<double> energy = class_energy(pred);
  for (std::size_t j = 0; j < m; ++j) {
    if (std::fabs(energy[j] - targets.in_target[j]) < kKinkMargin) return false;
    if (std::fabs(energy[j] - targets.out_target[j]) < kKinkMargin) return false;
  }

  // Sample-energy hinges.
  const std::vector<double> prob_sums = row_sums(pred.probs);
  const std::vector<double> label_counts = row_sums(y.values);
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = cfg.energy_base + cfg.energy_per_label * label_counts[i];
    if (std::fabs(expected - prob_sums[i]) < kKinkMargin) return false;
  }

  // Row distances behind the similarity loss (the norm is non-smooth at 0).
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dist_sq = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double d = pred.probs(i, k) - pred.probs(j, k);
        dist_sq += d * d;
      }
      if (std::sqrt(dist_sq) < kKinkMargin) return false;
    }
  }
  return true;
}

// Inputs are drawn so every component has a nonzero value: some label
// columns get strongly negative logits (activating the class-energy
// under-hinge and the sample hinge) and some molecule rows are near
// duplicates (putting pairs above the similarity threshold).
SuiteInputs draw_inputs(Rng& rng, const GradSuiteDims& dims, const LossConfig& cfg) {
  SuiteInputs inputs;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<bool> rare(dims.labels);
    std::size_t rare_count = 0;
    for (std::size_t j = 0; j < dims.labels; ++j) {
      rare[j] = rng.next_double() < 0.4;
      rare_count += rare[j] ? 1 : 0;
    }
    if (rare_count == 0 || rare_count == dims.labels) continue;

    Matrix logits(dims.batch, dims.labels);
    for (std::size_t i = 0; i < dims.batch; ++i) {
      for (std::size_t j = 0; j < dims.labels; ++j) {
        logits(i, j) = rare[j] ? rng.uniform(-6.0, -3.0) : rng.uniform(-2.0, 2.0);
      }
    }
    Matrix y(dims.batch, dims.labels);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y.at(i) = rng.next_double() < 0.5 ? 1.0 : 0.0;
    }
    Matrix s(dims.batch, dims.mol_features);
    for (std::size_t i = 0; i < dims.batch; ++i) {
      if (i > 0 && rng.next_double() < 0.5) {
        const std::size_t src = static_cast<std::size_t>(rng.next_below(i));
        for (std::size_t k = 0; k < dims.mol_features; ++k) {
          s(i, k) = s(src, k) + rng.uniform(-0.02, 0.02);
        }
      } else {
        for (std::size_t k = 0; k < dims.mol_features; ++k) {
          s(i, k) = rng.uniform(-1.0, 1.0);
        }
      }
    }

    LabelMatrix labels(std::move(y));
    if (!kink_free(logits, labels, cfg)) continue;

    const PredictionMatrix pred = PredictionMatrix::from_logits(logits);
    if (loss_stt(pred, s, cfg) <= 0.0) continue;
    if (loss_class(pred, labels, cfg) <= 0.0) continue;
    if (loss_sample(pred, labels, cfg) <= 0.0) continue;

    inputs.logits = std::move(logits);
    inputs.labels = std::move(labels);
    inputs.mol_features = std::move(s);
    inputs.nudged = attempt > 0;
    return inputs;
  }
  throw NonFiniteFunctionValue("gradient suite: could not find kink-free inputs");
}

GradSuiteItem check_component(LossComponent component, const SuiteInputs& inputs,
                              const LossConfig& cfg) {
  auto value_of = [&](const Matrix& logits) {
    const PredictionMatrix pred = PredictionMatrix::from_logits(logits);
    return component_with_logit_grad(component, pred, inputs.labels,
                                     inputs.mol_features, cfg)
        .first;
  };
  const PredictionMatrix pred = PredictionMatrix::from_logits(inputs.logits);
  const Matrix analytic =
      component_with_logit_grad(component, pred, inputs.labels,
                                inputs.mol_features, cfg)
          .second;
  GradSuiteItem item;
  item.name = std::string("cil.") + loss_component_name(component);
  item.report = grad_check(value_of, analytic, inputs.logits);
  item.nudged = inputs.nudged;
  return item;
}

}  // namespace

GradSuiteResult run_gradient_suite(std::uint64_t seed, const GradSuiteDims& dims,
                                   double sigma_prime) {
  Rng rng(seed);
  LossConfig cfg;
  GradSuiteResult result;

  const SuiteInputs inputs = draw_inputs(rng, dims, cfg);
  for (LossComponent component :
       {LossComponent::Basis, LossComponent::Stt, LossComponent::ClassEnergy,
        LossComponent::Sample, LossComponent::Col, LossComponent::Total}) {
    result.items.push_back(check_component(component, inputs, cfg));
  }

  // Encoder gradients: a fixed random functional of the encoded output makes
  // the check scalar-valued.
  HmfmConfig hc{dims.input_dim, dims.half_dim, sigma_prime, false};
  const HmfmParams params = init_hmfm_params(hc, rng);
  Matrix x(dims.batch, dims.input_dim);
  for (std::size_t i = 0; i < x.size(); ++i) x.at(i) = rng.uniform(-1.0, 1.0);
  Matrix upstream(dims.batch, 2 * dims.half_dim);
  for (std::size_t i = 0; i < upstream.size(); ++i) {
    upstream.at(i) = rng.uniform(-1.0, 1.0);
  }

  const HmfmGradients analytic = encode_backward(x, params, upstream);
  struct TensorCase {
    const char* name;
    Matrix HmfmParams::* member;
    const Matrix* grad;
  };
  const TensorCase cases[] = {
      {"hmfm.imp_weight", &HmfmParams::imp_weight, &analytic.imp_weight},
      {"hmfm.imp_bias", &HmfmParams::imp_bias, &analytic.imp_bias},
      {"hmfm.imp_norm_gain", &HmfmParams::imp_norm_gain, &analytic.imp_norm_gain},
      {"hmfm.imp_norm_bias", &HmfmParams::imp_norm_bias, &analytic.imp_norm_bias},
      {"hmfm.mod_weight", &HmfmParams::mod_weight, &analytic.mod_weight},
      {"hmfm.mod_bias", &HmfmParams::mod_bias, &analytic.mod_bias},
      {"hmfm.proj_weight", &HmfmParams::proj_weight, &analytic.proj_weight},
  };
  for (const TensorCase& c : cases) {
    HmfmParams perturbed = params;
    auto value_of = [&](const Matrix& theta) {
      perturbed.*(c.member) = theta;
      const HmfmOutput out = encode(x, perturbed);
      double acc = 0.0;
      for (std::size_t i = 0; i < out.encoded.size(); ++i) {
        acc += out.encoded.at(i) * upstream.at(i);
      }
      return acc;
    };
    GradSuiteItem item;
    item.name = c.name;
    item.report = grad_check(value_of, *c.grad, params.*(c.member));
    result.items.push_back(std::move(item));
  }
  return result;
}

GradSuiteResult run_end_to_end_suite(std::uint64_t seed) {
  Rng rng(seed);
  constexpr std::size_t kBatch = 4;
  constexpr std::size_t kLabels = 6;

  ModelConfig mcfg;
  mcfg.mode = ModelConfig::Mode::Mlp;
  mcfg.hidden_dims = {8};
  mcfg.hmfm_half_dim = 8;
  mcfg.label_count = kLabels;
  mcfg.seed = seed;

  std::vector<Example> examples(kBatch);
  std::vector<const Example*> batch;
  for (Example& ex : examples) {
    ex.pooled = Matrix(1, mcfg.feature_dim);
    for (std::size_t j = 0; j < mcfg.feature_dim; ++j) {
      ex.pooled(0, j) = rng.uniform(-1.0, 1.0);
    }
    ex.labels.resize(kLabels);
    for (double& l : ex.labels) l = rng.next_double() < 0.4 ? 1.0 : 0.0;
    batch.push_back(&ex);
  }
  Matrix y(kBatch, kLabels);
  for (std::size_t i = 0; i < kBatch; ++i)
    for (std::size_t j = 0; j < kLabels; ++j) y(i, j) = examples[i].labels[j];
  const LabelMatrix labels(std::move(y));
  const Matrix mol_features = stack_pooled(batch);
  LossConfig lcfg;

  const auto model = make_model(mcfg);
  auto loss_value = [&]() {
    const PredictionMatrix pred =
        PredictionMatrix::from_logits(model->forward(batch));
    return total_loss(pred, labels, mol_features, lcfg).total;
  };

  // Backprop once to populate analytic gradients.
  {
    const PredictionMatrix pred =
        PredictionMatrix::from_logits(model->forward(batch));
    const LossBreakdown breakdown = total_loss(pred, labels, mol_features, lcfg);
    model->backward(breakdown.grad_logits);
  }

  GradSuiteResult result;
  const NamedTensors params = model->parameters();
  const NamedTensors grads = model->gradients();
  for (std::size_t t = 0; t < params.size(); ++t) {
    Matrix* tensor = params[t].second;
    auto value_of = [&](const Matrix& theta) {
      *tensor = theta;
      return loss_value();
    };
    const Matrix saved = *tensor;
    GradSuiteItem item;
    item.name = "mlp_end_to_end." + params[t].first;
    item.report = grad_check(value_of, *grads[t].second, saved);
    *tensor = saved;
    result.items.push_back(std::move(item));
  }
  return result;
}

}  // namespace odor
