// SPDX-License-Identifier: Apache-2.0

#include "odor/cil.hpp"

#include <algorithm>
#include <cmath>

namespace odor {

namespace {

struct ValueGrad {
  double value = 0.0;
  Matrix grad_probs;  // same shape as probs
};

void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
  if (!a.same_shape(b)) {
    throw ShapeMismatch(std::string(where) + ": shapes " + std::to_string(a.rows()) +
                        "x" + std::to_string(a.cols()) + " vs " +
                        std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

ValueGrad basis_with_grad(const PredictionMatrix& pred, const LabelMatrix& y,
                          const std::vector<double>& weights) {
  const Matrix& p = pred.probs;
  require_same_shape(p, y.values, "loss_basis");
  if (weights.size() != p.cols()) {
    throw ShapeMismatch("loss_basis: weight vector length " +
                        std::to_string(weights.size()) + " != " +
                        std::to_string(p.cols()) + " labels");
  }
  const double n = static_cast<double>(p.rows());
  ValueGrad out;
  out.grad_probs = Matrix(p.rows(), p.cols());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < p.cols(); ++j) {
      const double target = y.values(i, j);
      const double prob = p(i, j);
      const double w = weights[j];
      acc += w * (target * std::log(prob) + (1.0 - target) * std::log(1.0 - prob));
      out.grad_probs(i, j) =
          -(w / n) * (target / prob - (1.0 - target) / (1.0 - prob));
    }
  }
  out.value = -acc / n;
  return out;
}

// 0/1 indicator of pairs whose similarity exceeds tau, diagonal excluded.
std::vector<std::vector<int>> similar_pair_counts(const Matrix& s,
                                                  const LossConfig& cfg) {
  const std::size_t n = s.rows();
  std::vector<std::vector<int>> counts(n, std::vector<int>(n, 0));
  if (cfg.sim_mode == SimMode::PairwiseCosine) {
    std::vector<double> norms(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double sq = 0.0;
      for (std::size_t k = 0; k < s.cols(); ++k) sq += s(i, k) * s(i, k);
      norms[i] = std::sqrt(sq);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < s.cols(); ++k) dot += s(i, k) * s(j, k);
        const double sim = dot / (norms[i] * norms[j] + 1e-12);
        if (sim > cfg.tau) counts[i][j] = counts[j][i] = 1;
      }
    }
  } else {
    // The printed formula: S S^T divided by the squared Frobenius norm of S.
    const double denom = frobenius_sq(s);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        double dot = 0.0;
        for (std::size_t k = 0; k < s.cols(); ++k) dot += s(i, k) * s(j, k);
        if (dot / (denom + 1e-12) > cfg.tau) counts[i][j] = 1;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) counts[i][i] = 0;
  return counts;
}

ValueGrad stt_with_grad(const PredictionMatrix& pred, const Matrix& s,
                        const LossConfig& cfg) {
  const Matrix& p = pred.probs;
  if (s.rows() != p.rows()) {
    throw ShapeMismatch("loss_stt: molecule features have " +
                        std::to_string(s.rows()) + " rows, predictions " +
                        std::to_string(p.rows()));
  }
  const std::size_t n = p.rows();
  const double inv_n2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  const auto mask = similar_pair_counts(s, cfg);

  ValueGrad out;
  out.grad_probs = Matrix(p.rows(), p.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int pair_count = mask[i][j] + mask[j][i];
      if (pair_count == 0) continue;
      double dist_sq = 0.0;
      for (std::size_t k = 0; k < p.cols(); ++k) {
        const double d = p(i, k) - p(j, k);
        dist_sq += d * d;
      }
      const double dist = std::sqrt(dist_sq);
      out.value += pair_count * dist * inv_n2;
      if (dist > 0.0) {
        const double coeff = pair_count * inv_n2 / dist;
        for (std::size_t k = 0; k < p.cols(); ++k) {
          const double d = p(i, k) - p(j, k);
          out.grad_probs(i, k) += coeff * d;
          out.grad_probs(j, k) -= coeff * d;
        }
      }
    }
  }
  return out;
}

std::vector<double> positive_rates(const LabelMatrix& y) {
  std::vector<double> rates = col_sums(y.values);
  for (double& r : rates) r /= static_cast<double>(y.batch_size());
  return rates;
}

ValueGrad class_with_grad(const PredictionMatrix& pred, const LabelMatrix& y,
                          const LossConfig& cfg) {
  const Matrix& p = pred.probs;
  require_same_shape(p, y.values, "loss_class");
  const std::size_t n = p.rows();
  const std::size_t m = p.cols();
  const EnergyTargets targets = energy_targets(y, cfg);
  const std::vector<double> energy = col_means(p);
  const std::vector<double> pos_counts = col_sums(y.values);

  ValueGrad out;
  out.grad_probs = Matrix(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    const double n_pos = cfg.class_count_scaling ? pos_counts[j] : 1.0;
    const double n_neg =
        cfg.class_count_scaling ? static_cast<double>(n) - pos_counts[j] : 1.0;
    const double over = std::max(0.0, energy[j] - targets.in_target[j]);
    const double under = std::max(0.0, targets.out_target[j] - energy[j]);
    out.value += n_pos * over * over + n_neg * under * under;
    const double d_energy = 2.0 * (n_pos * over - n_neg * under);
    if (d_energy != 0.0) {
      const double per_entry = d_energy / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) out.grad_probs(i, j) = per_entry;
    }
  }
  return out;
}

ValueGrad sample_with_grad(const PredictionMatrix& pred, const LabelMatrix& y,
                           const LossConfig& cfg) {
  const Matrix& p = pred.probs;
  require_same_shape(p, y.values, "loss_sample");
  const std::size_t n = p.rows();
  const std::vector<double> label_counts = row_sums(y.values);
  const std::vector<double> prob_sums = row_sums(p);

  ValueGrad out;
  out.grad_probs = Matrix(p.rows(), p.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = cfg.energy_base + cfg.energy_per_label * label_counts[i];
    const double gap = expected - prob_sums[i];
    if (gap > 0.0) {
      out.value += gap * gap / static_cast<double>(n);
      const double d = -2.0 * gap / static_cast<double>(n);
      for (std::size_t j = 0; j < p.cols(); ++j) out.grad_probs(i, j) = d;
    }
  }
  return out;
}

ValueGrad col_with_grad(const PredictionMatrix& pred, const LabelMatrix& y) {
  const Matrix& p = pred.probs;
  require_same_shape(p, y.values, "loss_col");
  const double n = static_cast<double>(p.rows());
  const Matrix pred_gram = scale(matmul(transpose(p), p), 1.0 / n);
  const Matrix label_gram = scale(matmul(transpose(y.values), y.values), 1.0 / n);
  const Matrix diff = sub(pred_gram, label_gram);

  ValueGrad out;
  out.value = frobenius_sq(diff);
  out.grad_probs = scale(matmul(p, diff), 4.0 / n);
  return out;
}

// d prob / d logit, zero where the clamp is active.
Matrix prob_logit_slope(const Matrix& logits) {
  Matrix slope = sigmoid(logits);
  for (std::size_t i = 0; i < slope.size(); ++i) {
    const double raw = slope.at(i);
    slope.at(i) = (raw > kProbClamp && raw < 1.0 - kProbClamp)
                      ? raw * (1.0 - raw)
                      : 0.0;
  }
  return slope;
}

ValueGrad component_value_grad(LossComponent component, const PredictionMatrix& pred,
                               const LabelMatrix& y, const Matrix& mol_features,
                               const LossConfig& cfg) {
  switch (component) {
    case LossComponent::Basis:
      return basis_with_grad(pred, y, class_weights(y, cfg));
    case LossComponent::Stt:
      return stt_with_grad(pred, mol_features, cfg);
    case LossComponent::ClassEnergy:
      return class_with_grad(pred, y, cfg);
    case LossComponent::Sample:
      return sample_with_grad(pred, y, cfg);
    case LossComponent::Col:
      return col_with_grad(pred, y);
    case LossComponent::Total:
      break;
  }
  throw std::logic_error("component_value_grad: Total handled by total_loss");
}

}  // namespace

LabelMatrix::LabelMatrix(Matrix y) : values(std::move(y)) {
  for (double v : values.data()) {
    if (v != 0.0 && v != 1.0) {
      throw ShapeMismatch("LabelMatrix: entries must be 0 or 1");
    }
  }
}

PredictionMatrix PredictionMatrix::from_logits(Matrix logits) {
  PredictionMatrix pred;
  pred.probs = sigmoid(logits);
  for (std::size_t i = 0; i < pred.probs.size(); ++i) {
    pred.probs.at(i) = std::clamp(pred.probs.at(i), kProbClamp, 1.0 - kProbClamp);
  }
  pred.logits = std::move(logits);
  return pred;
}

std::vector<double> class_weights(const LabelMatrix& y, const LossConfig& cfg) {
  if (cfg.weight_scope == WeightScope::Global && cfg.global_weights) {
    if (cfg.global_weights->size() != y.label_count()) {
      throw ShapeMismatch("class_weights: global weight length mismatch");
    }
    return *cfg.global_weights;
  }
  const std::size_t n = y.batch_size();
  std::vector<double> weights(y.label_count());
  const std::vector<double> pos = col_sums(y.values);
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double neg = static_cast<double>(n) - pos[j];
    const double ratio = (neg + 1.0) / (pos[j] + 1.0);  // add-one smoothing
    weights[j] = std::clamp(ratio, cfg.weight_clamp_lo, cfg.weight_clamp_hi);
  }
  return weights;
}

double loss_basis(const PredictionMatrix& pred, const LabelMatrix& y,
                  const std::vector<double>& weights) {
  return basis_with_grad(pred, y, weights).value;
}

double loss_stt(const PredictionMatrix& pred, const Matrix& mol_features,
                const LossConfig& cfg) {
  return stt_with_grad(pred, mol_features, cfg).value;
}

std::vector<double> class_energy(const PredictionMatrix& pred) {
  return col_means(pred.probs);
}

EnergyTargets energy_targets(const LabelMatrix& y, const LossConfig& cfg) {
  const std::vector<double> rates = positive_rates(y);
  EnergyTargets targets;
  targets.in_target.resize(rates.size());
  targets.out_target.resize(rates.size());
  for (std::size_t j = 0; j < rates.size(); ++j) {
    targets.in_target[j] = 1.0 + cfg.cooccur * rates[j];
    targets.out_target[j] = cfg.cooccur * (1.0 - rates[j]);
  }
  return targets;
}

double loss_class(const PredictionMatrix& pred, const LabelMatrix& y,
                  const LossConfig& cfg) {
  return class_with_grad(pred, y, cfg).value;
}

double loss_sample(const PredictionMatrix& pred, const LabelMatrix& y,
                   const LossConfig& cfg) {
  return sample_with_grad(pred, y, cfg).value;
}

double loss_col(const PredictionMatrix& pred, const LabelMatrix& y) {
  return col_with_grad(pred, y).value;
}

LossBreakdown total_loss(const PredictionMatrix& pred, const LabelMatrix& y,
                         const Matrix& mol_features, const LossConfig& cfg) {
  const ValueGrad basis = basis_with_grad(pred, y, class_weights(y, cfg));
  const ValueGrad stt = stt_with_grad(pred, mol_features, cfg);
  const ValueGrad cls = class_with_grad(pred, y, cfg);
  const ValueGrad sample = sample_with_grad(pred, y, cfg);
  const ValueGrad col = col_with_grad(pred, y);

  LossBreakdown out;
  out.basis = basis.value;
  out.stt = stt.value;
  out.class_energy = cls.value;
  out.sample = sample.value;
  out.col = col.value;
  out.total = basis.value + cfg.lambda1 * stt.value + cfg.lambda2 * cls.value +
              cfg.lambda3 * sample.value + cfg.lambda4 * col.value;

  Matrix grad_probs = basis.grad_probs;
  grad_probs = add(grad_probs, scale(stt.grad_probs, cfg.lambda1));
  grad_probs = add(grad_probs, scale(cls.grad_probs, cfg.lambda2));
  grad_probs = add(grad_probs, scale(sample.grad_probs, cfg.lambda3));
  grad_probs = add(grad_probs, scale(col.grad_probs, cfg.lambda4));
  out.grad_logits = hadamard(grad_probs, prob_logit_slope(pred.logits));
  return out;
}

const char* loss_component_name(LossComponent c) {
  switch (c) {
    case LossComponent::Basis: return "basis";
    case LossComponent::Stt: return "stt";
    case LossComponent::ClassEnergy: return "class";
    case LossComponent::Sample: return "sample";
    case LossComponent::Col: return "col";
    case LossComponent::Total: return "total";
  }
  return "?";
}

std::pair<double, Matrix> component_with_logit_grad(LossComponent component,
                                                    const PredictionMatrix& pred,
                                                    const LabelMatrix& y,
                                                    const Matrix& mol_features,
                                                    const LossConfig& cfg) {
  if (component == LossComponent::Total) {
    LossBreakdown breakdown = total_loss(pred, y, mol_features, cfg);
    return {breakdown.total, std::move(breakdown.grad_logits)};
  }
  ValueGrad vg = component_value_grad(component, pred, y, mol_features, cfg);
  return {vg.value, hadamard(vg.grad_probs, prob_logit_slope(pred.logits))};
}

}  // namespace odor
