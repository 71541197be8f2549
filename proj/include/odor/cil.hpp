// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "odor/matrix.hpp"

namespace odor {

/// N x M binary targets. Construction validates that every entry is 0 or 1.
struct LabelMatrix {
  Matrix values;

  LabelMatrix() = default;
  explicit LabelMatrix(Matrix y);

  std::size_t batch_size() const { return values.rows(); }
  std::size_t label_count() const { return values.cols(); }
};

/// Probabilities are the sigmoid of the logits, clamped away from 0 and 1
/// before any logarithm.
struct PredictionMatrix {
  Matrix logits;
  Matrix probs;

  static PredictionMatrix from_logits(Matrix logits);
};

constexpr double kProbClamp = 1e-7;

enum class WeightScope { Batch, Global };
enum class SimMode { PairwiseCosine, FrobeniusLiteral };

struct LossConfig {
  double lambda1 = 0.3;  // structural similarity
  double lambda2 = 0.3;  // class energy
  double lambda3 = 0.5;  // sample energy
  double lambda4 = 0.3;  // label correlation
  double tau = 0.8;      // similarity threshold
  double cooccur = 0.2;  // energy-target co-occurrence coefficient
  double energy_base = 1.0;       // e1
  double energy_per_label = 1.0;  // e2
  double weight_clamp_lo = 0.1;
  double weight_clamp_hi = 10.0;
  WeightScope weight_scope = WeightScope::Batch;
  SimMode sim_mode = SimMode::PairwiseCosine;
  // Multiply each class hinge by its positive/negative count (the printed
  // form of the class-energy loss). Off gives the unscaled ablation variant.
  bool class_count_scaling = true;
  // Set by the trainer when weight_scope is Global: weights computed once
  // over the training split.
  std::optional<std::vector<double>> global_weights;
};

/// Per-class imbalance weights clamp((neg+1)/(pos+1), lo, hi). Honors
/// global_weights when the scope says so.
std::vector<double> class_weights(const LabelMatrix& y, const LossConfig& cfg);

/// Weighted binary cross-entropy, averaged over the batch.
double loss_basis(const PredictionMatrix& pred, const LabelMatrix& y,
                  const std::vector<double>& weights);

/// Structural-similarity consistency: mean predicted-row distance over
/// molecule pairs whose feature similarity exceeds tau.
double loss_stt(const PredictionMatrix& pred, const Matrix& mol_features,
                const LossConfig& cfg);

/// Batch-mean predicted probability per class.
std::vector<double> class_energy(const PredictionMatrix& pred);

struct EnergyTargets {
  std::vector<double> in_target;   // 1 + c * positive rate
  std::vector<double> out_target;  // c * (1 - positive rate)
};
EnergyTargets energy_targets(const LabelMatrix& y, const LossConfig& cfg);

/// Class-energy hinge loss against the co-occurrence-adjusted targets.
double loss_class(const PredictionMatrix& pred, const LabelMatrix& y,
                  const LossConfig& cfg);

/// Sample-level expected-energy hinge.
double loss_sample(const PredictionMatrix& pred, const LabelMatrix& y,
                   const LossConfig& cfg);

/// Squared Frobenius distance between predicted and target label Gram
/// matrices (both batch-averaged).
double loss_col(const PredictionMatrix& pred, const LabelMatrix& y);

struct LossBreakdown {
  double basis = 0.0;
  double stt = 0.0;
  double class_energy = 0.0;
  double sample = 0.0;
  double col = 0.0;
  double total = 0.0;
  Matrix grad_logits;  // d total / d logits
};

/// All five components plus the weighted total and its analytic gradient
/// with respect to the logits.
LossBreakdown total_loss(const PredictionMatrix& pred, const LabelMatrix& y,
                         const Matrix& mol_features, const LossConfig& cfg);

enum class LossComponent { Basis, Stt, ClassEnergy, Sample, Col, Total };

const char* loss_component_name(LossComponent c);

/// Value and logit gradient of a single component; the verification suite
/// checks each against finite differences.
std::pair<double, Matrix> component_with_logit_grad(LossComponent component,
                                                    const PredictionMatrix& pred,
                                                    const LabelMatrix& y,
                                                    const Matrix& mol_features,
                                                    const LossConfig& cfg);

}  // namespace odor
