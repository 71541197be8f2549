// SPDX-License-Identifier: Apache-2.0

#include "odor/trainer.hpp"

#include <cmath>

#include "odor/analyze.hpp"

namespace odor {

namespace {

std::vector<const Example*> gather(const PreparedDataset& data,
                                   std::span<const std::size_t> indices,
                                   std::size_t begin, std::size_t end) {
  std::vector<const Example*> batch;
  batch.reserve(end - begin);
  for (std::size_t k = begin; k < end; ++k) {
    batch.push_back(&data.examples[indices[k]]);
  }
  return batch;
}

Matrix gather_labels(const PreparedDataset& data,
                     std::span<const std::size_t> indices) {
  Matrix out(indices.size(), data.label_count());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      out(i, j) = data.examples[indices[i]].labels[j];
    }
  }
  return out;
}

}  // namespace

SplitIndices split_dataset(std::size_t count, double train_fraction,
                           std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<std::size_t> order = rng.shuffled_indices(count);
  const auto n_train = static_cast<std::size_t>(
      std::lround(train_fraction * static_cast<double>(count)));
  SplitIndices split;
  split.train.assign(order.begin(), order.begin() + std::min(n_train, count));
  split.val.assign(order.begin() + split.train.size(), order.end());
  return split;
}

EpochStats train_epoch(Model& model, const PreparedDataset& data,
                       std::span<const std::size_t> train_indices,
                       const TrainConfig& tcfg, const LossConfig& lcfg,
                       AdamOptimizer& optimizer, Rng& shuffle_rng) {
  std::vector<std::size_t> order(train_indices.begin(), train_indices.end());
  {
    const std::vector<std::size_t> perm = shuffle_rng.shuffled_indices(order.size());
    std::vector<std::size_t> shuffled(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) shuffled[i] = order[perm[i]];
    order.swap(shuffled);
  }

  EpochStats stats;
  std::size_t seen = 0;
  std::size_t batch_index = 0;
  for (std::size_t begin = 0; begin < order.size();
       begin += tcfg.batch_size, ++batch_index) {
    const std::size_t end = std::min(begin + tcfg.batch_size, order.size());
    const auto batch = gather(data, order, begin, end);
    const Matrix logits = model.forward(batch);
    const PredictionMatrix pred = PredictionMatrix::from_logits(logits);
    const LabelMatrix labels(stack_labels(batch));
    const Matrix mol_features = stack_pooled(batch);

    const LossBreakdown breakdown = total_loss(pred, labels, mol_features, lcfg);
    if (!std::isfinite(breakdown.total)) {
      throw NonFiniteLoss("train_epoch: non-finite loss", batch_index);
    }

    model.backward(breakdown.grad_logits);
    optimizer.step(model.parameters(), model.gradients());

    const auto batch_n = static_cast<double>(end - begin);
    stats.basis += breakdown.basis * batch_n;
    stats.stt += breakdown.stt * batch_n;
    stats.class_energy += breakdown.class_energy * batch_n;
    stats.sample += breakdown.sample * batch_n;
    stats.col += breakdown.col * batch_n;
    stats.total += breakdown.total * batch_n;
    seen += end - begin;
  }
  if (seen > 0) {
    const double inv = 1.0 / static_cast<double>(seen);
    stats.basis *= inv;
    stats.stt *= inv;
    stats.class_energy *= inv;
    stats.sample *= inv;
    stats.col *= inv;
    stats.total *= inv;
  }
  return stats;
}

Matrix predict_probs(Model& model, const PreparedDataset& data,
                     std::span<const std::size_t> indices, std::size_t batch_size) {
  Matrix out(indices.size(), data.label_count());
  for (std::size_t begin = 0; begin < indices.size(); begin += batch_size) {
    const std::size_t end = std::min(begin + batch_size, indices.size());
    const auto batch = gather(data, indices, begin, end);
    const PredictionMatrix pred = PredictionMatrix::from_logits(model.forward(batch));
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < out.cols(); ++j) {
        out(i, j) = pred.probs(i - begin, j);
      }
    }
  }
  return out;
}

TrainResult fit(Model& model, const PreparedDataset& data, const TrainConfig& tcfg,
                const LossConfig& lcfg,
                const std::function<void(const EpochRecord&)>& on_epoch,
                const std::function<void(Model&)>& on_best) {
  const SplitIndices split =
      split_dataset(data.examples.size(), tcfg.train_fraction, tcfg.seed);
  const std::span<const std::size_t> eval_indices =
      split.val.empty() ? std::span<const std::size_t>(split.train)
                        : std::span<const std::size_t>(split.val);

  LossConfig loss_cfg = lcfg;
  if (loss_cfg.weight_scope == WeightScope::Global && !loss_cfg.global_weights) {
    const LabelMatrix train_labels(gather_labels(data, split.train));
    LossConfig batch_scoped = loss_cfg;
    batch_scoped.weight_scope = WeightScope::Batch;
    loss_cfg.global_weights = class_weights(train_labels, batch_scoped);
  }

  AdamOptimizer optimizer(tcfg.lr, tcfg.beta1, tcfg.beta2, tcfg.adam_eps);
  Rng shuffle_rng(tcfg.seed ^ 0x5deece66dULL);

  TrainResult result;
  const Matrix eval_labels = gather_labels(data, eval_indices);
  for (std::size_t epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    record.losses = train_epoch(model, data, split.train, tcfg, loss_cfg,
                                optimizer, shuffle_rng);

    const Matrix probs = predict_probs(model, data, eval_indices, tcfg.batch_size);
    const MetricsReport metrics =
        compute_metrics(probs, eval_labels, data.label_names);
    record.val_f1 = metrics.macro_f1;
    record.val_auroc = metrics.macro_auroc;

    if (result.best_epoch == 0 || record.val_f1 > result.best_val_f1) {
      result.best_epoch = epoch;
      result.best_val_f1 = record.val_f1;
      if (on_best) on_best(model);
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  return result;
}

}  // namespace odor
