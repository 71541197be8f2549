// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <span>

#include "odor/adam.hpp"
#include "odor/cil.hpp"
#include "odor/model.hpp"

namespace odor {

class NonFiniteLoss : public std::runtime_error {
 public:
  NonFiniteLoss(const std::string& what, std::size_t batch_index)
      : std::runtime_error(what + " (batch " + std::to_string(batch_index) + ")"),
        batch_index_(batch_index) {}
  std::size_t batch_index() const { return batch_index_; }

 private:
  std::size_t batch_index_;
};

struct TrainConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

/// Seeded shuffle, then the first round(train_fraction * n) go to train.
SplitIndices split_dataset(std::size_t count, double train_fraction,
                           std::uint64_t seed);

struct EpochStats {
  double basis = 0.0;
  double stt = 0.0;
  double class_energy = 0.0;
  double sample = 0.0;
  double col = 0.0;
  double total = 0.0;
};

/// One pass over shuffled batches with an Adam update per batch. Returns the
/// example-weighted mean of the loss components. Throws NonFiniteLoss with
/// the offending batch index.
EpochStats train_epoch(Model& model, const PreparedDataset& data,
                       std::span<const std::size_t> train_indices,
                       const TrainConfig& tcfg, const LossConfig& lcfg,
                       AdamOptimizer& optimizer, Rng& shuffle_rng);

/// Forward-only predictions (probabilities) for the given examples.
Matrix predict_probs(Model& model, const PreparedDataset& data,
                     std::span<const std::size_t> indices, std::size_t batch_size);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  EpochStats losses;
  double val_f1 = 0.0;
  std::optional<double> val_auroc;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 1-based; 0 when no epoch ran
  double best_val_f1 = 0.0;
};

/// Full training loop. `on_epoch` fires after every epoch; `on_best` fires
/// whenever validation macro-F1 improves (the checkpoint hook). When the
/// validation split is empty the training split doubles as validation.
TrainResult fit(Model& model, const PreparedDataset& data, const TrainConfig& tcfg,
                const LossConfig& lcfg,
                const std::function<void(const EpochRecord&)>& on_epoch = {},
                const std::function<void(Model&)>& on_best = {});

}  // namespace odor
