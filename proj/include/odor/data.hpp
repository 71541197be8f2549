// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "odor/dataset.hpp"
#include "odor/featurize.hpp"
#include "odor/matrix.hpp"

namespace odor {

/// One cleaned molecule, featurized and ready for training.
struct Example {
  Matrix atom_features;                             // atoms x A
  Matrix pooled;                                    // 1 x A
  std::vector<std::vector<std::size_t>> neighbors;  // adjacency lists
  std::vector<double> labels;                       // M entries in {0,1}
};

struct PreparedDataset {
  std::vector<Example> examples;
  std::vector<std::string> label_names;  // descending frequency order

  std::size_t label_count() const { return label_names.size(); }
};

class LabelSetMismatch : public std::runtime_error {
 public:
  explicit LabelSetMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// Parses and featurizes cleaned records. Label columns follow descending
/// descriptor frequency (ties lexicographic).
PreparedDataset prepare_dataset(const std::vector<RawRecord>& kept);

/// Same featurization with a caller-fixed label column order (checkpoint
/// evaluation). Throws LabelSetMismatch listing any dataset label missing
/// from `label_names`.
PreparedDataset prepare_dataset_with_labels(
    const std::vector<RawRecord>& kept,
    const std::vector<std::string>& label_names);

/// Stacks pooled feature rows for a batch.
Matrix stack_pooled(const std::vector<const Example*>& batch);

/// Stacks label rows for a batch.
Matrix stack_labels(const std::vector<const Example*>& batch);

}  // namespace odor
