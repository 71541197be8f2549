// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odor/dataset.hpp"
#include "odor/matrix.hpp"

namespace odor {

/// Mean over labels (with at least one positive) of per-label F1 at the
/// given probability threshold. F1 is 0 where precision + recall is 0.
double macro_f1(const Matrix& probs, const Matrix& y, double threshold = 0.5);

/// Mann-Whitney AUROC: (concordant pairs + 0.5 * ties) / (n_pos * n_neg).
/// Empty when the labels are single-class (undefined, not an error).
std::optional<double> auroc(std::span<const double> scores,
                            std::span<const double> labels);

struct PerLabelMetrics {
  std::string label;
  double f1 = 0.0;
  std::optional<double> auroc;  // empty for single-class labels
  std::size_t support = 0;      // positive count
};

struct MetricsReport {
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  std::optional<double> macro_auroc;     // empty if no label has both classes
  std::size_t auroc_undefined_labels = 0;
  std::vector<PerLabelMetrics> per_label;
};

MetricsReport compute_metrics(const Matrix& probs, const Matrix& y,
                              const std::vector<std::string>& label_names,
                              double threshold = 0.5);

struct DescriptorCount {
  std::string label;
  std::size_t count = 0;
};

/// Descending by count, ties broken lexicographically.
std::vector<DescriptorCount> descriptor_frequencies(
    const std::vector<RawRecord>& dataset);

struct LabelCountBin {
  std::size_t labels_per_molecule = 0;
  std::size_t molecules = 0;
  double fraction = 0.0;
};

/// Histogram of labels-per-molecule; fractions sum to 1.
std::vector<LabelCountBin> label_count_distribution(
    const std::vector<RawRecord>& dataset);

struct CoOccurrenceMatrix {
  std::vector<std::string> labels;              // frequency order
  std::vector<std::vector<std::size_t>> counts;  // symmetric; diagonal = frequency
};

/// Pairwise descriptor co-occurrence over the top_k most frequent
/// descriptors.
CoOccurrenceMatrix co_occurrence(const std::vector<RawRecord>& dataset,
                                 std::size_t top_k);

}  // namespace odor
