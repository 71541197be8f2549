// SPDX-License-Identifier: Apache-2.0

#include "odor/analyze.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace odor {

namespace {

struct F1Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
  double f1() const {
    const double denom = 2.0 * tp + fp + fn;  // equals 2PR/(P+R) rearranged
    return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
  }
};

}  // namespace

double macro_f1(const Matrix& probs, const Matrix& y, double threshold) {
  if (!probs.same_shape(y)) throw ShapeMismatch("macro_f1: shape mismatch");
  double sum_f1 = 0.0;
  std::size_t labels_with_support = 0;
  for (std::size_t j = 0; j < y.cols(); ++j) {
    F1Counts c;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < y.rows(); ++i) {
      const bool predicted = probs(i, j) >= threshold;
      const bool actual = y(i, j) != 0.0;
      positives += actual ? 1 : 0;
      if (predicted && actual) ++c.tp;
      else if (predicted && !actual) ++c.fp;
      else if (!predicted && actual) ++c.fn;
    }
    if (positives > 0) {
      sum_f1 += c.f1();
      ++labels_with_support;
    }
  }
  return labels_with_support == 0 ? 0.0
                                  : sum_f1 / static_cast<double>(labels_with_support);
}

std::optional<double> auroc(std::span<const double> scores,
                            std::span<const double> labels) {
  if (scores.size() != labels.size()) throw ShapeMismatch("auroc: length mismatch");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (double l : labels) n_pos += l != 0.0 ? 1 : 0;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  // Rank-sum with midranks for ties; equivalent to pair counting with
  // half-credit for tied score pairs.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = static_cast<double>(i + j + 1) / 2.0;  // 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0.0) pos_rank_sum += midrank;
    }
    i = j;
  }
  const double u = pos_rank_sum -
                   static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

MetricsReport compute_metrics(const Matrix& probs, const Matrix& y,
                              const std::vector<std::string>& label_names,
                              double threshold) {
  if (!probs.same_shape(y)) throw ShapeMismatch("compute_metrics: shape mismatch");
  if (label_names.size() != y.cols()) {
    throw ShapeMismatch("compute_metrics: label name count mismatch");
  }
  MetricsReport report;
  F1Counts micro;
  double macro_sum = 0.0;
  std::size_t macro_labels = 0;
  double auroc_sum = 0.0;
  std::size_t auroc_labels = 0;

  std::vector<double> col_scores(y.rows()), col_labels(y.rows());
  for (std::size_t j = 0; j < y.cols(); ++j) {
    F1Counts c;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < y.rows(); ++i) {
      col_scores[i] = probs(i, j);
      col_labels[i] = y(i, j);
      const bool predicted = probs(i, j) >= threshold;
      const bool actual = y(i, j) != 0.0;
      positives += actual ? 1 : 0;
      if (predicted && actual) ++c.tp;
      else if (predicted && !actual) ++c.fp;
      else if (!predicted && actual) ++c.fn;
    }
    micro.tp += c.tp;
    micro.fp += c.fp;
    micro.fn += c.fn;

    PerLabelMetrics per;
    per.label = label_names[j];
    per.f1 = c.f1();
    per.support = positives;
    per.auroc = auroc(col_scores, col_labels);
    if (positives > 0) {
      macro_sum += per.f1;
      ++macro_labels;
    }
    if (per.auroc) {
      auroc_sum += *per.auroc;
      ++auroc_labels;
    } else {
      ++report.auroc_undefined_labels;
    }
    report.per_label.push_back(std::move(per));
  }

  report.macro_f1 =
      macro_labels == 0 ? 0.0 : macro_sum / static_cast<double>(macro_labels);
  report.micro_f1 = micro.f1();
  if (auroc_labels > 0) {
    report.macro_auroc = auroc_sum / static_cast<double>(auroc_labels);
  }
  return report;
}

std::vector<DescriptorCount> descriptor_frequencies(
    const std::vector<RawRecord>& dataset) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const RawRecord& rec : dataset) {
    // A duplicated label on one molecule counts once.
    std::set<std::string> unique(rec.labels.begin(), rec.labels.end());
    for (const std::string& label : unique) counts[label] += 1;
  }
  std::vector<DescriptorCount> out;
  out.reserve(counts.size());
  for (auto& [label, count] : counts) out.push_back({label, count});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.label < b.label;
  });
  return out;
}

std::vector<LabelCountBin> label_count_distribution(
    const std::vector<RawRecord>& dataset) {
  std::map<std::size_t, std::size_t> bins;
  for (const RawRecord& rec : dataset) {
    std::set<std::string> unique(rec.labels.begin(), rec.labels.end());
    bins[unique.size()] += 1;
  }
  std::vector<LabelCountBin> out;
  const double total = static_cast<double>(dataset.size());
  for (auto [k, count] : bins) {
    out.push_back({k, count, total == 0.0 ? 0.0 : static_cast<double>(count) / total});
  }
  return out;
}

CoOccurrenceMatrix co_occurrence(const std::vector<RawRecord>& dataset,
                                 std::size_t top_k) {
  const std::vector<DescriptorCount> freq = descriptor_frequencies(dataset);
  const std::size_t k = std::min(top_k, freq.size());

  CoOccurrenceMatrix matrix;
  matrix.labels.reserve(k);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < k; ++i) {
    matrix.labels.push_back(freq[i].label);
    index[freq[i].label] = i;
  }
  matrix.counts.assign(k, std::vector<std::size_t>(k, 0));

  for (const RawRecord& rec : dataset) {
    std::vector<std::size_t> present;
    std::set<std::string> unique(rec.labels.begin(), rec.labels.end());
    for (const std::string& label : unique) {
      auto it = index.find(label);
      if (it != index.end()) present.push_back(it->second);
    }
    for (std::size_t a : present) {
      for (std::size_t b : present) matrix.counts[a][b] += 1;
    }
  }
  return matrix;
}

}  // namespace odor
