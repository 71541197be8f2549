// SPDX-License-Identifier: Apache-2.0

#include "odor/data.hpp"

#include <unordered_map>

#include "odor/analyze.hpp"
#include "odor/smiles.hpp"

namespace odor {

namespace {

PreparedDataset build(const std::vector<RawRecord>& kept,
                      std::vector<std::string> label_names) {
  PreparedDataset out;
  out.label_names = std::move(label_names);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < out.label_names.size(); ++j) {
    index[out.label_names[j]] = j;
  }

  out.examples.reserve(kept.size());
  for (const RawRecord& rec : kept) {
    const MoleculeGraph graph = parse_smiles(rec.smiles);
    Example ex;
    FeatureMatrix atoms = atom_features(graph);
    ex.pooled = pool_molecule(atoms).data;
    ex.atom_features = std::move(atoms.data);
    ex.neighbors.assign(graph.atoms.size(), {});
    for (const Bond& bond : graph.bonds) {
      ex.neighbors[bond.a].push_back(bond.b);
      ex.neighbors[bond.b].push_back(bond.a);
    }
    ex.labels.assign(out.label_names.size(), 0.0);
    for (const std::string& label : rec.labels) {
      ex.labels[index.at(label)] = 1.0;
    }
    out.examples.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

PreparedDataset prepare_dataset(const std::vector<RawRecord>& kept) {
  std::vector<std::string> names;
  for (const DescriptorCount& dc : descriptor_frequencies(kept)) {
    names.push_back(dc.label);
  }
  return build(kept, std::move(names));
}

PreparedDataset prepare_dataset_with_labels(
    const std::vector<RawRecord>& kept,
    const std::vector<std::string>& label_names) {
  std::unordered_map<std::string, std::size_t> known;
  for (std::size_t j = 0; j < label_names.size(); ++j) known[label_names[j]] = j;
  std::vector<std::string> unknown;
  for (const DescriptorCount& dc : descriptor_frequencies(kept)) {
    if (!known.count(dc.label)) unknown.push_back(dc.label);
  }
  if (!unknown.empty()) {
    std::string message = "dataset labels not present in checkpoint:";
    for (const std::string& label : unknown) message += " '" + label + "'";
    throw LabelSetMismatch(message);
  }
  return build(kept, label_names);
}

Matrix stack_pooled(const std::vector<const Example*>& batch) {
  if (batch.empty()) return {};
  Matrix out(batch.size(), batch.front()->pooled.cols());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      out(i, j) = batch[i]->pooled(0, j);
    }
  }
  return out;
}

Matrix stack_labels(const std::vector<const Example*>& batch) {
  if (batch.empty()) return {};
  Matrix out(batch.size(), batch.front()->labels.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      out(i, j) = batch[i]->labels[j];
    }
  }
  return out;
}

}  // namespace odor
