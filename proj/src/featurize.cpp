// SPDX-License-Identifier: Apache-2.0

#include "odor/featurize.hpp"

#include <algorithm>
#include <array>
#include <string_view>

namespace odor {

namespace {

constexpr std::array<std::string_view, 10> kOneHotElements = {
    "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"};

std::size_t element_slot(const std::string& symbol) {
  for (std::size_t i = 0; i < kOneHotElements.size(); ++i) {
    if (kOneHotElements[i] == symbol) return i;
  }
  return kOneHotElements.size();  // "other"
}

double scaled_count(double value, double divisor) {
  return std::min(value / divisor, 2.0);
}

}  // namespace

FeatureMatrix atom_features(const MoleculeGraph& g) {
  if (g.atoms.empty()) {
    throw EmptyMolecule("atom_features: molecule has no atoms");
  }
  const std::size_t n = g.atoms.size();

  std::vector<int> heavy_neighbors(n, 0);
  for (const Bond& bond : g.bonds) {
    if (g.atoms[bond.b].element != "H") heavy_neighbors[bond.a] += 1;
    if (g.atoms[bond.a].element != "H") heavy_neighbors[bond.b] += 1;
  }

  Matrix out(n, kAtomFeatureCount);
  const double atom_count_feature = scaled_count(static_cast<double>(n), 50.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Atom& atom = g.atoms[i];
    out(i, element_slot(atom.element)) = 1.0;
    out(i, 11) = scaled_count(atom.degree, 6.0);
    const int charge = std::clamp(atom.formal_charge, -2, 2);
    out(i, 12 + static_cast<std::size_t>(charge + 2)) = 1.0;
    out(i, 17) = atom.aromatic ? 1.0 : 0.0;
    out(i, 18) = scaled_count(atom.hydrogens, 4.0);
    out(i, 19) = atom.in_ring ? 1.0 : 0.0;
    out(i, 20) = atom_count_feature;
    out(i, 21) = scaled_count(heavy_neighbors[i], 6.0);
  }
  return FeatureMatrix{std::move(out), FeatureMatrix::RowMeaning::Atom};
}

FeatureMatrix pool_molecule(const FeatureMatrix& atoms) {
  if (atoms.data.rows() == 0) {
    throw EmptyMolecule("pool_molecule: no atom rows to pool");
  }
  const std::vector<double> means = col_means(atoms.data);
  Matrix pooled(1, atoms.data.cols());
  for (std::size_t j = 0; j < pooled.cols(); ++j) pooled(0, j) = means[j];
  return FeatureMatrix{std::move(pooled), FeatureMatrix::RowMeaning::Molecule};
}

}  // namespace odor
