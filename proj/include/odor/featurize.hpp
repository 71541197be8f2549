// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

#include "odor/matrix.hpp"
#include "odor/smiles.hpp"

namespace odor {

class EmptyMolecule : public std::runtime_error {
 public:
  explicit EmptyMolecule(const std::string& what) : std::runtime_error(what) {}
};

/// Number of per-atom feature columns produced by atom_features.
inline constexpr std::size_t kAtomFeatureCount = 22;

struct FeatureMatrix {
  enum class RowMeaning { Atom, Molecule };
  Matrix data;
  RowMeaning row_meaning = RowMeaning::Atom;
};

/// Fixed 22-column schema, one row per atom:
///   [0..10]  element one-hot over B C N O P S F Cl Br I other
///   [11]     degree / 6
///   [12..16] formal charge one-hot, clamped to [-2, 2]
///   [17]     aromatic flag
///   [18]     hydrogen count / 4
///   [19]     ring membership flag
///   [20]     molecule atom count / 50
///   [21]     heavy-neighbor count / 6
/// Scaled counts are clamped so every entry stays in [-1, 2].
FeatureMatrix atom_features(const MoleculeGraph& g);

/// Column-wise mean over atom rows; the molecule-level feature vector.
FeatureMatrix pool_molecule(const FeatureMatrix& atoms);

}  // namespace odor
