// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "odor/featurize.hpp"
#include "odor/rng.hpp"

using namespace odor;

namespace {

// Column layout of the 22-feature schema.
constexpr std::size_t kSlotC = 1;
constexpr std::size_t kSlotO = 3;
constexpr std::size_t kSlotOther = 10;
constexpr std::size_t kDegree = 11;
constexpr std::size_t kChargeBase = 12;  // charge -2 at 12 ... +2 at 16
constexpr std::size_t kAromatic = 17;
constexpr std::size_t kHydrogens = 18;
constexpr std::size_t kInRing = 19;
constexpr std::size_t kAtomCount = 20;
constexpr std::size_t kHeavyNeighbors = 21;

MoleculeGraph permuted(const MoleculeGraph& g, const std::vector<std::size_t>& perm) {
  // perm[i] = new index of old atom i
  MoleculeGraph out;
  out.source = g.source;
  out.atoms.resize(g.atoms.size());
  for (std::size_t i = 0; i < g.atoms.size(); ++i) out.atoms[perm[i]] = g.atoms[i];
  for (const Bond& b : g.bonds) {
    out.bonds.push_back({perm[b.a], perm[b.b], b.order});
  }
  return out;
}

}  // namespace

TEST_CASE("single carbon row matches the schema") {
  const FeatureMatrix f = atom_features(parse_smiles("C"));
  REQUIRE(f.data.rows() == 1);
  REQUIRE(f.data.cols() == kAtomFeatureCount);
  CHECK(f.row_meaning == FeatureMatrix::RowMeaning::Atom);
  CHECK(f.data(0, kSlotC) == 1.0);
  for (std::size_t j = 0; j < 11; ++j) {
    if (j != kSlotC) CHECK(f.data(0, j) == 0.0);
  }
  CHECK(f.data(0, kDegree) == 0.0);
  CHECK(f.data(0, kChargeBase + 2) == 1.0);  // neutral
  CHECK(f.data(0, kAromatic) == 0.0);
  CHECK(f.data(0, kHydrogens) == 1.0);  // methane: 4 H / 4
  CHECK(f.data(0, kInRing) == 0.0);
  CHECK(f.data(0, kAtomCount) == doctest::Approx(1.0 / 50.0));
  CHECK(f.data(0, kHeavyNeighbors) == 0.0);
}

TEST_CASE("benzene rows are identical with ring and aromatic flags") {
  const FeatureMatrix f = atom_features(parse_smiles("c1ccccc1"));
  REQUIRE(f.data.rows() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(f.data(i, kAromatic) == 1.0);
    CHECK(f.data(i, kInRing) == 1.0);
    CHECK(f.data(i, kDegree) == doctest::Approx(2.0 / 6.0));
    for (std::size_t j = 0; j < kAtomFeatureCount; ++j) {
      CHECK(f.data(i, j) == f.data(0, j));
    }
  }
}

TEST_CASE("ethanol oxygen hydrogen feature is 0.25") {
  const FeatureMatrix f = atom_features(parse_smiles("CCO"));
  CHECK(f.data(2, kSlotO) == 1.0);
  CHECK(f.data(2, kHydrogens) == doctest::Approx(0.25));
}

TEST_CASE("unsupported elements land in the other bucket") {
  const FeatureMatrix f = atom_features(parse_smiles("C[Si](C)(C)C"));
  CHECK(f.data(1, kSlotOther) == 1.0);
}

TEST_CASE("charge one-hot clamps to [-2, 2]") {
  const FeatureMatrix plus = atom_features(parse_smiles("[NH4+]"));
  CHECK(plus.data(0, kChargeBase + 3) == 1.0);
  const FeatureMatrix extreme = atom_features(parse_smiles("[Fe+3]"));
  CHECK(extreme.data(0, kChargeBase + 4) == 1.0);  // clamped to +2
}

TEST_CASE("all entries stay within [-1, 2]") {
  for (const char* smiles :
       {"C", "CCO", "c1ccccc1", "CC(C)(C)(C)C", "[Fe+3]", "CS(=O)(=O)O",
        "C1CC1C1CC1", "FC(F)(F)C(F)(F)C(F)(F)C(F)(F)F"}) {
    const FeatureMatrix f = atom_features(parse_smiles(smiles));
    for (double v : f.data.data()) {
      CHECK(v >= -1.0);
      CHECK(v <= 2.0);
    }
  }
}

TEST_CASE("pool_molecule reduces to the row for single atoms and benzene") {
  const FeatureMatrix single = atom_features(parse_smiles("C"));
  const FeatureMatrix pooled = pool_molecule(single);
  CHECK(pooled.row_meaning == FeatureMatrix::RowMeaning::Molecule);
  REQUIRE(pooled.data.rows() == 1);
  for (std::size_t j = 0; j < kAtomFeatureCount; ++j) {
    CHECK(pooled.data(0, j) == single.data(0, j));
  }

  const FeatureMatrix benzene = atom_features(parse_smiles("c1ccccc1"));
  const FeatureMatrix benzene_pooled = pool_molecule(benzene);
  for (std::size_t j = 0; j < kAtomFeatureCount; ++j) {
    CHECK(benzene_pooled.data(0, j) == doctest::Approx(benzene.data(0, j)));
  }
}

TEST_CASE("pooled ethanol is the arithmetic mean of the three rows") {
  const FeatureMatrix atoms = atom_features(parse_smiles("CCO"));
  const FeatureMatrix pooled = pool_molecule(atoms);
  for (std::size_t j = 0; j < kAtomFeatureCount; ++j) {
    const double mean =
        (atoms.data(0, j) + atoms.data(1, j) + atoms.data(2, j)) / 3.0;
    CHECK(pooled.data(0, j) == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("pooling is invariant to atom permutation") {
  const MoleculeGraph g = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  Rng rng(17);
  std::vector<std::size_t> perm(g.atoms.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<std::size_t> shuffle = rng.shuffled_indices(perm.size());
    const FeatureMatrix a = pool_molecule(atom_features(g));
    const FeatureMatrix b = pool_molecule(atom_features(permuted(g, shuffle)));
    for (std::size_t j = 0; j < kAtomFeatureCount; ++j) {
      CHECK(a.data(0, j) == doctest::Approx(b.data(0, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("atom_features rejects empty molecules") {
  MoleculeGraph empty;
  CHECK_THROWS_AS(atom_features(empty), EmptyMolecule);
}
