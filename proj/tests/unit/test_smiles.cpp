// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "odor/smiles.hpp"

using namespace odor;

namespace {

ParseError capture(const std::string& smiles) {
  try {
    parse_smiles(smiles);
  } catch (const ParseError& err) {
    return err;
  }
  FAIL("expected ParseError for '", smiles, "'");
  return ParseError(ParseErrorKind::EmptyInput, 0, "unreachable");
}

int incident_bonds(const MoleculeGraph& g, std::size_t atom) {
  int count = 0;
  for (const Bond& b : g.bonds) {
    if (b.a == atom || b.b == atom) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("ethanol: atoms, bonds, implicit hydrogens") {
  const MoleculeGraph g = parse_smiles("CCO");
  REQUIRE(g.atoms.size() == 3);
  REQUIRE(g.bonds.size() == 2);
  CHECK(g.atoms[0].element == "C");
  CHECK(g.atoms[1].element == "C");
  CHECK(g.atoms[2].element == "O");
  CHECK(g.bonds[0].order == BondOrder::Single);
  CHECK(g.bonds[1].order == BondOrder::Single);
  CHECK(g.atoms[0].hydrogens == 3);
  CHECK(g.atoms[1].hydrogens == 2);
  CHECK(g.atoms[2].hydrogens == 1);
  for (const Atom& atom : g.atoms) CHECK_FALSE(atom.in_ring);
}

TEST_CASE("cyclopropane: ring closure marks every atom") {
  const MoleculeGraph g = parse_smiles("C1CC1");
  REQUIRE(g.atoms.size() == 3);
  REQUIRE(g.bonds.size() == 3);
  for (const Atom& atom : g.atoms) {
    CHECK(atom.in_ring);
    CHECK(atom.degree == 2);
    CHECK(atom.hydrogens == 2);
  }
}

TEST_CASE("benzene: aromatic atoms and bonds") {
  const MoleculeGraph g = parse_smiles("c1ccccc1");
  REQUIRE(g.atoms.size() == 6);
  REQUIRE(g.bonds.size() == 6);
  for (const Atom& atom : g.atoms) {
    CHECK(atom.element == "C");
    CHECK(atom.aromatic);
    CHECK(atom.in_ring);
    CHECK(atom.hydrogens == 1);
  }
  for (const Bond& bond : g.bonds) CHECK(bond.order == BondOrder::Aromatic);
}

TEST_CASE("substituted ring: only ring atoms are flagged") {
  const MoleculeGraph g = parse_smiles("CC1CC1");
  REQUIRE(g.atoms.size() == 4);
  CHECK_FALSE(g.atoms[0].in_ring);
  CHECK(g.atoms[1].in_ring);
  CHECK(g.atoms[2].in_ring);
  CHECK(g.atoms[3].in_ring);
}

TEST_CASE("degree equals the number of incident bonds") {
  for (const char* smiles :
       {"CCO", "CC(C)(C)C", "c1ccccc1", "C1CC1C1CC1", "N(=O)O", "FC(F)(F)F"}) {
    const MoleculeGraph g = parse_smiles(smiles);
    for (std::size_t i = 0; i < g.atoms.size(); ++i) {
      CHECK(g.atoms[i].degree == incident_bonds(g, i));
    }
  }
}

TEST_CASE("bond symbols set orders") {
  const MoleculeGraph g = parse_smiles("C=C#N");
  REQUIRE(g.bonds.size() == 2);
  CHECK(g.bonds[0].order == BondOrder::Double);
  CHECK(g.bonds[1].order == BondOrder::Triple);
  CHECK(g.atoms[0].hydrogens == 2);  // H2C=
  CHECK(g.atoms[2].hydrogens == 0);  // nitrile N
}

TEST_CASE("stereo markers are accepted and ignored") {
  const MoleculeGraph g = parse_smiles("F/C=C\\F");
  REQUIRE(g.atoms.size() == 4);
  REQUIRE(g.bonds.size() == 3);
  CHECK(g.bonds[0].order == BondOrder::Single);
  CHECK(g.bonds[1].order == BondOrder::Double);
  CHECK(g.bonds[2].order == BondOrder::Single);

  const MoleculeGraph chiral = parse_smiles("N[C@@H](C)C(=O)O");  // alanine
  CHECK(chiral.atoms.size() == 6);
  CHECK(chiral.atoms[1].hydrogens == 1);
}

TEST_CASE("bracket atoms: charge, explicit hydrogens, isotopes") {
  const MoleculeGraph ammonium = parse_smiles("[NH4+]");
  REQUIRE(ammonium.atoms.size() == 1);
  CHECK(ammonium.atoms[0].element == "N");
  CHECK(ammonium.atoms[0].formal_charge == 1);
  CHECK(ammonium.atoms[0].hydrogens == 4);
  CHECK(ammonium.atoms[0].explicit_h == 4);

  const MoleculeGraph oxide = parse_smiles("[O-]");
  CHECK(oxide.atoms[0].formal_charge == -1);
  CHECK(oxide.atoms[0].hydrogens == 0);

  const MoleculeGraph doubly = parse_smiles("[Ca++]");
  CHECK(doubly.atoms[0].element == "Ca");
  CHECK(doubly.atoms[0].formal_charge == 2);

  const MoleculeGraph numbered = parse_smiles("[Fe+3]");
  CHECK(numbered.atoms[0].formal_charge == 3);

  const MoleculeGraph isotope = parse_smiles("[13CH4]");
  CHECK(isotope.atoms[0].element == "C");
  CHECK(isotope.atoms[0].hydrogens == 4);

  const MoleculeGraph pyrrole = parse_smiles("c1cc[nH]c1");
  CHECK(pyrrole.atoms[3].element == "N");
  CHECK(pyrrole.atoms[3].aromatic);
  CHECK(pyrrole.atoms[3].hydrogens == 1);
}

TEST_CASE("aromatic nitrogen without brackets carries no hydrogen") {
  const MoleculeGraph pyridine = parse_smiles("n1ccccc1");
  CHECK(pyridine.atoms[0].element == "N");
  CHECK(pyridine.atoms[0].hydrogens == 0);
}

TEST_CASE("two-digit ring closures") {
  const MoleculeGraph g = parse_smiles("C%10CC%10");
  REQUIRE(g.atoms.size() == 3);
  REQUIRE(g.bonds.size() == 3);
  for (const Atom& atom : g.atoms) CHECK(atom.in_ring);
}

TEST_CASE("ring digits are reusable after closing") {
  const MoleculeGraph g = parse_smiles("C1CC1C1CC1");
  REQUIRE(g.atoms.size() == 6);
  REQUIRE(g.bonds.size() == 7);
}

TEST_CASE("sulfur valence ladder") {
  CHECK(parse_smiles("S").atoms[0].hydrogens == 2);
  CHECK(parse_smiles("CS(=O)C").atoms[1].hydrogens == 0);        // sulfoxide S
  CHECK(parse_smiles("CS(=O)(=O)O").atoms[1].hydrogens == 0);    // sulfonic S
  CHECK(parse_smiles("CS(=O)(=O)O").atoms[4].hydrogens == 1);    // acid O
}

TEST_CASE("error: unmatched ring closure reports the open offset") {
  const ParseError err = capture("C1CC");
  CHECK(err.kind() == ParseErrorKind::UnmatchedRingClosure);
  CHECK(err.offset() == 1);
}

TEST_CASE("error: unmatched parentheses") {
  CHECK(capture("C(C").kind() == ParseErrorKind::UnmatchedParenthesis);
  CHECK(capture("C(C").offset() == 1);
  CHECK(capture("CC)C").kind() == ParseErrorKind::UnmatchedParenthesis);
  CHECK(capture("(CC").kind() == ParseErrorKind::UnmatchedParenthesis);
  CHECK(capture("C()C").kind() == ParseErrorKind::UnmatchedParenthesis);
}

TEST_CASE("error: dangling bonds") {
  CHECK(capture("CC=").kind() == ParseErrorKind::DanglingBond);
  CHECK(capture("CC=").offset() == 2);
  CHECK(capture("=C").kind() == ParseErrorKind::DanglingBond);
  CHECK(capture("C(=)O").kind() == ParseErrorKind::DanglingBond);
  CHECK(capture("C=#C").kind() == ParseErrorKind::DanglingBond);
}

TEST_CASE("error: unknown atom tokens") {
  const ParseError err = capture("CXC");
  CHECK(err.kind() == ParseErrorKind::UnknownAtomToken);
  CHECK(err.offset() == 1);
  CHECK(capture("[Xx]").kind() == ParseErrorKind::UnknownAtomToken);
  CHECK(capture("C.C").kind() == ParseErrorKind::UnknownAtomToken);
}

TEST_CASE("error: empty input") {
  CHECK(capture("").kind() == ParseErrorKind::EmptyInput);
  CHECK(capture("   ").kind() == ParseErrorKind::EmptyInput);
}

TEST_CASE("error: malformed brackets") {
  CHECK(capture("[C").kind() == ParseErrorKind::BadBracketAtom);
  CHECK(capture("[]").kind() == ParseErrorKind::UnknownAtomToken);
  CHECK(capture("C[CH").kind() == ParseErrorKind::BadBracketAtom);
}

TEST_CASE("error: ring bond conflicts") {
  CHECK(capture("C=1CC-1").kind() == ParseErrorKind::RingBondConflict);
  CHECK(capture("C11").kind() == ParseErrorKind::RingBondConflict);
  CHECK(capture("C12CC12").kind() == ParseErrorKind::RingBondConflict);
}

TEST_CASE("matching explicit ring bond orders are accepted") {
  const MoleculeGraph g = parse_smiles("C=1CCCCC=1");
  bool found_double = false;
  for (const Bond& bond : g.bonds) {
    if (bond.order == BondOrder::Double) found_double = true;
  }
  CHECK(found_double);
}

TEST_CASE("parsing is deterministic") {
  const MoleculeGraph a = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");  // aspirin
  const MoleculeGraph b = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  REQUIRE(a.atoms.size() == b.atoms.size());
  REQUIRE(a.bonds.size() == b.bonds.size());
  for (std::size_t i = 0; i < a.atoms.size(); ++i) {
    CHECK(a.atoms[i].element == b.atoms[i].element);
    CHECK(a.atoms[i].hydrogens == b.atoms[i].hydrogens);
    CHECK(a.atoms[i].degree == b.atoms[i].degree);
    CHECK(a.atoms[i].in_ring == b.atoms[i].in_ring);
  }
  for (std::size_t i = 0; i < a.bonds.size(); ++i) {
    CHECK(a.bonds[i].a == b.bonds[i].a);
    CHECK(a.bonds[i].b == b.bonds[i].b);
    CHECK(a.bonds[i].order == b.bonds[i].order);
  }
}

TEST_CASE("re-parsing the stored source reproduces the counts") {
  for (const char* smiles : {"CCO", "c1ccccc1", "CC(C)Cc1ccc(cc1)C(C)C(=O)O"}) {
    const MoleculeGraph g = parse_smiles(smiles);
    const MoleculeGraph again = parse_smiles(g.source);
    CHECK(g.atoms.size() == again.atoms.size());
    CHECK(g.bonds.size() == again.bonds.size());
  }
}

TEST_CASE("valence violations warn by default and throw in strict mode") {
  const MoleculeGraph g = parse_smiles("CC(C)(C)(C)C");  // five bonds on carbon
  CHECK_FALSE(valence_warnings(g).empty());

  ParseOptions strict;
  strict.strict_valence = true;
  CHECK_THROWS_AS(parse_smiles("CC(C)(C)(C)C", strict), ParseError);

  const MoleculeGraph fine = parse_smiles("CCO");
  CHECK(valence_warnings(fine).empty());
}

TEST_CASE("fused rings mark every member atom") {
  const MoleculeGraph naphthalene = parse_smiles("c1ccc2ccccc2c1");
  REQUIRE(naphthalene.atoms.size() == 10);
  for (const Atom& atom : naphthalene.atoms) CHECK(atom.in_ring);
}

TEST_CASE("bracket aromatic and atom class are handled") {
  const MoleculeGraph g = parse_smiles("[cH:1]1[cH][cH][cH][cH][cH]1");
  REQUIRE(g.atoms.size() == 6);
  for (const Atom& atom : g.atoms) {
    CHECK(atom.aromatic);
    CHECK(atom.hydrogens == 1);
  }
}
