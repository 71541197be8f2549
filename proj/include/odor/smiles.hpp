// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace odor {

enum class BondOrder { Single, Double, Triple, Aromatic };

struct Atom {
  std::string element;             // canonical symbol, e.g. "C", "Cl", "Si"
  int formal_charge = 0;
  bool aromatic = false;
  std::optional<int> explicit_h;   // hydrogen count given in a bracket atom
  bool in_ring = false;
  int degree = 0;                  // number of incident bonds
  int hydrogens = 0;               // explicit_h if set, otherwise valence-derived
};

struct Bond {
  std::size_t a = 0;
  std::size_t b = 0;
  BondOrder order = BondOrder::Single;
};

struct MoleculeGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::string source;  // original SMILES string
};

enum class ParseErrorKind {
  EmptyInput,
  UnknownAtomToken,
  UnmatchedParenthesis,
  UnmatchedRingClosure,
  DanglingBond,
  BadBracketAtom,
  RingBondConflict,
  ValenceViolation,  // only with ParseOptions::strict_valence
};

const char* parse_error_kind_name(ParseErrorKind kind);

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& message)
      : std::runtime_error(std::string(parse_error_kind_name(kind)) + " at offset " +
                           std::to_string(offset) + ": " + message),
        kind_(kind),
        offset_(offset) {}

  ParseErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

struct ParseOptions {
  // When set, a bare organic-subset atom whose bond order total exceeds its
  // highest default valence is an error instead of a warning.
  bool strict_valence = false;
};

/// Parses a practical subset of SMILES: organic-subset bare atoms
/// (B C N O P S F Cl Br I), lowercase aromatic b c n o p s, bracket atoms
/// with isotope/charge/explicit H, bond symbols - = # :, branches, ring
/// closures 0-9 and %nn. Stereo markers (/ \ @) are accepted and ignored.
/// Throws ParseError with a byte offset on malformed input.
MoleculeGraph parse_smiles(const std::string& s, const ParseOptions& opts = {});

/// Atoms whose bond order total exceeds every default valence for the
/// element. One human-readable message per offending atom.
std::vector<std::string> valence_warnings(const MoleculeGraph& g);

}  // namespace odor
