// SPDX-License-Identifier: Apache-2.0

#include "odor/smiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <string_view>

namespace odor {

namespace {

// All IUPAC element symbols, so bracket atoms like [Si] or [Na+] parse even
// though featurization buckets them as "other".
constexpr std::array<std::string_view, 118> kElementSymbols = {
    "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na", "Mg",
    "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",  "Cr",
    "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr",
    "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf",
    "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po",
    "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs",
    "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

bool is_known_element(std::string_view symbol) {
  return std::find(kElementSymbols.begin(), kElementSymbols.end(), symbol) !=
         kElementSymbols.end();
}

// Default valence lists used to derive implicit hydrogen counts.
const std::vector<int>* default_valences(std::string_view element) {
  static const std::vector<int> kB = {3};
  static const std::vector<int> kC = {4};
  static const std::vector<int> kN = {3};
  static const std::vector<int> kO = {2};
  static const std::vector<int> kP = {3, 5};
  static const std::vector<int> kS = {2, 4, 6};
  static const std::vector<int> kHalogen = {1};
  if (element == "B") return &kB;
  if (element == "C") return &kC;
  if (element == "N") return &kN;
  if (element == "O") return &kO;
  if (element == "P") return &kP;
  if (element == "S") return &kS;
  if (element == "F" || element == "Cl" || element == "Br" || element == "I")
    return &kHalogen;
  return nullptr;
}

double bond_order_value(BondOrder order) {
  switch (order) {
    case BondOrder::Single: return 1.0;
    case BondOrder::Double: return 2.0;
    case BondOrder::Triple: return 3.0;
    case BondOrder::Aromatic: return 1.5;
  }
  return 1.0;
}

// Bond order total per atom, aromatic bonds counting 1.5, rounded up.
std::vector<int> bond_order_totals(const MoleculeGraph& g) {
  std::vector<double> sums(g.atoms.size(), 0.0);
  for (const Bond& bond : g.bonds) {
    const double v = bond_order_value(bond.order);
    sums[bond.a] += v;
    sums[bond.b] += v;
  }
  std::vector<int> totals(g.atoms.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    totals[i] = static_cast<int>(std::ceil(sums[i] - 1e-9));
  }
  return totals;
}

struct OpenRing {
  std::size_t atom;
  std::optional<BondOrder> order;
  std::size_t offset;
};

struct PendingBond {
  BondOrder order;
  std::size_t offset;
};

class Parser {
 public:
  Parser(const std::string& s, const ParseOptions& opts) : src_(s), opts_(opts) {}

  MoleculeGraph run() {
    begin_ = src_.find_first_not_of(" \t\r\n");
    if (begin_ == std::string::npos) {
      throw ParseError(ParseErrorKind::EmptyInput, 0, "empty SMILES string");
    }
    end_ = src_.find_last_not_of(" \t\r\n") + 1;
    pos_ = begin_;
    graph_.source = src_;

    while (pos_ < end_) {
      const char c = src_[pos_];
      if (c == '(') {
        open_branch();
      } else if (c == ')') {
        close_branch();
      } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\') {
        read_bond_symbol(c);
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        ring_closure();
      } else if (c == '.') {
        throw ParseError(ParseErrorKind::UnknownAtomToken, pos_,
                         "dot-disconnected SMILES are not supported");
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        throw ParseError(ParseErrorKind::UnknownAtomToken, pos_,
                         "unexpected whitespace inside SMILES");
      } else {
        read_atom();
      }
    }
    finish();
    return std::move(graph_);
  }

 private:
  void open_branch() {
    if (!prev_atom_) {
      throw ParseError(ParseErrorKind::UnmatchedParenthesis, pos_,
                       "branch opened before any atom");
    }
    branch_stack_.push_back({*prev_atom_, pos_});
    branch_empty_.push_back(true);
    ++pos_;
  }

  void close_branch() {
    if (pending_bond_) {
      throw ParseError(ParseErrorKind::DanglingBond, pending_bond_->offset,
                       "bond symbol not followed by an atom");
    }
    if (branch_stack_.empty()) {
      throw ParseError(ParseErrorKind::UnmatchedParenthesis, pos_,
                       "')' without a matching '('");
    }
    if (branch_empty_.back()) {
      throw ParseError(ParseErrorKind::UnmatchedParenthesis, pos_, "empty branch");
    }
    prev_atom_ = branch_stack_.back().first;
    branch_stack_.pop_back();
    branch_empty_.pop_back();
    ++pos_;
  }

  void read_bond_symbol(char c) {
    if (!prev_atom_) {
      throw ParseError(ParseErrorKind::DanglingBond, pos_,
                       "bond symbol before any atom");
    }
    if (pending_bond_) {
      throw ParseError(ParseErrorKind::DanglingBond, pending_bond_->offset,
                       "two bond symbols in a row");
    }
    BondOrder order = BondOrder::Single;
    switch (c) {
      case '=': order = BondOrder::Double; break;
      case '#': order = BondOrder::Triple; break;
      case ':': order = BondOrder::Aromatic; break;
      default: order = BondOrder::Single; break;  // '-' and ignored stereo marks
    }
    pending_bond_ = PendingBond{order, pos_};
    ++pos_;
  }

  void ring_closure() {
    if (!prev_atom_) {
      throw ParseError(ParseErrorKind::UnmatchedRingClosure, pos_,
                       "ring closure before any atom");
    }
    const std::size_t token_pos = pos_;
    int number = 0;
    if (src_[pos_] == '%') {
      if (pos_ + 2 >= end_ || !std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(src_[pos_ + 2]))) {
        throw ParseError(ParseErrorKind::UnmatchedRingClosure, token_pos,
                         "'%' must be followed by two digits");
      }
      number = (src_[pos_ + 1] - '0') * 10 + (src_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = src_[pos_] - '0';
      ++pos_;
    }

    std::optional<BondOrder> order;
    if (pending_bond_) {
      order = pending_bond_->order;
      pending_bond_.reset();
    }

    auto it = open_rings_.find(number);
    if (it == open_rings_.end()) {
      open_rings_[number] = OpenRing{*prev_atom_, order, token_pos};
      return;
    }

    const OpenRing open = it->second;
    open_rings_.erase(it);
    if (open.atom == *prev_atom_) {
      throw ParseError(ParseErrorKind::RingBondConflict, token_pos,
                       "ring closure bonds an atom to itself");
    }
    BondOrder resolved;
    if (open.order && order) {
      if (*open.order != *order) {
        throw ParseError(ParseErrorKind::RingBondConflict, token_pos,
                         "conflicting bond orders on ring closure " +
                             std::to_string(number));
      }
      resolved = *order;
    } else if (open.order) {
      resolved = *open.order;
    } else if (order) {
      resolved = *order;
    } else {
      resolved = (graph_.atoms[open.atom].aromatic && graph_.atoms[*prev_atom_].aromatic)
                     ? BondOrder::Aromatic
                     : BondOrder::Single;
    }
    add_bond(open.atom, *prev_atom_, resolved, token_pos);
  }

  void read_atom() {
    const std::size_t token_pos = pos_;
    Atom atom;
    if (src_[pos_] == '[') {
      atom = read_bracket_atom();
    } else {
      atom = read_organic_atom();
    }

    graph_.atoms.push_back(atom);
    const std::size_t idx = graph_.atoms.size() - 1;

    if (prev_atom_) {
      BondOrder order;
      if (pending_bond_) {
        order = pending_bond_->order;
        pending_bond_.reset();
      } else {
        order = (graph_.atoms[*prev_atom_].aromatic && atom.aromatic)
                    ? BondOrder::Aromatic
                    : BondOrder::Single;
      }
      add_bond(*prev_atom_, idx, order, token_pos);
    } else if (pending_bond_) {
      throw ParseError(ParseErrorKind::DanglingBond, pending_bond_->offset,
                       "bond symbol before any atom");
    }
    prev_atom_ = idx;
    if (!branch_empty_.empty()) branch_empty_.back() = false;
  }

  Atom read_organic_atom() {
    Atom atom;
    const char c = src_[pos_];
    // Two-letter organic subset symbols first.
    if (c == 'C' && pos_ + 1 < end_ && src_[pos_ + 1] == 'l') {
      atom.element = "Cl";
      pos_ += 2;
      return atom;
    }
    if (c == 'B' && pos_ + 1 < end_ && src_[pos_ + 1] == 'r') {
      atom.element = "Br";
      pos_ += 2;
      return atom;
    }
    switch (c) {
      case 'B': case 'C': case 'N': case 'O': case 'P': case 'S':
      case 'F': case 'I':
        atom.element = std::string(1, c);
        ++pos_;
        return atom;
      case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
        atom.element = std::string(1, static_cast<char>(std::toupper(c)));
        atom.aromatic = true;
        ++pos_;
        return atom;
      default:
        throw ParseError(ParseErrorKind::UnknownAtomToken, pos_,
                         std::string("unexpected character '") + c + "'");
    }
  }

  Atom read_bracket_atom() {
    const std::size_t open_pos = pos_;
    ++pos_;  // '['
    Atom atom;
    atom.explicit_h = 0;  // bracket atoms carry exactly the written H count

    // Optional isotope, accepted and ignored.
    while (pos_ < end_ && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;

    if (pos_ >= end_) {
      throw ParseError(ParseErrorKind::BadBracketAtom, open_pos,
                       "unterminated bracket atom");
    }

    // Element symbol: uppercase + optional lowercase, or a lowercase aromatic.
    const char first = src_[pos_];
    if (std::isupper(static_cast<unsigned char>(first))) {
      std::string symbol(1, first);
      if (pos_ + 1 < end_ && std::islower(static_cast<unsigned char>(src_[pos_ + 1])) &&
          is_known_element(symbol + src_[pos_ + 1])) {
        symbol += src_[pos_ + 1];
        pos_ += 2;
      } else {
        ++pos_;
      }
      if (!is_known_element(symbol)) {
        throw ParseError(ParseErrorKind::UnknownAtomToken, open_pos + 1,
                         "unknown element symbol '" + symbol + "'");
      }
      atom.element = symbol;
    } else if (first == 'b' || first == 'c' || first == 'n' || first == 'o' ||
               first == 'p' || first == 's') {
      atom.element = std::string(1, static_cast<char>(std::toupper(first)));
      atom.aromatic = true;
      ++pos_;
    } else {
      throw ParseError(ParseErrorKind::UnknownAtomToken, pos_,
                       std::string("unexpected character '") + first +
                           "' in bracket atom");
    }

    // Chirality markers, accepted and ignored.
    while (pos_ < end_ && src_[pos_] == '@') ++pos_;

    // Explicit hydrogen count.
    if (pos_ < end_ && src_[pos_] == 'H') {
      ++pos_;
      int count = 1;
      if (pos_ < end_ && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        count = 0;
        while (pos_ < end_ && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          count = count * 10 + (src_[pos_] - '0');
          ++pos_;
        }
      }
      atom.explicit_h = count;
    }

    // Formal charge: runs of +/- or a single signed count.
    if (pos_ < end_ && (src_[pos_] == '+' || src_[pos_] == '-')) {
      const char sign_char = src_[pos_];
      const int sign = sign_char == '+' ? 1 : -1;
      int magnitude = 0;
      while (pos_ < end_ && src_[pos_] == sign_char) {
        ++magnitude;
        ++pos_;
      }
      if (magnitude == 1 && pos_ < end_ &&
          std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        magnitude = 0;
        while (pos_ < end_ && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          magnitude = magnitude * 10 + (src_[pos_] - '0');
          ++pos_;
        }
      }
      atom.formal_charge = sign * magnitude;
    }

    // Atom class, accepted and ignored.
    if (pos_ < end_ && src_[pos_] == ':') {
      ++pos_;
      if (pos_ >= end_ || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        throw ParseError(ParseErrorKind::BadBracketAtom, open_pos,
                         "atom class ':' must be followed by digits");
      }
      while (pos_ < end_ && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    if (pos_ >= end_ || src_[pos_] != ']') {
      throw ParseError(ParseErrorKind::BadBracketAtom, open_pos,
                       "unterminated bracket atom");
    }
    ++pos_;
    return atom;
  }

  void add_bond(std::size_t a, std::size_t b, BondOrder order, std::size_t offset) {
    for (const Bond& bond : graph_.bonds) {
      if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a)) {
        throw ParseError(ParseErrorKind::RingBondConflict, offset,
                         "duplicate bond between atoms " + std::to_string(a) +
                             " and " + std::to_string(b));
      }
    }
    graph_.bonds.push_back(Bond{a, b, order});
  }

  void finish() {
    if (pending_bond_) {
      throw ParseError(ParseErrorKind::DanglingBond, pending_bond_->offset,
                       "bond symbol at end of input");
    }
    if (!branch_stack_.empty()) {
      throw ParseError(ParseErrorKind::UnmatchedParenthesis,
                       branch_stack_.back().second, "unclosed '('");
    }
    if (!open_rings_.empty()) {
      const OpenRing& open = open_rings_.begin()->second;
      throw ParseError(ParseErrorKind::UnmatchedRingClosure, open.offset,
                       "ring closure " + std::to_string(open_rings_.begin()->first) +
                           " was opened but never closed");
    }

    for (const Bond& bond : graph_.bonds) {
      graph_.atoms[bond.a].degree += 1;
      graph_.atoms[bond.b].degree += 1;
    }
    assign_hydrogens();
    mark_ring_atoms();
  }

  void assign_hydrogens() {
    const std::vector<int> totals = bond_order_totals(graph_);
    for (std::size_t i = 0; i < graph_.atoms.size(); ++i) {
      Atom& atom = graph_.atoms[i];
      if (atom.explicit_h) {
        atom.hydrogens = *atom.explicit_h;
        continue;
      }
      const std::vector<int>* valences = default_valences(atom.element);
      if (valences == nullptr) {
        atom.hydrogens = 0;  // bare non-organic cannot occur; defensive only
        continue;
      }
      int h = -1;
      for (int v : *valences) {
        if (v >= totals[i]) {
          h = v - totals[i];
          break;
        }
      }
      if (h < 0) {
        if (opts_.strict_valence) {
          throw ParseError(ParseErrorKind::ValenceViolation, begin_,
                           "atom " + std::to_string(i) + " (" + atom.element +
                               ") has bond order total " + std::to_string(totals[i]));
        }
        h = 0;
      }
      atom.hydrogens = h;
    }
  }

  // An atom is in a ring iff it touches an edge that lies on some cycle,
  // i.e. an edge that is not a bridge.
  void mark_ring_atoms() {
    const std::size_t n = graph_.atoms.size();
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);
    for (std::size_t e = 0; e < graph_.bonds.size(); ++e) {
      adj[graph_.bonds[e].a].push_back({graph_.bonds[e].b, e});
      adj[graph_.bonds[e].b].push_back({graph_.bonds[e].a, e});
    }
    std::vector<int> entry(n, -1);
    std::vector<int> low(n, -1);
    std::vector<bool> edge_is_bridge(graph_.bonds.size(), false);
    int timer = 0;

    // Iterative DFS; parse trees can be deep for long chains.
    struct Frame {
      std::size_t node;
      std::size_t parent_edge;
      std::size_t next_child;
    };
    for (std::size_t root = 0; root < n; ++root) {
      if (entry[root] != -1) continue;
      std::vector<Frame> stack;
      entry[root] = low[root] = timer++;
      stack.push_back({root, static_cast<std::size_t>(-1), 0});
      while (!stack.empty()) {
        Frame& frame = stack.back();
        if (frame.next_child < adj[frame.node].size()) {
          const auto [next, edge] = adj[frame.node][frame.next_child++];
          if (edge == frame.parent_edge) continue;
          if (entry[next] != -1) {
            low[frame.node] = std::min(low[frame.node], entry[next]);
          } else {
            entry[next] = low[next] = timer++;
            stack.push_back({next, edge, 0});
          }
        } else {
          stack.pop_back();
          if (!stack.empty()) {
            Frame& parent = stack.back();
            low[parent.node] = std::min(low[parent.node], low[frame.node]);
            if (low[frame.node] > entry[parent.node]) {
              edge_is_bridge[frame.parent_edge] = true;
            }
          }
        }
      }
    }
    for (std::size_t e = 0; e < graph_.bonds.size(); ++e) {
      if (!edge_is_bridge[e]) {
        graph_.atoms[graph_.bonds[e].a].in_ring = true;
        graph_.atoms[graph_.bonds[e].b].in_ring = true;
      }
    }
  }

  const std::string& src_;
  ParseOptions opts_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  std::size_t pos_ = 0;
  MoleculeGraph graph_;
  std::optional<std::size_t> prev_atom_;
  std::optional<PendingBond> pending_bond_;
  std::vector<std::pair<std::size_t, std::size_t>> branch_stack_;  // atom, '(' offset
  std::vector<bool> branch_empty_;
  std::map<int, OpenRing> open_rings_;
};

}  // namespace

const char* parse_error_kind_name(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::EmptyInput: return "EmptyInput";
    case ParseErrorKind::UnknownAtomToken: return "UnknownAtomToken";
    case ParseErrorKind::UnmatchedParenthesis: return "UnmatchedParenthesis";
    case ParseErrorKind::UnmatchedRingClosure: return "UnmatchedRingClosure";
    case ParseErrorKind::DanglingBond: return "DanglingBond";
    case ParseErrorKind::BadBracketAtom: return "BadBracketAtom";
    case ParseErrorKind::RingBondConflict: return "RingBondConflict";
    case ParseErrorKind::ValenceViolation: return "ValenceViolation";
  }
  return "ParseError";
}

MoleculeGraph parse_smiles(const std::string& s, const ParseOptions& opts) {
  return Parser(s, opts).run();
}

std::vector<std::string> valence_warnings(const MoleculeGraph& g) {
  std::vector<std::string> warnings;
  const std::vector<int> totals = bond_order_totals(g);
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    const Atom& atom = g.atoms[i];
    const std::vector<int>* valences = default_valences(atom.element);
    if (valences == nullptr) continue;
    const int allowed = valences->back() + std::abs(atom.formal_charge);
    const int used = totals[i] + atom.hydrogens;
    if (used > allowed) {
      warnings.push_back("atom " + std::to_string(i) + " (" + atom.element +
                         "): bond order total " + std::to_string(used) +
                         " exceeds default valence " + std::to_string(allowed));
    }
  }
  return warnings;
}

}  // namespace odor
