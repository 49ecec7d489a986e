//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLBENCH_MOLECULE_HPP
#define MOLBENCH_MOLECULE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "molbench/elements.hpp"

namespace molbench {

enum class BondOrder : uint8_t { kSingle = 1, kDouble = 2, kTriple = 3 };

struct Atom {
  uint8_t atomic_number = 6;
  int8_t formal_charge = 0;
  uint8_t explicit_h = 0;  // hydrogens written inside a bracket atom
  uint8_t implicit_h = 0;  // filled in by sanitization
  bool is_aromatic = false;
  bool from_bracket = false;  // bracket atoms never gain implicit hydrogens
  int16_t link_label = -1;    // BRICS attachment label on dummy atoms
  std::vector<int> ring_sizes;

  int total_h() const { return explicit_h + implicit_h; }
  bool in_ring() const { return !ring_sizes.empty(); }
  bool is_dummy() const { return atomic_number == kDummyAtom; }
};

struct Bond {
  int a = -1;
  int b = -1;
  BondOrder order = BondOrder::kSingle;  // kekule order for aromatic bonds
  bool is_aromatic = false;
  bool in_ring = false;

  int other(int atom) const { return atom == a ? b : a; }
};

// Sanitized molecular graph. Immutable by convention once sanitize() has
// run; the canonical string is computed on demand and cached.
class Molecule {
 public:
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  bool disconnected = false;  // source contained the dot token

  int num_atoms() const { return static_cast<int>(atoms.size()); }
  int num_bonds() const { return static_cast<int>(bonds.size()); }
  int num_heavy_atoms() const;

  void add_bond(int a, int b, BondOrder order, bool aromatic = false);
  // Bond indices incident to each atom.
  const std::vector<std::vector<int>> &adjacency() const;
  int degree(int atom) const;
  const Bond *bond_between(int a, int b) const;

  // Explicit bond-order sum at an atom (kekule orders).
  int bond_order_sum(int atom) const;

  void invalidate_caches();

  const std::string &canonical() const;  // cached canonical string

  // Rings found by sanitization (a minimum cycle basis); each ring is a
  // cyclic atom-index sequence.
  const std::vector<std::vector<int>> &rings() const { return rings_; }
  std::vector<std::vector<int>> &mutable_rings() { return rings_; }

 private:
  mutable std::vector<std::vector<int>> adjacency_;
  mutable std::string canonical_;
  std::vector<std::vector<int>> rings_;
};

enum class ParseErrorKind {
  kEmptyInput,
  kLexical,
  kUnclosedBranch,
  kUnmatchedRingBond,
  kValence,
  kKekulization,
  kAromaticity,
  kEmptyMolecule,
};

struct ParseDiagnostic {
  size_t position = 0;
  ParseErrorKind kind = ParseErrorKind::kLexical;
  std::string message;
};

// Minimal result type: either a molecule or a diagnostic.
class ParseResult {
 public:
  static ParseResult success(Molecule mol) {
    ParseResult r;
    r.ok_ = true;
    r.mol_ = std::move(mol);
    return r;
  }
  static ParseResult failure(ParseDiagnostic diag) {
    ParseResult r;
    r.ok_ = false;
    r.diag_ = std::move(diag);
    return r;
  }

  explicit operator bool() const { return ok_; }
  bool ok() const { return ok_; }
  Molecule &value() { return mol_; }
  const Molecule &value() const { return mol_; }
  const ParseDiagnostic &error() const { return diag_; }

 private:
  bool ok_ = false;
  Molecule mol_;
  ParseDiagnostic diag_;
};

}  // namespace molbench

#endif  // MOLBENCH_MOLECULE_HPP
