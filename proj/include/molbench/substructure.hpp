//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLBENCH_SUBSTRUCTURE_HPP
#define MOLBENCH_SUBSTRUCTURE_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "molbench/molecule.hpp"

namespace molbench {

// Atom predicate tree for the SMARTS subset. Logical depth is bounded at
// parse time.
struct AtomExpr {
  enum class Op {
    kAny,        // *
    kElement,    // #n, or symbol (combined with (ali/aro)matic)
    kAromatic,   // a / lowercase
    kAliphatic,  // A / uppercase
    kCharge,     // +n / -n
    kInRing,     // R  (value 0 negates: R0)
    kTotalConn,  // Xn, connections including hydrogens
    kDegree,     // Dn, heavy-atom degree
    kHCount,     // Hn, total hydrogens
    kNot,
    kAnd,
    kOr,
  };
  Op op = Op::kAny;
  int value = 0;
  std::vector<AtomExpr> kids;
};

struct BondExpr {
  enum class Op {
    kDefault,   // unwritten: single or aromatic
    kOrder,     // - = # (value 1..3, non-aromatic)
    kAromatic,  // :
    kAnyBond,   // ~
    kRing,      // @
    kNot,
    kAnd,
    kOr,
  };
  Op op = Op::kDefault;
  int value = 0;
  std::vector<BondExpr> kids;
};

struct PatternBond {
  int a = -1;
  int b = -1;
  BondExpr expr;
};

// Parsed substructure query.
struct Pattern {
  std::string name;
  std::vector<AtomExpr> atoms;
  std::vector<PatternBond> bonds;
  int min_count = 1;  // pack-level firing threshold

  int num_atoms() const { return static_cast<int>(atoms.size()); }
};

struct PatternError {
  size_t position = 0;
  std::string message;
};

class PatternResult {
 public:
  static PatternResult success(Pattern p) {
    PatternResult r;
    r.ok_ = true;
    r.pattern_ = std::move(p);
    return r;
  }
  static PatternResult failure(PatternError e) {
    PatternResult r;
    r.error_ = std::move(e);
    return r;
  }
  explicit operator bool() const { return ok_; }
  bool ok() const { return ok_; }
  Pattern &value() { return pattern_; }
  const Pattern &value() const { return pattern_; }
  const PatternError &error() const { return error_; }

 private:
  bool ok_ = false;
  Pattern pattern_;
  PatternError error_;
};

PatternResult parse_pattern(std::string_view text);

bool eval_atom(const AtomExpr &expr, const Molecule &mol, int atom);
bool eval_bond(const BondExpr &expr, const Bond &bond);

// All distinct embeddings of the pattern, deduplicated by matched
// atom-index set (pattern automorphisms count once). Each match maps
// pattern atom i to match[i].
std::vector<std::vector<int>> match(const Pattern &pattern,
                                    const Molecule &mol);

// First match only; cheaper for pass/fail filtering.
bool has_match(const Pattern &pattern, const Molecule &mol,
               int min_count = 1);

// Embedding with pattern atom 0 pinned to the given molecule atom.
bool matches_at(const Pattern &pattern, const Molecule &mol, int atom);

struct FilterPack {
  std::string provenance;
  std::vector<Pattern> patterns;
};

struct FilterVerdict {
  bool pass = true;
  std::vector<std::string> violations;
};

FilterVerdict passes_filters(const Molecule &mol,
                             const std::vector<FilterPack> &packs);

// Pack file: UTF-8 lines `NAME<TAB>PATTERN[<TAB>min=N]`, '#' comments.
// Throws std::runtime_error on I/O or grammar errors (with line number).
FilterPack load_filter_pack(const std::string &path,
                            std::string provenance = "");

}  // namespace molbench

#endif  // MOLBENCH_SUBSTRUCTURE_HPP
