//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLBENCH_SMILES_HPP
#define MOLBENCH_SMILES_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "molbench/molecule.hpp"

namespace molbench {

// Parse and sanitize a SMILES string. Grammar: organic-subset atoms,
// bracket atoms with isotope/charge/H-count, bond symbols - = # : / \,
// branches, ring closures (including %nn), and the dot disconnect.
// Stereo tokens are parsed and discarded.
ParseResult parse_smiles(std::string_view text);

struct SanitizeOptions {
  bool kekulize = true;          // assign orders to aromatic bonds
  bool refill_hydrogens = true;  // recompute implicit hydrogens
};

// Ring perception, aromaticity validation, kekulization, hydrogen fill.
// Used by the parser and by graph-editing code (fragments, scaffolds).
std::optional<ParseDiagnostic> sanitize(Molecule &mol,
                                        const SanitizeOptions &opts = {});

// Deterministic canonical string; identical for isomorphic molecules
// regardless of atom order. Morgan-style invariant refinement with full
// tie-break branching (lexicographically smallest emission wins).
std::string canonical_smiles(const Molecule &mol);

// Refined atom ranks before tie-breaking; equal ranks mark atoms the
// relaxation cannot distinguish.
std::vector<int> canonical_ranks(const Molecule &mol);

// Minimum cycle basis of the molecular graph.
std::vector<std::vector<int>> ring_info(const Molecule &mol);

// Kekulize a parsed molecule: returns a copy with alternating orders
// assigned to every aromatic system, or a diagnostic if no assignment
// exists.
ParseResult kekulize(const Molecule &mol);

}  // namespace molbench

#endif  // MOLBENCH_SMILES_HPP
