//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include "molbench/molecule.hpp"

#include "molbench/smiles.hpp"

namespace molbench {

int Molecule::num_heavy_atoms() const {
  int n = 0;
  for (const auto &a : atoms) {
    if (a.atomic_number > 1 && !a.is_dummy()) {
      ++n;
    }
  }
  return n;
}

void Molecule::add_bond(int a, int b, BondOrder order, bool aromatic) {
  bonds.push_back({a, b, order, aromatic, false});
  invalidate_caches();
}

const std::vector<std::vector<int>> &Molecule::adjacency() const {
  if (adjacency_.size() != atoms.size()) {
    adjacency_.assign(atoms.size(), {});
    for (int i = 0; i < num_bonds(); ++i) {
      adjacency_[bonds[i].a].push_back(i);
      adjacency_[bonds[i].b].push_back(i);
    }
  }
  return adjacency_;
}

int Molecule::degree(int atom) const {
  return static_cast<int>(adjacency()[atom].size());
}

const Bond *Molecule::bond_between(int a, int b) const {
  for (int bi : adjacency()[a]) {
    if (bonds[bi].other(a) == b) {
      return &bonds[bi];
    }
  }
  return nullptr;
}

int Molecule::bond_order_sum(int atom) const {
  int sum = 0;
  for (int bi : adjacency()[atom]) {
    sum += static_cast<int>(bonds[bi].order);
  }
  return sum;
}

void Molecule::invalidate_caches() {
  adjacency_.clear();
  canonical_.clear();
}

const std::string &Molecule::canonical() const {
  if (canonical_.empty() && !atoms.empty()) {
    canonical_ = canonical_smiles(*this);
  }
  return canonical_;
}

}  // namespace molbench
