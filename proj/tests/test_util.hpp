//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLBENCH_TESTS_TEST_UTIL_HPP
#define MOLBENCH_TESTS_TEST_UTIL_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "molbench/molecule.hpp"
#include "molbench/smiles.hpp"

namespace molbench::test {

inline Molecule mol(const std::string &smiles) {
  auto r = parse_smiles(smiles);
  if (!r.ok()) {
    throw std::runtime_error("fixture molecule failed to parse: " + smiles +
                             " (" + r.error().message + ")");
  }
  return std::move(r.value());
}

// Deterministic 64-bit generator for tests (splitmix64).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  uint64_t below(uint64_t n) { return next() % n; }
  double uniform() {
    return static_cast<double>(next() >> 11) / 9007199254740992.0;
  }

 private:
  uint64_t state_;
};

// Random sanitized molecule with bounded size: random tree growth with
// occasional extra ring bonds and occasional benzene attachments, all
// under explicit valence budgets.
inline Molecule random_molecule(Rng &rng, int max_atoms = 20) {
  struct Choice {
    uint8_t z;
    int valence;
  };
  static const Choice kChoices[] = {{6, 4}, {6, 4}, {6, 4}, {7, 3},
                                    {8, 2}, {16, 2}, {9, 1}, {17, 1}};
  Molecule m;
  std::vector<int> budget;
  auto add_atom = [&](uint8_t z, int valence) {
    Atom a;
    a.atomic_number = z;
    m.atoms.push_back(a);
    budget.push_back(valence);
    return m.num_atoms() - 1;
  };
  int target = 2 + static_cast<int>(rng.below(max_atoms - 1));
  {
    auto c = kChoices[rng.below(std::size(kChoices))];
    add_atom(c.z, c.valence);
  }
  while (m.num_atoms() < target) {
    if (budget.size() + 6 <= static_cast<size_t>(max_atoms) &&
        rng.below(10) == 0) {
      // fuse in a benzene ring attached by a single bond
      std::vector<int> parents;
      for (int i = 0; i < m.num_atoms(); ++i) {
        if (budget[i] >= 1 && !m.atoms[i].is_aromatic) {
          parents.push_back(i);
        }
      }
      if (!parents.empty()) {
        int parent = parents[rng.below(parents.size())];
        int first = -1;
        int prev = -1;
        for (int k = 0; k < 6; ++k) {
          int idx = add_atom(6, 4);
          m.atoms[idx].is_aromatic = true;
          budget[idx] = 1;  // one slot besides the two ring bonds
          if (k == 0) {
            first = idx;
          } else {
            m.add_bond(prev, idx, BondOrder::kSingle, true);
          }
          prev = idx;
        }
        m.add_bond(prev, first, BondOrder::kSingle, true);
        m.add_bond(parent, first, BondOrder::kSingle);
        --budget[parent];
        --budget[first];
        continue;
      }
    }
    std::vector<int> parents;
    for (int i = 0; i < m.num_atoms(); ++i) {
      if (budget[i] >= 1) {
        parents.push_back(i);
      }
    }
    if (parents.empty()) {
      break;
    }
    int parent = parents[rng.below(parents.size())];
    auto c = kChoices[rng.below(std::size(kChoices))];
    int order = 1;
    if (budget[parent] >= 2 && c.valence >= 2 && rng.below(4) == 0) {
      order = budget[parent] >= 3 && c.valence >= 3 && rng.below(3) == 0 ? 3
                                                                         : 2;
    }
    int idx = add_atom(c.z, c.valence);
    m.add_bond(parent, idx, static_cast<BondOrder>(order));
    budget[parent] -= order;
    budget[idx] -= order;
  }
  // occasional extra ring bond between compatible non-adjacent atoms
  if (rng.below(3) == 0) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      int a = static_cast<int>(rng.below(m.num_atoms()));
      int b = static_cast<int>(rng.below(m.num_atoms()));
      if (a == b || budget[a] < 1 || budget[b] < 1 ||
          m.atoms[a].is_aromatic || m.atoms[b].is_aromatic ||
          m.bond_between(a, b) != nullptr) {
        continue;
      }
      m.add_bond(a, b, BondOrder::kSingle);
      --budget[a];
      --budget[b];
      break;
    }
  }
  if (auto diag = sanitize(m); diag.has_value()) {
    throw std::runtime_error("random molecule failed sanitization: " +
                             diag->message);
  }
  return m;
}

// Rebuild the molecule with atoms in permuted positions.
inline Molecule permute_atoms(const Molecule &m, Rng &rng) {
  std::vector<int> perm(m.num_atoms());
  for (int i = 0; i < m.num_atoms(); ++i) {
    perm[i] = i;
  }
  for (size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.below(i)]);
  }
  Molecule out;
  std::vector<int> where(m.num_atoms());
  for (int i = 0; i < m.num_atoms(); ++i) {
    where[perm[i]] = i;
  }
  out.atoms.resize(m.num_atoms());
  for (int i = 0; i < m.num_atoms(); ++i) {
    Atom a = m.atoms[i];
    a.ring_sizes.clear();
    out.atoms[where[i]] = a;
  }
  std::vector<int> bond_order(m.num_bonds());
  for (int i = 0; i < m.num_bonds(); ++i) {
    bond_order[i] = i;
  }
  for (size_t i = bond_order.size(); i > 1; --i) {
    std::swap(bond_order[i - 1], bond_order[rng.below(i)]);
  }
  for (int bi : bond_order) {
    const Bond &b = m.bonds[bi];
    out.add_bond(where[b.a], where[b.b], b.order, b.is_aromatic);
  }
  if (auto diag = sanitize(out, {.kekulize = true, .refill_hydrogens = true});
      diag.has_value()) {
    throw std::runtime_error("permuted molecule failed sanitization");
  }
  return out;
}

// Brute-force labeled-graph isomorphism; intended for <= 20 atoms.
// Aromatic bonds compare as aromatic regardless of kekule order.
inline bool isomorphic(const Molecule &a, const Molecule &b) {
  if (a.num_atoms() != b.num_atoms() || a.num_bonds() != b.num_bonds()) {
    return false;
  }
  int n = a.num_atoms();
  auto label = [](const Molecule &m, int i) {
    const Atom &at = m.atoms[i];
    return std::tuple(at.atomic_number, at.formal_charge, at.total_h(),
                      at.is_aromatic, m.degree(i));
  };
  auto bond_label = [](const Bond &b) {
    return b.is_aromatic ? 4 : static_cast<int>(b.order);
  };
  std::vector<int> assign(n, -1);
  std::vector<bool> used(n, false);
  std::function<bool(int)> rec = [&](int i) -> bool {
    if (i == n) {
      return true;
    }
    for (int j = 0; j < n; ++j) {
      if (used[j] || label(a, i) != label(b, j)) {
        continue;
      }
      bool ok = true;
      for (int bi : a.adjacency()[i]) {
        const Bond &ab = a.bonds[bi];
        int other = ab.other(i);
        if (assign[other] < 0) {
          continue;
        }
        const Bond *bb = b.bond_between(j, assign[other]);
        if (bb == nullptr || bond_label(*bb) != bond_label(ab)) {
          ok = false;
          break;
        }
      }
      // reject extra adjacencies in b among already-assigned atoms
      if (ok) {
        int a_adj = 0;
        for (int bi : a.adjacency()[i]) {
          if (assign[a.bonds[bi].other(i)] >= 0) {
            ++a_adj;
          }
        }
        int b_adj = 0;
        for (int bi : b.adjacency()[j]) {
          int other = b.bonds[bi].other(j);
          for (int k = 0; k < i; ++k) {
            if (assign[k] == other) {
              ++b_adj;
            }
          }
        }
        ok = a_adj == b_adj;
      }
      if (!ok) {
        continue;
      }
      assign[i] = j;
      used[j] = true;
      if (rec(i + 1)) {
        return true;
      }
      assign[i] = -1;
      used[j] = false;
    }
    return false;
  };
  return rec(0);
}

inline std::vector<std::string> read_lines(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (!line.empty()) {
      out.push_back(line);
    }
  }
  return out;
}

}  // namespace molbench::test

#endif  // MOLBENCH_TESTS_TEST_UTIL_HPP
