//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include "molbench/decompose.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "molbench/smiles.hpp"

namespace molbench {

namespace {

std::vector<std::string> split_tabs(const std::string &line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

std::vector<CleavageRule> load_cleavage_rules(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open rule file: " + path);
  }
  std::vector<CleavageRule> rules;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') {
      continue;
    }
    auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected RULE<TAB>LEFT<TAB>RIGHT");
    }
    CleavageRule rule;
    rule.rule_id = fields[0];
    size_t dash = rule.rule_id.find('-');
    if (dash == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": rule id must be L-R");
    }
    try {
      rule.left_label = std::stoi(rule.rule_id.substr(0, dash));
      rule.right_label = std::stoi(rule.rule_id.substr(dash + 1));
    } catch (const std::exception &) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": rule id must be numeric L-R");
    }
    for (int side = 0; side < 2; ++side) {
      auto parsed = parse_pattern(fields[side + 1]);
      if (!parsed.ok()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": " + parsed.error().message);
      }
      (side == 0 ? rule.left : rule.right) = std::move(parsed.value());
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

const std::vector<CleavageRule> &default_cleavage_rules() {
  static const auto *kRules = new std::vector<CleavageRule>(
      load_cleavage_rules(std::string(MOLBENCH_DATA_DIR) + "/brics.rules"));
  return *kRules;
}

namespace {

struct Cut {
  int bond = -1;
  int label_a = 0;  // environment number on the bond's a side
  int label_b = 0;
};

std::vector<Cut> find_cuts(const Molecule &mol,
                           const std::vector<CleavageRule> &rules) {
  std::vector<Cut> cuts;
  for (int bi = 0; bi < mol.num_bonds(); ++bi) {
    const Bond &b = mol.bonds[bi];
    if (b.order != BondOrder::kSingle || b.is_aromatic || b.in_ring ||
        mol.atoms[b.a].is_dummy() || mol.atoms[b.b].is_dummy()) {
      continue;
    }
    for (const auto &rule : rules) {
      if (matches_at(rule.left, mol, b.a) &&
          matches_at(rule.right, mol, b.b)) {
        cuts.push_back({bi, rule.left_label, rule.right_label});
        break;
      }
      if (matches_at(rule.left, mol, b.b) &&
          matches_at(rule.right, mol, b.a)) {
        cuts.push_back({bi, rule.right_label, rule.left_label});
        break;
      }
    }
  }
  return cuts;
}

// Connected components of the cut graph, each resanitized so ring info
// and hydrogen counts are fragment-local.
std::vector<std::string> split_components(const Molecule &mol) {
  int n = mol.num_atoms();
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) {
      continue;
    }
    std::vector<int> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int bi : mol.adjacency()[u]) {
        int v = mol.bonds[bi].other(u);
        if (comp[v] < 0) {
          comp[v] = ncomp;
          stack.push_back(v);
        }
      }
    }
    ++ncomp;
  }
  std::vector<std::string> out;
  for (int c = 0; c < ncomp; ++c) {
    Molecule frag;
    std::vector<int> remap(n, -1);
    for (int i = 0; i < n; ++i) {
      if (comp[i] == c) {
        remap[i] = frag.num_atoms();
        Atom a = mol.atoms[i];
        a.ring_sizes.clear();
        frag.atoms.push_back(std::move(a));
      }
    }
    for (const auto &b : mol.bonds) {
      if (comp[b.a] == c) {
        frag.add_bond(remap[b.a], remap[b.b], b.order, b.is_aromatic);
      }
    }
    sanitize(frag);
    out.push_back(canonical_smiles(frag));
  }
  return out;
}

}  // namespace

std::vector<std::string> brics_fragments(
    const Molecule &mol, const std::vector<CleavageRule> &rules) {
  auto cuts = find_cuts(mol, rules);
  if (cuts.empty()) {
    return {canonical_smiles(mol)};
  }
  Molecule cut = mol;
  cut.invalidate_caches();
  std::vector<bool> removed(mol.num_bonds(), false);
  for (const auto &c : cuts) {
    removed[c.bond] = true;
  }
  Molecule rebuilt;
  rebuilt.atoms = cut.atoms;
  for (int bi = 0; bi < cut.num_bonds(); ++bi) {
    if (!removed[bi]) {
      const Bond &b = cut.bonds[bi];
      rebuilt.add_bond(b.a, b.b, b.order, b.is_aromatic);
    }
  }
  for (const auto &c : cuts) {
    const Bond &b = cut.bonds[c.bond];
    for (int side = 0; side < 2; ++side) {
      Atom dummy;
      dummy.atomic_number = kDummyAtom;
      dummy.from_bracket = true;
      dummy.link_label =
          static_cast<int16_t>(side == 0 ? c.label_a : c.label_b);
      int idx = rebuilt.num_atoms();
      rebuilt.atoms.push_back(std::move(dummy));
      rebuilt.add_bond(side == 0 ? b.a : b.b, idx, BondOrder::kSingle);
    }
  }
  return split_components(rebuilt);
}

std::vector<std::string> brics_fragments(const Molecule &mol) {
  return brics_fragments(mol, default_cleavage_rules());
}

std::optional<std::string> murcko_scaffold(const Molecule &mol) {
  int n = mol.num_atoms();
  std::vector<bool> keep(n, true);
  // prune terminal atoms outward until only rings and linkers remain
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (!keep[i] || mol.atoms[i].in_ring()) {
        continue;
      }
      int deg = 0;
      for (int bi : mol.adjacency()[i]) {
        if (keep[mol.bonds[bi].other(i)]) {
          ++deg;
        }
      }
      if (deg <= 1) {
        keep[i] = false;
        changed = true;
      }
    }
  }
  bool any = false;
  for (int i = 0; i < n; ++i) {
    any = any || keep[i];
  }
  if (!any) {
    return std::nullopt;
  }
  // exocyclic multiple-bonded partners stay (ring carbonyls and the like)
  for (const auto &b : mol.bonds) {
    if (b.order == BondOrder::kSingle && !b.is_aromatic) {
      continue;
    }
    if (keep[b.a] != keep[b.b]) {
      keep[b.a] = keep[b.b] = true;
    }
  }
  Molecule scaf;
  std::vector<int> remap(n, -1);
  for (int i = 0; i < n; ++i) {
    if (keep[i]) {
      remap[i] = scaf.num_atoms();
      Atom a = mol.atoms[i];
      a.ring_sizes.clear();
      scaf.atoms.push_back(std::move(a));
    }
  }
  for (const auto &b : mol.bonds) {
    if (keep[b.a] && keep[b.b]) {
      scaf.add_bond(remap[b.a], remap[b.b], b.order, b.is_aromatic);
    }
  }
  if (sanitize(scaf).has_value()) {
    return std::nullopt;  // pruned bracket atoms can leave invalid valences
  }
  return canonical_smiles(scaf);
}

Profile build_profile(const std::vector<std::string> &strings) {
  Profile p;
  for (const auto &s : strings) {
    p.add(s);
  }
  return p;
}

}  // namespace molbench
