//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include "molbench/smiles.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <string>

namespace molbench {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct Parser {
  std::string_view text;
  size_t pos = 0;
  Molecule mol;

  ParseDiagnostic diag;
  bool failed = false;

  int prev_atom = -1;
  std::vector<int> branch_stack;
  char pending_bond = 0;  // 0 = none

  // open ring closures: digit -> (atom, bond char, position)
  struct OpenRing {
    int atom;
    char bond;
    size_t pos;
  };
  std::map<int, OpenRing> open_rings;

  bool fail(ParseErrorKind kind, std::string msg, size_t at) {
    if (!failed) {
      failed = true;
      diag = {at, kind, std::move(msg)};
    }
    return false;
  }

  char peek() const { return pos < text.size() ? text[pos] : '\0'; }

  int add_atom(Atom a) {
    mol.atoms.push_back(std::move(a));
    return mol.num_atoms() - 1;
  }

  static bool is_bond_char(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '/' ||
           c == '\\';
  }

  bool connect(int from, int to, char bond, size_t at) {
    if (from == to) {
      return fail(ParseErrorKind::kLexical, "bond from atom to itself", at);
    }
    for (const auto &b : mol.bonds) {
      if ((b.a == from && b.b == to) || (b.a == to && b.b == from)) {
        return fail(ParseErrorKind::kLexical, "duplicate bond between atoms",
                    at);
      }
    }
    BondOrder order = BondOrder::kSingle;
    bool aromatic = false;
    switch (bond) {
      case 0:
        aromatic = mol.atoms[from].is_aromatic && mol.atoms[to].is_aromatic;
        break;
      case '-':
      case '/':
      case '\\':
        break;
      case '=':
        order = BondOrder::kDouble;
        break;
      case '#':
        order = BondOrder::kTriple;
        break;
      case ':':
        aromatic = true;
        break;
      default:
        return fail(ParseErrorKind::kLexical, "unknown bond symbol", at);
    }
    mol.add_bond(from, to, order, aromatic);
    return true;
  }

  // Two-letter organic-subset symbols first (Cl, Br), then one-letter.
  bool parse_organic_atom() {
    size_t start = pos;
    std::string_view rest = text.substr(pos);
    const ElementInfo *info = nullptr;
    bool aromatic = false;
    size_t len = 0;
    if (rest.size() >= 2 && (rest.substr(0, 2) == "Cl" ||
                             rest.substr(0, 2) == "Br")) {
      info = element_by_symbol(rest.substr(0, 2));
      len = 2;
    } else {
      char c = rest[0];
      if (std::islower(static_cast<unsigned char>(c)) != 0) {
        aromatic = true;
      }
      info = element_by_symbol(rest.substr(0, 1));
      len = 1;
      if (info != nullptr && !info->organic_subset) {
        info = nullptr;
      }
      if (info != nullptr && aromatic && !info->can_be_aromatic) {
        info = nullptr;
      }
    }
    if (info == nullptr) {
      return fail(ParseErrorKind::kLexical, "unknown token", start);
    }
    pos += len;
    Atom a;
    a.atomic_number = info->atomic_number;
    a.is_aromatic = aromatic;
    int idx = add_atom(a);
    return attach(idx, start);
  }

  bool parse_bracket_atom() {
    size_t start = pos;
    ++pos;  // '['
    // isotope, parsed and ignored
    while (is_digit(peek())) {
      ++pos;
    }
    if (pos >= text.size()) {
      return fail(ParseErrorKind::kLexical, "unterminated bracket atom",
                  start);
    }
    if (peek() == '*') {
      return fail(ParseErrorKind::kLexical,
                  "wildcard atom not allowed in molecules", pos);
    }
    bool aromatic = std::islower(static_cast<unsigned char>(peek())) != 0;
    std::string_view rest = text.substr(pos);
    const ElementInfo *info = nullptr;
    size_t len = 0;
    if (rest.size() >= 2 &&
        std::isupper(static_cast<unsigned char>(rest[0])) != 0 &&
        std::islower(static_cast<unsigned char>(rest[1])) != 0) {
      info = element_by_symbol(rest.substr(0, 2));
      len = 2;
    }
    if (info == nullptr && !rest.empty() &&
        std::isalpha(static_cast<unsigned char>(rest[0])) != 0) {
      info = element_by_symbol(rest.substr(0, 1));
      len = 1;
    }
    if (info == nullptr) {
      return fail(ParseErrorKind::kLexical, "unknown element symbol", pos);
    }
    if (aromatic && !info->can_be_aromatic) {
      return fail(ParseErrorKind::kAromaticity,
                  "element cannot be aromatic", pos);
    }
    pos += len;

    Atom a;
    a.atomic_number = info->atomic_number;
    a.is_aromatic = aromatic;
    a.from_bracket = true;

    // chirality, parsed and discarded
    while (peek() == '@') {
      ++pos;
    }
    if (peek() == 'T' || peek() == 'A' || peek() == 'S' || peek() == 'O') {
      // @TH1/@AL1/... extended chirality classes: skip letters+digits
      while (std::isalnum(static_cast<unsigned char>(peek())) != 0 &&
             peek() != 'H') {
        ++pos;
      }
    }
    if (peek() == 'H') {
      ++pos;
      int count = 1;
      if (is_digit(peek())) {
        count = 0;
        while (is_digit(peek())) {
          count = count * 10 + (text[pos++] - '0');
        }
      }
      a.explicit_h = static_cast<uint8_t>(count);
    }
    if (peek() == '+' || peek() == '-') {
      char sign = text[pos++];
      int mag = 1;
      if (is_digit(peek())) {
        mag = 0;
        while (is_digit(peek())) {
          mag = mag * 10 + (text[pos++] - '0');
        }
      } else {
        while (peek() == sign) {
          ++pos;
          ++mag;
        }
      }
      a.formal_charge = static_cast<int8_t>(sign == '+' ? mag : -mag);
    }
    if (peek() == ':') {  // atom class, ignored
      ++pos;
      while (is_digit(peek())) {
        ++pos;
      }
    }
    if (peek() != ']') {
      return fail(ParseErrorKind::kLexical, "expected ']'", pos);
    }
    ++pos;
    int idx = add_atom(a);
    return attach(idx, start);
  }

  bool attach(int idx, size_t at) {
    if (prev_atom >= 0) {
      if (!connect(prev_atom, idx, pending_bond, at)) {
        return false;
      }
    } else if (pending_bond != 0) {
      return fail(ParseErrorKind::kLexical, "bond with no preceding atom",
                  at);
    }
    pending_bond = 0;
    prev_atom = idx;
    return true;
  }

  bool parse_ring_closure(int num, size_t at) {
    if (prev_atom < 0) {
      return fail(ParseErrorKind::kLexical,
                  "ring closure with no preceding atom", at);
    }
    auto it = open_rings.find(num);
    if (it == open_rings.end()) {
      open_rings[num] = {prev_atom, pending_bond, at};
      pending_bond = 0;
      return true;
    }
    OpenRing open = it->second;
    open_rings.erase(it);
    char bond = pending_bond;
    if (bond != 0 && open.bond != 0 && bond != open.bond) {
      return fail(ParseErrorKind::kLexical,
                  "conflicting bond orders on ring closure", at);
    }
    if (bond == 0) {
      bond = open.bond;
    }
    pending_bond = 0;
    return connect(open.atom, prev_atom, bond, at);
  }

  bool run() {
    if (text.empty()) {
      return fail(ParseErrorKind::kEmptyInput, "empty input", 0);
    }
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '[') {
        if (!parse_bracket_atom()) {
          return false;
        }
      } else if (c == '(') {
        if (prev_atom < 0) {
          return fail(ParseErrorKind::kLexical,
                      "branch with no preceding atom", pos);
        }
        if (pending_bond != 0) {
          return fail(ParseErrorKind::kLexical, "bond before branch open",
                      pos);
        }
        branch_stack.push_back(prev_atom);
        ++pos;
      } else if (c == ')') {
        if (branch_stack.empty()) {
          return fail(ParseErrorKind::kUnclosedBranch,
                      "unmatched closing parenthesis", pos);
        }
        if (pending_bond != 0) {
          return fail(ParseErrorKind::kLexical, "dangling bond at branch end",
                      pos);
        }
        prev_atom = branch_stack.back();
        branch_stack.pop_back();
        ++pos;
      } else if (is_digit(c)) {
        ++pos;
        if (!parse_ring_closure(c - '0', pos - 1)) {
          return false;
        }
      } else if (c == '%') {
        if (pos + 2 >= text.size() + 1 || !is_digit(text[pos + 1]) ||
            pos + 2 >= text.size() || !is_digit(text[pos + 2])) {
          return fail(ParseErrorKind::kLexical,
                      "%% must be followed by two digits", pos);
        }
        int num = (text[pos + 1] - '0') * 10 + (text[pos + 2] - '0');
        pos += 3;
        if (!parse_ring_closure(num, pos - 3)) {
          return false;
        }
      } else if (Parser::is_bond_char(c)) {
        if (pending_bond != 0) {
          return fail(ParseErrorKind::kLexical, "two bond symbols in a row",
                      pos);
        }
        pending_bond = c;
        ++pos;
      } else if (c == '.') {
        if (pending_bond != 0) {
          return fail(ParseErrorKind::kLexical, "bond before dot", pos);
        }
        mol.disconnected = true;
        prev_atom = -1;
        ++pos;
        if (pos >= text.size()) {
          return fail(ParseErrorKind::kLexical, "dot at end of input",
                      pos - 1);
        }
      } else {
        if (!parse_organic_atom()) {
          return false;
        }
      }
    }
    if (!branch_stack.empty()) {
      return fail(ParseErrorKind::kUnclosedBranch, "unclosed branch",
                  text.size());
    }
    if (!open_rings.empty()) {
      return fail(ParseErrorKind::kUnmatchedRingBond,
                  "unmatched ring-closure digit",
                  open_rings.begin()->second.pos);
    }
    if (pending_bond != 0) {
      return fail(ParseErrorKind::kLexical, "dangling bond at end of input",
                  text.size());
    }
    if (mol.atoms.empty()) {
      return fail(ParseErrorKind::kEmptyMolecule, "no atoms in input", 0);
    }
    return true;
  }
};

// --- ring perception ------------------------------------------------------

void find_ring_bonds(const Molecule &mol, std::vector<bool> &is_ring_bond) {
  int n = mol.num_atoms();
  is_ring_bond.assign(mol.num_bonds(), true);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  // iterative DFS bridge finding
  struct Frame {
    int atom;
    int parent_bond;
    size_t next;
  };
  const auto &adj = mol.adjacency();
  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1) {
      continue;
    }
    std::vector<Frame> stack{{root, -1, 0}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame &f = stack.back();
      if (f.next < adj[f.atom].size()) {
        int bi = adj[f.atom][f.next++];
        if (bi == f.parent_bond) {
          continue;
        }
        int v = mol.bonds[bi].other(f.atom);
        if (disc[v] == -1) {
          disc[v] = low[v] = timer++;
          stack.push_back({v, bi, 0});
        } else {
          low[f.atom] = std::min(low[f.atom], disc[v]);
        }
      } else {
        int u = f.atom;
        int pb = f.parent_bond;
        stack.pop_back();
        if (pb >= 0) {
          int p = mol.bonds[pb].other(u);
          low[p] = std::min(low[p], low[u]);
          if (low[u] > disc[p]) {
            is_ring_bond[pb] = false;  // bridge
          }
        }
      }
    }
  }
}

// Shortest cycle through a given ring bond, restricted to ring bonds.
std::vector<int> shortest_cycle_through(const Molecule &mol,
                                        const std::vector<bool> &is_ring_bond,
                                        int bond_idx) {
  int src = mol.bonds[bond_idx].a;
  int dst = mol.bonds[bond_idx].b;
  int n = mol.num_atoms();
  std::vector<int> prev(n, -2);
  std::queue<int> q;
  q.push(src);
  prev[src] = -1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    if (u == dst) {
      break;
    }
    for (int bi : mol.adjacency()[u]) {
      if (bi == bond_idx || !is_ring_bond[bi]) {
        continue;
      }
      int v = mol.bonds[bi].other(u);
      if (prev[v] == -2) {
        prev[v] = u;
        q.push(v);
      }
    }
  }
  if (prev[dst] == -2) {
    return {};
  }
  std::vector<int> cycle;
  for (int v = dst; v != -1; v = prev[v]) {
    cycle.push_back(v);
  }
  return cycle;  // src..dst path; bond closes the cycle
}

std::vector<uint64_t> cycle_edge_vector(const Molecule &mol,
                                        const std::vector<int> &cycle,
                                        const std::vector<int> &bond_pos,
                                        size_t words) {
  std::vector<uint64_t> vec(words, 0);
  auto set_bond = [&](int a, int b) {
    const Bond *bond = mol.bond_between(a, b);
    int p = bond_pos[static_cast<int>(bond - mol.bonds.data())];
    vec[p / 64] |= uint64_t{1} << (p % 64);
  };
  for (size_t i = 0; i < cycle.size(); ++i) {
    set_bond(cycle[i], cycle[(i + 1) % cycle.size()]);
  }
  return vec;
}

std::vector<std::vector<int>> minimum_cycle_basis(
    const Molecule &mol, const std::vector<bool> &is_ring_bond) {
  std::vector<int> bond_pos(mol.num_bonds(), -1);
  int num_ring_bonds = 0;
  for (int i = 0; i < mol.num_bonds(); ++i) {
    if (is_ring_bond[i]) {
      bond_pos[i] = num_ring_bonds++;
    }
  }
  if (num_ring_bonds == 0) {
    return {};
  }
  // cycle-space dimension of the ring subgraph
  std::vector<bool> ring_atom(mol.num_atoms(), false);
  for (int i = 0; i < mol.num_bonds(); ++i) {
    if (is_ring_bond[i]) {
      ring_atom[mol.bonds[i].a] = ring_atom[mol.bonds[i].b] = true;
    }
  }
  int num_ring_atoms = 0;
  for (bool f : ring_atom) {
    num_ring_atoms += f ? 1 : 0;
  }
  // components of the ring subgraph
  std::vector<int> comp(mol.num_atoms(), -1);
  int num_comp = 0;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (!ring_atom[i] || comp[i] != -1) {
      continue;
    }
    std::queue<int> q;
    q.push(i);
    comp[i] = num_comp;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int bi : mol.adjacency()[u]) {
        if (!is_ring_bond[bi]) {
          continue;
        }
        int v = mol.bonds[bi].other(u);
        if (comp[v] == -1) {
          comp[v] = num_comp;
          q.push(v);
        }
      }
    }
    ++num_comp;
  }
  int dim = num_ring_bonds - num_ring_atoms + num_comp;

  std::vector<std::vector<int>> candidates;
  for (int i = 0; i < mol.num_bonds(); ++i) {
    if (is_ring_bond[i]) {
      auto cyc = shortest_cycle_through(mol, is_ring_bond, i);
      if (!cyc.empty()) {
        candidates.push_back(std::move(cyc));
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto &a, const auto &b) {
                     return a.size() < b.size();
                   });
  size_t words = (num_ring_bonds + 63) / 64;
  std::vector<std::vector<uint64_t>> pivots;  // reduced row echelon rows
  std::vector<std::vector<int>> basis;
  for (auto &cyc : candidates) {
    if (static_cast<int>(basis.size()) == dim) {
      break;
    }
    auto vec = cycle_edge_vector(mol, cyc, bond_pos, words);
    for (const auto &row : pivots) {
      int hi = -1;
      for (int w = static_cast<int>(words) - 1; w >= 0 && hi < 0; --w) {
        if (row[w] != 0) {
          hi = w * 64 + 63 - std::countl_zero(row[w]);
        }
      }
      if (hi >= 0 && ((vec[hi / 64] >> (hi % 64)) & 1) != 0) {
        for (size_t w = 0; w < words; ++w) {
          vec[w] ^= row[w];
        }
      }
    }
    bool nonzero = false;
    for (uint64_t w : vec) {
      nonzero = nonzero || w != 0;
    }
    if (nonzero) {
      pivots.push_back(std::move(vec));
      basis.push_back(std::move(cyc));
    }
  }
  return basis;
}

// --- aromaticity perception -------------------------------------------------

// Huckel perception over basis rings of a kekule-form input, so both the
// lowercase and the alternating-bond spelling of a ring canonicalize to the
// same string. Contributions: in-ring double bond 1, exocyclic double bond
// 0, lone-pair heteroatom 2; a saturated carbon disqualifies the ring.
// Iterated to a fixpoint so a double bond into an already-aromatic ring
// counts as part of the pi system.
void perceive_aromaticity(Molecule &mol) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto &ring : mol.rings()) {
      std::vector<bool> in_ring(mol.num_atoms(), false);
      bool candidate = true;
      for (int atom : ring) {
        in_ring[atom] = true;
        const Atom &a = mol.atoms[atom];
        const ElementInfo *info = element_by_number(a.atomic_number);
        if (a.formal_charge != 0 || info == nullptr ||
            !info->can_be_aromatic) {
          candidate = false;
        }
      }
      if (!candidate) {
        continue;
      }
      bool all_aromatic = true;
      for (int atom : ring) {
        all_aromatic = all_aromatic && mol.atoms[atom].is_aromatic;
      }
      if (all_aromatic) {
        continue;
      }
      int pi = 0;
      int lone_pair_donors = 0;
      bool ok = true;
      for (int atom : ring) {
        int contribution = -1;
        for (int bi : mol.adjacency()[atom]) {
          const Bond &b = mol.bonds[bi];
          if (b.order == BondOrder::kTriple) {
            ok = false;
            break;
          }
          if (b.order != BondOrder::kDouble && !b.is_aromatic) {
            continue;
          }
          int other = b.other(atom);
          if (in_ring[other] || mol.atoms[other].is_aromatic) {
            contribution = 1;  // double bond inside the pi system
          } else if (contribution < 0) {
            contribution = 0;  // exocyclic double bond (quinone carbon)
          }
        }
        if (!ok) {
          break;
        }
        if (contribution < 0) {
          if (mol.atoms[atom].atomic_number != 6) {
            contribution = 2;  // heteroatom lone pair
            ++lone_pair_donors;
          } else {
            ok = false;  // saturated carbon breaks conjugation
            break;
          }
        }
        pi += contribution;
      }
      // a pi system accommodates at most one in-plane lone-pair donor;
      // more means the ring is simply saturated (e.g. trithiane)
      if (!ok || lone_pair_donors > 1 || pi % 4 != 2) {
        continue;
      }
      for (int atom : ring) {
        mol.atoms[atom].is_aromatic = true;
      }
      for (auto &b : mol.bonds) {
        if (b.in_ring && in_ring[b.a] && in_ring[b.b]) {
          b.is_aromatic = true;
        }
      }
      changed = true;
    }
  }
}

// --- kekulization ---------------------------------------------------------

// Sigma valence: explicit hydrogens plus bonds with aromatic counted once.
int sigma_count(const Molecule &mol, int atom) {
  int s = mol.atoms[atom].explicit_h;
  for (int bi : mol.adjacency()[atom]) {
    const Bond &b = mol.bonds[bi];
    s += b.is_aromatic ? 1 : static_cast<int>(b.order);
  }
  return s;
}

// Whether an aromatic atom must receive one double bond in the kekule
// assignment. Derived from the smallest charge-adjusted valence that fits
// its sigma framework.
std::optional<bool> aromatic_needs_double(const Molecule &mol, int atom) {
  const Atom &a = mol.atoms[atom];
  if (a.is_dummy()) {
    return false;
  }
  int s = sigma_count(mol, atom);
  auto v = min_fitting_valence(a.atomic_number, a.formal_charge, s);
  if (!v.has_value()) {
    return std::nullopt;  // valence violation
  }
  return *v - s >= 1;
}

bool kekulize_in_place(Molecule &mol, ParseDiagnostic *diag) {
  int n = mol.num_atoms();
  std::vector<bool> needy(n, false);
  bool any_aromatic_bond = false;
  for (const auto &b : mol.bonds) {
    any_aromatic_bond = any_aromatic_bond || b.is_aromatic;
  }
  if (!any_aromatic_bond) {
    return true;
  }
  for (int i = 0; i < n; ++i) {
    if (!mol.atoms[i].is_aromatic) {
      continue;
    }
    auto need = aromatic_needs_double(mol, i);
    if (!need.has_value()) {
      if (diag != nullptr) {
        *diag = {0, ParseErrorKind::kValence,
                 "aromatic atom exceeds allowed valence"};
      }
      return false;
    }
    needy[i] = *need;
  }
  // adjacency among needy atoms over aromatic bonds
  std::vector<std::vector<int>> nb(n);
  std::vector<int> needy_atoms;
  for (int i = 0; i < mol.num_bonds(); ++i) {
    const Bond &b = mol.bonds[i];
    if (b.is_aromatic && needy[b.a] && needy[b.b]) {
      nb[b.a].push_back(b.b);
      nb[b.b].push_back(b.a);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (needy[i]) {
      needy_atoms.push_back(i);
    }
  }
  // Isolated aromatic monocycles must carry 4n+2 pi electrons; a plain
  // perfect matching would otherwise admit antiaromatic rings such as
  // c1ccc1. Fused systems are validated by kekulizability alone.
  std::vector<int> ring_membership(n, 0);
  for (const auto &ring : mol.rings()) {
    for (int a : ring) {
      ++ring_membership[a];
    }
  }
  for (const auto &ring : mol.rings()) {
    bool all_aromatic_bonds = true;
    for (size_t i = 0; i < ring.size(); ++i) {
      const Bond *b = mol.bond_between(ring[i], ring[(i + 1) % ring.size()]);
      all_aromatic_bonds = all_aromatic_bonds && b != nullptr &&
                           b->is_aromatic;
    }
    bool isolated = true;
    for (int a : ring) {
      isolated = isolated && ring_membership[a] == 1;
    }
    if (!all_aromatic_bonds || !isolated) {
      continue;
    }
    int pi = 0;
    for (int a : ring) {
      if (needy[a]) {
        pi += 1;
      } else {
        bool exocyclic_multiple = false;
        for (int bi : mol.adjacency()[a]) {
          const Bond &b = mol.bonds[bi];
          exocyclic_multiple = exocyclic_multiple ||
                               (!b.is_aromatic && b.order != BondOrder::kSingle);
        }
        pi += exocyclic_multiple ? 0 : 2;
      }
    }
    if (pi % 4 != 2) {
      if (diag != nullptr) {
        *diag = {0, ParseErrorKind::kKekulization,
                 "aromatic ring with non-aromatic electron count"};
      }
      return false;
    }
  }
  std::vector<int> mate(n, -1);
  std::function<bool(size_t)> solve = [&](size_t idx) -> bool {
    while (idx < needy_atoms.size() && mate[needy_atoms[idx]] != -1) {
      ++idx;
    }
    if (idx == needy_atoms.size()) {
      return true;
    }
    int u = needy_atoms[idx];
    for (int v : nb[u]) {
      if (mate[v] == -1) {
        mate[u] = v;
        mate[v] = u;
        if (solve(idx + 1)) {
          return true;
        }
        mate[u] = mate[v] = -1;
      }
    }
    return false;
  };
  if (!solve(0)) {
    if (diag != nullptr) {
      *diag = {0, ParseErrorKind::kKekulization,
               "no kekule assignment for aromatic system"};
    }
    return false;
  }
  for (auto &b : mol.bonds) {
    if (b.is_aromatic) {
      b.order = (mate[b.a] == b.b) ? BondOrder::kDouble : BondOrder::kSingle;
    }
  }
  return true;
}

bool fill_hydrogens(Molecule &mol, ParseDiagnostic *diag) {
  for (int i = 0; i < mol.num_atoms(); ++i) {
    Atom &a = mol.atoms[i];
    if (a.is_dummy()) {
      a.implicit_h = 0;
      continue;
    }
    int bond_sum = mol.bond_order_sum(i);
    if (!a.from_bracket) {
      auto v = min_fitting_valence(a.atomic_number, a.formal_charge,
                                   bond_sum);
      if (!v.has_value()) {
        if (diag != nullptr) {
          *diag = {0, ParseErrorKind::kValence, "valence violation"};
        }
        return false;
      }
      a.implicit_h = static_cast<uint8_t>(*v - bond_sum);
    } else {
      a.implicit_h = 0;
      auto allowed = allowed_valences(a.atomic_number, a.formal_charge);
      if (!allowed.empty()) {
        int total = bond_sum + a.explicit_h;
        if (std::find(allowed.begin(), allowed.end(), total) ==
            allowed.end()) {
          if (diag != nullptr) {
            *diag = {0, ParseErrorKind::kValence, "valence violation"};
          }
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

std::vector<std::vector<int>> ring_info(const Molecule &mol) {
  std::vector<bool> is_ring_bond;
  find_ring_bonds(mol, is_ring_bond);
  return minimum_cycle_basis(mol, is_ring_bond);
}

std::optional<ParseDiagnostic> sanitize(Molecule &mol,
                                        const SanitizeOptions &opts) {
  mol.invalidate_caches();
  std::vector<bool> is_ring_bond;
  find_ring_bonds(mol, is_ring_bond);
  for (int i = 0; i < mol.num_bonds(); ++i) {
    mol.bonds[i].in_ring = is_ring_bond[i];
  }
  auto basis = minimum_cycle_basis(mol, is_ring_bond);
  for (auto &a : mol.atoms) {
    a.ring_sizes.clear();
  }
  for (const auto &ring : basis) {
    for (int atom : ring) {
      mol.atoms[atom].ring_sizes.push_back(static_cast<int>(ring.size()));
    }
  }
  for (auto &a : mol.atoms) {
    std::sort(a.ring_sizes.begin(), a.ring_sizes.end());
  }
  mol.mutable_rings() = std::move(basis);

  perceive_aromaticity(mol);

  // Aromatic bonds outside rings (e.g. the biphenyl junction written
  // between two lowercase atoms) are plain single bonds.
  for (auto &b : mol.bonds) {
    if (b.is_aromatic && !b.in_ring) {
      b.is_aromatic = false;
      b.order = BondOrder::kSingle;
    }
  }
  for (const auto &b : mol.bonds) {
    if (b.is_aromatic &&
        (!mol.atoms[b.a].is_aromatic || !mol.atoms[b.b].is_aromatic)) {
      return ParseDiagnostic{0, ParseErrorKind::kAromaticity,
                             "aromatic bond to non-aromatic atom"};
    }
  }
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (mol.atoms[i].is_aromatic && !mol.atoms[i].in_ring()) {
      return ParseDiagnostic{0, ParseErrorKind::kAromaticity,
                             "aromatic atom outside any ring"};
    }
  }

  ParseDiagnostic diag;
  if (opts.kekulize && !kekulize_in_place(mol, &diag)) {
    return diag;
  }
  if (opts.refill_hydrogens && !fill_hydrogens(mol, &diag)) {
    return diag;
  }
  mol.invalidate_caches();
  return std::nullopt;
}

ParseResult parse_smiles(std::string_view text) {
  Parser p;
  p.text = text;
  if (!p.run()) {
    return ParseResult::failure(p.diag);
  }
  auto err = sanitize(p.mol);
  if (err.has_value()) {
    return ParseResult::failure(*err);
  }
  return ParseResult::success(std::move(p.mol));
}

ParseResult kekulize(const Molecule &mol) {
  Molecule copy = mol;
  ParseDiagnostic diag;
  if (!kekulize_in_place(copy, &diag)) {
    return ParseResult::failure(diag);
  }
  if (!fill_hydrogens(copy, &diag)) {
    return ParseResult::failure(diag);
  }
  copy.invalidate_caches();
  return ParseResult::success(std::move(copy));
}

// --- canonical ranking ----------------------------------------------------

namespace {

int bond_code(const Bond &b) {
  return b.is_aromatic ? 4 : static_cast<int>(b.order);
}

std::vector<int> dense_ranks(const std::vector<std::vector<uint64_t>> &keys) {
  int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> ranks(n, 0);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && keys[order[i]] != keys[order[i - 1]]) {
      ++r;
    }
    ranks[order[i]] = r;
  }
  return ranks;
}

int class_count(const std::vector<int> &ranks) {
  return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end()) + 1;
}

std::vector<int> refine(const Molecule &mol, std::vector<int> ranks) {
  int n = mol.num_atoms();
  int classes = class_count(ranks);
  while (classes < n) {
    std::vector<std::vector<uint64_t>> keys(n);
    for (int i = 0; i < n; ++i) {
      keys[i].push_back(static_cast<uint64_t>(ranks[i]));
      std::vector<uint64_t> nbr;
      for (int bi : mol.adjacency()[i]) {
        const Bond &b = mol.bonds[bi];
        nbr.push_back(static_cast<uint64_t>(ranks[b.other(i)]) * 8 +
                      bond_code(b));
      }
      std::sort(nbr.begin(), nbr.end());
      keys[i].insert(keys[i].end(), nbr.begin(), nbr.end());
    }
    auto next = dense_ranks(keys);
    int next_classes = class_count(next);
    if (next_classes == classes) {
      return next;
    }
    ranks = std::move(next);
    classes = next_classes;
  }
  return ranks;
}

std::vector<int> initial_ranks(const Molecule &mol) {
  int n = mol.num_atoms();
  std::vector<std::vector<uint64_t>> keys(n);
  for (int i = 0; i < n; ++i) {
    const Atom &a = mol.atoms[i];
    keys[i] = {a.atomic_number,
               static_cast<uint64_t>(a.link_label + 1),
               static_cast<uint64_t>(mol.degree(i)),
               static_cast<uint64_t>(a.formal_charge + 16),
               static_cast<uint64_t>(a.total_h()),
               a.in_ring() ? 1u : 0u,
               a.is_aromatic ? 1u : 0u};
  }
  return dense_ranks(keys);
}

// --- canonical writer -----------------------------------------------------

// Hydrogen count the parser would infer for this atom written without
// brackets; -1 if the unbracketed form is impossible.
int inferred_unbracketed_h(const Molecule &mol, int atom) {
  const Atom &a = mol.atoms[atom];
  if (!a.is_aromatic) {
    int s = mol.bond_order_sum(atom);
    auto v = min_fitting_valence(a.atomic_number, 0, s);
    return v.has_value() ? *v - s : -1;
  }
  int s = 0;
  for (int bi : mol.adjacency()[atom]) {
    const Bond &b = mol.bonds[bi];
    s += b.is_aromatic ? 1 : static_cast<int>(b.order);
  }
  auto v = min_fitting_valence(a.atomic_number, 0, s);
  if (!v.has_value()) {
    return -1;
  }
  int needs = (*v - s >= 1) ? 1 : 0;
  auto v2 = min_fitting_valence(a.atomic_number, 0, s + needs);
  return v2.has_value() ? *v2 - (s + needs) : -1;
}

std::string atom_token(const Molecule &mol, int atom) {
  const Atom &a = mol.atoms[atom];
  if (a.is_dummy()) {
    std::string t = "[";
    if (a.link_label >= 0) {
      t += std::to_string(a.link_label);
    }
    t += "*]";
    return t;
  }
  const ElementInfo *info = element_by_number(a.atomic_number);
  std::string sym = info->symbol;
  if (a.is_aromatic) {
    for (auto &c : sym) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  bool plain = info->organic_subset && a.formal_charge == 0 &&
               inferred_unbracketed_h(mol, atom) == a.total_h();
  if (plain) {
    return sym;
  }
  std::string t = "[" + sym;
  int h = a.total_h();
  if (h > 0) {
    t += "H";
    if (h > 1) {
      t += std::to_string(h);
    }
  }
  if (a.formal_charge != 0) {
    t += a.formal_charge > 0 ? "+" : "-";
    int mag = std::abs(a.formal_charge);
    if (mag > 1) {
      t += std::to_string(mag);
    }
  }
  t += "]";
  return t;
}

std::string bond_token(const Molecule &mol, const Bond &b) {
  if (b.is_aromatic) {
    return "";
  }
  switch (b.order) {
    case BondOrder::kSingle:
      return (mol.atoms[b.a].is_aromatic && mol.atoms[b.b].is_aromatic)
                 ? "-"
                 : "";
    case BondOrder::kDouble:
      return "=";
    case BondOrder::kTriple:
      return "#";
  }
  return "";
}

std::string ring_digit_token(int digit) {
  if (digit < 10) {
    return std::to_string(digit);
  }
  return "%" + std::to_string(digit);
}

// Emit a SMILES string following a fixed discrete ranking.
std::string write_by_ranks(const Molecule &mol, const std::vector<int> &ranks) {
  int n = mol.num_atoms();
  std::vector<int> disc(n, -1);
  std::vector<int> parent_bond(n, -1);
  std::vector<std::vector<int>> children(n);  // tree child atoms, rank order
  std::vector<std::vector<int>> closures(n);  // closure bond indices at atom
  std::vector<bool> bond_used(mol.num_bonds(), false);

  std::vector<int> comp_roots;
  int timer = 0;
  std::vector<int> atom_order(n);
  std::iota(atom_order.begin(), atom_order.end(), 0);
  std::sort(atom_order.begin(), atom_order.end(),
            [&](int a, int b) { return ranks[a] < ranks[b]; });

  for (int root : atom_order) {
    if (disc[root] != -1) {
      continue;
    }
    comp_roots.push_back(root);
    // DFS in rank order
    std::vector<std::pair<int, size_t>> stack{{root, 0}};
    disc[root] = timer++;
    std::vector<std::vector<int>> sorted_adj(n);
    while (!stack.empty()) {
      auto &[u, next] = stack.back();
      if (sorted_adj[u].empty() && !mol.adjacency()[u].empty()) {
        sorted_adj[u] = mol.adjacency()[u];
        std::sort(sorted_adj[u].begin(), sorted_adj[u].end(),
                  [&](int x, int y) {
                    return ranks[mol.bonds[x].other(u)] <
                           ranks[mol.bonds[y].other(u)];
                  });
      }
      if (next < sorted_adj[u].size()) {
        int bi = sorted_adj[u][next++];
        if (bond_used[bi]) {
          continue;
        }
        int v = mol.bonds[bi].other(u);
        if (disc[v] == -1) {
          bond_used[bi] = true;
          disc[v] = timer++;
          parent_bond[v] = bi;
          children[u].push_back(v);
          stack.push_back({v, 0});
        } else {
          bond_used[bi] = true;  // ring closure
          closures[u].push_back(bi);
          closures[v].push_back(bi);
        }
      } else {
        stack.pop_back();
      }
    }
  }

  // Assign ring-closure digits by simulating emission order (pre-order).
  // For each closure bond: opened at the earlier-discovered endpoint,
  // closed at the later one. Digits are reused once closed.
  std::vector<int> emit_order(n);
  {
    std::vector<int> by_disc(n);
    std::iota(by_disc.begin(), by_disc.end(), 0);
    std::sort(by_disc.begin(), by_disc.end(),
              [&](int a, int b) { return disc[a] < disc[b]; });
    emit_order = by_disc;
  }
  auto open_end = [&](int bi) {
    const Bond &b = mol.bonds[bi];
    return disc[b.a] < disc[b.b] ? b.a : b.b;
  };
  std::vector<std::vector<int>> opens(n), closes(n);
  for (int u = 0; u < n; ++u) {
    for (int bi : closures[u]) {
      if (open_end(bi) == u) {
        opens[u].push_back(bi);
      } else {
        closes[u].push_back(bi);
      }
    }
    auto other_disc = [&](int bi) {
      const Bond &b = mol.bonds[bi];
      int other = (b.a == u) ? b.b : b.a;
      return disc[other];
    };
    std::sort(closes[u].begin(), closes[u].end(),
              [&](int x, int y) { return other_disc(x) < other_disc(y); });
    std::sort(opens[u].begin(), opens[u].end(),
              [&](int x, int y) { return other_disc(x) < other_disc(y); });
  }
  std::vector<int> bond_digit(mol.num_bonds(), -1);
  {
    std::vector<bool> digit_used(100, false);
    auto grab_digit = [&]() {
      for (int d = 1; d < 100; ++d) {
        if (!digit_used[d]) {
          digit_used[d] = true;
          return d;
        }
      }
      return 99;
    };
    for (int u : emit_order) {
      for (int bi : closes[u]) {
        digit_used[bond_digit[bi]] = false;
      }
      for (int bi : opens[u]) {
        bond_digit[bi] = grab_digit();
      }
    }
  }

  // Recursive emission per component.
  std::function<void(int, std::string &)> emit = [&](int u, std::string &out) {
    out += atom_token(mol, u);
    for (int bi : closes[u]) {
      out += ring_digit_token(bond_digit[bi]);
    }
    for (int bi : opens[u]) {
      out += bond_token(mol, mol.bonds[bi]);
      out += ring_digit_token(bond_digit[bi]);
    }
    for (size_t i = 0; i < children[u].size(); ++i) {
      int v = children[u][i];
      bool last = i + 1 == children[u].size();
      if (!last) {
        out += "(";
      }
      out += bond_token(mol, mol.bonds[parent_bond[v]]);
      emit(v, out);
      if (!last) {
        out += ")";
      }
    }
  };
  std::string result;
  for (size_t c = 0; c < comp_roots.size(); ++c) {
    if (c > 0) {
      result += ".";
    }
    emit(comp_roots[c], result);
  }
  return result;
}

std::vector<int> promote(const Molecule &mol, const std::vector<int> &ranks,
                         int atom) {
  std::vector<int> next(ranks.size());
  for (size_t i = 0; i < ranks.size(); ++i) {
    next[i] = ranks[i] * 2;
  }
  next[atom] -= 1;
  // renormalize to dense ranks
  std::vector<std::vector<uint64_t>> keys(ranks.size());
  for (size_t i = 0; i < ranks.size(); ++i) {
    keys[i] = {static_cast<uint64_t>(next[i])};
  }
  return refine(mol, dense_ranks(keys));
}

std::string best_string(const Molecule &mol, const std::vector<int> &ranks,
                        int &budget) {
  int n = mol.num_atoms();
  if (class_count(ranks) == n) {
    --budget;
    return write_by_ranks(mol, ranks);
  }
  // smallest tied class by rank value
  int tied_rank = -1;
  std::vector<int> counts(n, 0);
  for (int r : ranks) {
    ++counts[r];
  }
  for (int r = 0; r < n; ++r) {
    if (counts[r] > 1) {
      tied_rank = r;
      break;
    }
  }
  std::string best;
  for (int a = 0; a < n; ++a) {
    if (ranks[a] != tied_rank) {
      continue;
    }
    std::string s = best_string(mol, promote(mol, ranks, a), budget);
    if (best.empty() || s < best) {
      best = std::move(s);
    }
    if (budget <= 0) {
      break;
    }
  }
  return best;
}

}  // namespace

std::vector<int> canonical_ranks(const Molecule &mol) {
  return refine(mol, initial_ranks(mol));
}

std::string canonical_smiles(const Molecule &mol) {
  if (mol.atoms.empty()) {
    return "";
  }
  // Branch over every member of the first tied class and keep the
  // lexicographically smallest emission; the budget bounds pathological
  // symmetry blowup (never reached on drug-like input).
  int budget = 20000;
  return best_string(mol, canonical_ranks(mol), budget);
}

}  // namespace molbench
