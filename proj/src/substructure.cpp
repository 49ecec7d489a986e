//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include "molbench/substructure.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace molbench {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

int expr_depth(const AtomExpr &e) {
  int d = 0;
  for (const auto &k : e.kids) {
    d = std::max(d, expr_depth(k));
  }
  return d + 1;
}

AtomExpr make_and(AtomExpr a, AtomExpr b) {
  AtomExpr e;
  e.op = AtomExpr::Op::kAnd;
  e.kids = {std::move(a), std::move(b)};
  return e;
}

AtomExpr elem_expr(int atomic_number, int aromatic /* -1 any, 0 ali, 1 aro */) {
  AtomExpr e;
  e.op = AtomExpr::Op::kElement;
  e.value = atomic_number;
  if (aromatic < 0) {
    return e;
  }
  AtomExpr flag;
  flag.op = aromatic == 1 ? AtomExpr::Op::kAromatic : AtomExpr::Op::kAliphatic;
  return make_and(std::move(e), std::move(flag));
}

struct PatternParser {
  std::string_view text;
  size_t pos = 0;
  Pattern pat;
  PatternError err;
  bool failed = false;

  int prev_atom = -1;
  std::vector<int> branch_stack;
  std::optional<BondExpr> pending;
  std::map<int, std::pair<int, std::optional<BondExpr>>> open_rings;

  bool fail(std::string msg, size_t at) {
    if (!failed) {
      failed = true;
      err = {at, std::move(msg)};
    }
    return false;
  }

  char peek(size_t off = 0) const {
    return pos + off < text.size() ? text[pos + off] : '\0';
  }

  static bool is_bond_start(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~' ||
           c == '@' || c == '!' || c == '/' || c == '\\';
  }

  // --- bond expressions ---------------------------------------------------

  std::optional<BondExpr> parse_bond_prim() {
    char c = peek();
    BondExpr e;
    switch (c) {
      case '-':
      case '/':
      case '\\':
        e.op = BondExpr::Op::kOrder;
        e.value = 1;
        break;
      case '=':
        e.op = BondExpr::Op::kOrder;
        e.value = 2;
        break;
      case '#':
        e.op = BondExpr::Op::kOrder;
        e.value = 3;
        break;
      case ':':
        e.op = BondExpr::Op::kAromatic;
        break;
      case '~':
        e.op = BondExpr::Op::kAnyBond;
        break;
      case '@':
        e.op = BondExpr::Op::kRing;
        break;
      default:
        return std::nullopt;
    }
    ++pos;
    return e;
  }

  std::optional<BondExpr> parse_bond_unary() {
    if (peek() == '!') {
      ++pos;
      auto inner = parse_bond_unary();
      if (!inner.has_value()) {
        fail("expected bond primitive after '!'", pos);
        return std::nullopt;
      }
      BondExpr e;
      e.op = BondExpr::Op::kNot;
      e.kids = {std::move(*inner)};
      return e;
    }
    return parse_bond_prim();
  }

  std::optional<BondExpr> parse_bond_and() {
    auto lhs = parse_bond_unary();
    if (!lhs.has_value()) {
      return std::nullopt;
    }
    while (true) {
      size_t save = pos;
      if (peek() == '&') {
        ++pos;
      }
      auto rhs = parse_bond_unary();
      if (!rhs.has_value()) {
        pos = save;
        return lhs;
      }
      BondExpr e;
      e.op = BondExpr::Op::kAnd;
      e.kids = {std::move(*lhs), std::move(*rhs)};
      lhs = std::move(e);
    }
  }

  std::optional<BondExpr> parse_bond_expr() {
    auto lhs = parse_bond_and();
    if (!lhs.has_value()) {
      return std::nullopt;
    }
    while (peek() == ',' || peek() == ';') {
      auto op = peek() == ',' ? BondExpr::Op::kOr : BondExpr::Op::kAnd;
      ++pos;
      auto rhs = parse_bond_and();
      if (!rhs.has_value()) {
        fail("expected bond expression after separator", pos);
        return std::nullopt;
      }
      BondExpr e;
      e.op = op;
      e.kids = {std::move(*lhs), std::move(*rhs)};
      lhs = std::move(e);
    }
    return lhs;
  }

  // --- atom expressions (bracket interior) --------------------------------

  int read_number(int fallback) {
    if (!is_digit(peek())) {
      return fallback;
    }
    int n = 0;
    while (is_digit(peek())) {
      n = n * 10 + (text[pos++] - '0');
    }
    return n;
  }

  std::optional<AtomExpr> parse_atom_prim() {
    char c = peek();
    AtomExpr e;
    switch (c) {
      case '*':
        ++pos;
        e.op = AtomExpr::Op::kAny;
        return e;
      case '#': {
        ++pos;
        if (!is_digit(peek())) {
          fail("expected atomic number after '#'", pos);
          return std::nullopt;
        }
        return elem_expr(read_number(0), -1);
      }
      case 'a':
        ++pos;
        e.op = AtomExpr::Op::kAromatic;
        return e;
      case 'A':
        ++pos;
        e.op = AtomExpr::Op::kAliphatic;
        return e;
      case 'R': {
        ++pos;
        e.op = AtomExpr::Op::kInRing;
        e.value = read_number(1);
        return e;
      }
      case 'X': {
        ++pos;
        if (!is_digit(peek())) {
          fail("expected count after 'X'", pos);
          return std::nullopt;
        }
        e.op = AtomExpr::Op::kTotalConn;
        e.value = read_number(0);
        return e;
      }
      case 'D': {
        ++pos;
        if (!is_digit(peek())) {
          fail("expected count after 'D'", pos);
          return std::nullopt;
        }
        e.op = AtomExpr::Op::kDegree;
        e.value = read_number(0);
        return e;
      }
      case 'H': {
        ++pos;
        e.op = AtomExpr::Op::kHCount;
        e.value = read_number(1);
        return e;
      }
      case '+':
      case '-': {
        ++pos;
        int mag = 1;
        if (is_digit(peek())) {
          mag = read_number(1);
        } else {
          while (peek() == c) {
            ++pos;
            ++mag;
          }
        }
        e.op = AtomExpr::Op::kCharge;
        e.value = c == '+' ? mag : -mag;
        return e;
      }
      default:
        break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) == 0) {
      return std::nullopt;
    }
    // element symbol; two-letter organics first
    if ((c == 'C' && peek(1) == 'l') || (c == 'B' && peek(1) == 'r')) {
      const ElementInfo *info = element_by_symbol(text.substr(pos, 2));
      pos += 2;
      return elem_expr(info->atomic_number, 0);
    }
    bool aromatic = std::islower(static_cast<unsigned char>(c)) != 0;
    const ElementInfo *info = element_by_symbol(text.substr(pos, 1));
    if (info == nullptr || (aromatic && !info->can_be_aromatic)) {
      fail("unknown atom primitive", pos);
      return std::nullopt;
    }
    ++pos;
    return elem_expr(info->atomic_number, aromatic ? 1 : 0);
  }

  std::optional<AtomExpr> parse_atom_unary() {
    if (peek() == '!') {
      ++pos;
      auto inner = parse_atom_unary();
      if (!inner.has_value()) {
        fail("expected primitive after '!'", pos);
        return std::nullopt;
      }
      AtomExpr e;
      e.op = AtomExpr::Op::kNot;
      e.kids = {std::move(*inner)};
      return e;
    }
    return parse_atom_prim();
  }

  std::optional<AtomExpr> parse_atom_and() {
    auto lhs = parse_atom_unary();
    if (!lhs.has_value()) {
      return std::nullopt;
    }
    while (true) {
      size_t save = pos;
      if (peek() == '&') {
        ++pos;
      }
      auto rhs = parse_atom_unary();
      if (!rhs.has_value()) {
        pos = save;
        return lhs;
      }
      lhs = make_and(std::move(*lhs), std::move(*rhs));
    }
  }

  std::optional<AtomExpr> parse_atom_or() {
    auto lhs = parse_atom_and();
    if (!lhs.has_value()) {
      return std::nullopt;
    }
    while (peek() == ',') {
      ++pos;
      auto rhs = parse_atom_and();
      if (!rhs.has_value()) {
        fail("expected expression after ','", pos);
        return std::nullopt;
      }
      AtomExpr e;
      e.op = AtomExpr::Op::kOr;
      e.kids = {std::move(*lhs), std::move(*rhs)};
      lhs = std::move(e);
    }
    return lhs;
  }

  std::optional<AtomExpr> parse_bracket_expr() {
    auto lhs = parse_atom_or();
    if (!lhs.has_value()) {
      fail("empty bracket expression", pos);
      return std::nullopt;
    }
    while (peek() == ';') {
      ++pos;
      auto rhs = parse_atom_or();
      if (!rhs.has_value()) {
        fail("expected expression after ';'", pos);
        return std::nullopt;
      }
      lhs = make_and(std::move(*lhs), std::move(*rhs));
    }
    return lhs;
  }

  // --- pattern structure ----------------------------------------------------

  int add_atom(AtomExpr e, size_t at) {
    if (expr_depth(e) > 8) {
      fail("predicate tree too deep", at);
      return -1;
    }
    pat.atoms.push_back(std::move(e));
    int idx = pat.num_atoms() - 1;
    if (prev_atom >= 0) {
      BondExpr b = pending.value_or(BondExpr{});
      pat.bonds.push_back({prev_atom, idx, std::move(b)});
    }
    pending.reset();
    prev_atom = idx;
    return idx;
  }

  bool parse_ring_closure(int num, size_t at) {
    if (prev_atom < 0) {
      return fail("ring closure with no preceding atom", at);
    }
    auto it = open_rings.find(num);
    if (it == open_rings.end()) {
      open_rings[num] = {prev_atom, pending};
      pending.reset();
      return true;
    }
    auto [atom, open_bond] = it->second;
    open_rings.erase(it);
    BondExpr b = pending.has_value() ? *pending
                                     : open_bond.value_or(BondExpr{});
    pending.reset();
    if (atom == prev_atom) {
      return fail("ring closure to same atom", at);
    }
    pat.bonds.push_back({atom, prev_atom, std::move(b)});
    return true;
  }

  bool run() {
    if (text.empty()) {
      return fail("empty pattern", 0);
    }
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '[') {
        size_t start = pos;
        ++pos;
        auto e = parse_bracket_expr();
        if (!e.has_value()) {
          return false;
        }
        if (peek() != ']') {
          return fail("expected ']'", pos);
        }
        ++pos;
        if (add_atom(std::move(*e), start) < 0) {
          return false;
        }
      } else if (c == '(') {
        if (prev_atom < 0) {
          return fail("branch with no preceding atom", pos);
        }
        branch_stack.push_back(prev_atom);
        ++pos;
      } else if (c == ')') {
        if (branch_stack.empty()) {
          return fail("unmatched closing parenthesis", pos);
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
        if (!is_digit(peek(1)) || !is_digit(peek(2))) {
          return fail("%% must be followed by two digits", pos);
        }
        int num = (text[pos + 1] - '0') * 10 + (text[pos + 2] - '0');
        pos += 3;
        if (!parse_ring_closure(num, pos - 3)) {
          return false;
        }
      } else if (is_bond_start(c)) {
        if (pending.has_value()) {
          return fail("two bond expressions in a row", pos);
        }
        pending = parse_bond_expr();
        if (!pending.has_value()) {
          return false;
        }
      } else if (c == '*') {
        ++pos;
        AtomExpr e;
        e.op = AtomExpr::Op::kAny;
        if (add_atom(std::move(e), pos - 1) < 0) {
          return false;
        }
      } else if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
        size_t start = pos;
        auto e = parse_atom_prim();
        if (!e.has_value()) {
          return fail("unknown token", start);
        }
        // bare a/A/R/X/D/H outside brackets are not atoms
        if (e->op != AtomExpr::Op::kElement && e->op != AtomExpr::Op::kAnd) {
          return fail("primitive requires brackets", start);
        }
        if (add_atom(std::move(*e), start) < 0) {
          return false;
        }
      } else {
        return fail("unknown token", pos);
      }
    }
    if (!branch_stack.empty()) {
      return fail("unclosed branch", text.size());
    }
    if (!open_rings.empty()) {
      return fail("unmatched ring-closure digit", text.size());
    }
    if (pending.has_value()) {
      return fail("dangling bond expression", text.size());
    }
    if (pat.atoms.empty()) {
      return fail("pattern has no atoms", 0);
    }
    // connectivity
    std::vector<bool> seen(pat.atoms.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (const auto &b : pat.bonds) {
        int v = b.a == u ? b.b : (b.b == u ? b.a : -1);
        if (v >= 0 && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      return fail("pattern graph must be connected", 0);
    }
    return true;
  }
};

int heavy_degree(const Molecule &mol, int atom) {
  int d = 0;
  for (int bi : mol.adjacency()[atom]) {
    const Atom &other = mol.atoms[mol.bonds[bi].other(atom)];
    if (other.atomic_number != 1) {
      ++d;
    }
  }
  return d;
}

int total_h(const Molecule &mol, int atom) {
  int h = mol.atoms[atom].total_h();
  for (int bi : mol.adjacency()[atom]) {
    if (mol.atoms[mol.bonds[bi].other(atom)].atomic_number == 1) {
      ++h;
    }
  }
  return h;
}

}  // namespace

PatternResult parse_pattern(std::string_view text) {
  PatternParser p;
  p.text = text;
  if (!p.run()) {
    return PatternResult::failure(p.err);
  }
  return PatternResult::success(std::move(p.pat));
}

bool eval_atom(const AtomExpr &expr, const Molecule &mol, int atom) {
  const Atom &a = mol.atoms[atom];
  switch (expr.op) {
    case AtomExpr::Op::kAny:
      return true;
    case AtomExpr::Op::kElement:
      return a.atomic_number == expr.value;
    case AtomExpr::Op::kAromatic:
      return a.is_aromatic;
    case AtomExpr::Op::kAliphatic:
      return !a.is_aromatic;
    case AtomExpr::Op::kCharge:
      return a.formal_charge == expr.value;
    case AtomExpr::Op::kInRing:
      return expr.value == 0 ? !a.in_ring() : a.in_ring();
    case AtomExpr::Op::kTotalConn:
      return heavy_degree(mol, atom) + total_h(mol, atom) == expr.value;
    case AtomExpr::Op::kDegree:
      return heavy_degree(mol, atom) == expr.value;
    case AtomExpr::Op::kHCount:
      return total_h(mol, atom) == expr.value;
    case AtomExpr::Op::kNot:
      return !eval_atom(expr.kids[0], mol, atom);
    case AtomExpr::Op::kAnd:
      return eval_atom(expr.kids[0], mol, atom) &&
             eval_atom(expr.kids[1], mol, atom);
    case AtomExpr::Op::kOr:
      return eval_atom(expr.kids[0], mol, atom) ||
             eval_atom(expr.kids[1], mol, atom);
  }
  return false;
}

bool eval_bond(const BondExpr &expr, const Bond &bond) {
  switch (expr.op) {
    case BondExpr::Op::kDefault:
      return bond.is_aromatic ||
             (!bond.is_aromatic && bond.order == BondOrder::kSingle);
    case BondExpr::Op::kOrder:
      return !bond.is_aromatic && static_cast<int>(bond.order) == expr.value;
    case BondExpr::Op::kAromatic:
      return bond.is_aromatic;
    case BondExpr::Op::kAnyBond:
      return true;
    case BondExpr::Op::kRing:
      return bond.in_ring;
    case BondExpr::Op::kNot:
      return !eval_bond(expr.kids[0], bond);
    case BondExpr::Op::kAnd:
      return eval_bond(expr.kids[0], bond) && eval_bond(expr.kids[1], bond);
    case BondExpr::Op::kOr:
      return eval_bond(expr.kids[0], bond) || eval_bond(expr.kids[1], bond);
  }
  return false;
}

namespace {

struct MatchPlan {
  std::vector<int> order;                  // pattern atoms, DFS order
  std::vector<std::vector<int>> anchors;   // per step: bonds to earlier atoms
};

MatchPlan build_plan(const Pattern &pattern) {
  MatchPlan plan;
  int n = pattern.num_atoms();
  std::vector<bool> placed(n, false);
  std::vector<int> position(n, -1);
  plan.order.push_back(0);
  placed[0] = true;
  position[0] = 0;
  plan.anchors.emplace_back();
  while (static_cast<int>(plan.order.size()) < n) {
    // next pattern atom adjacent to a placed one (pattern is connected)
    for (int i = 0; i < static_cast<int>(pattern.bonds.size()); ++i) {
      const auto &b = pattern.bonds[i];
      int next = -1;
      if (placed[b.a] && !placed[b.b]) {
        next = b.b;
      } else if (placed[b.b] && !placed[b.a]) {
        next = b.a;
      }
      if (next >= 0) {
        placed[next] = true;
        position[next] = static_cast<int>(plan.order.size());
        plan.order.push_back(next);
        break;
      }
    }
    plan.anchors.emplace_back();
  }
  for (size_t step = 0; step < plan.order.size(); ++step) {
    int atom = plan.order[step];
    for (int i = 0; i < static_cast<int>(pattern.bonds.size()); ++i) {
      const auto &b = pattern.bonds[i];
      int other = b.a == atom ? b.b : (b.b == atom ? b.a : -1);
      if (other >= 0 && position[other] < static_cast<int>(step)) {
        plan.anchors[step].push_back(i);
      }
    }
  }
  return plan;
}

// Backtracking subgraph embedding with candidate prescreening. The callback
// receives each distinct embedding (by atom set); returning false stops.
void enumerate_matches(
    const Pattern &pattern, const Molecule &mol,
    const std::function<bool(const std::vector<int> &)> &on_match,
    int anchor = -1) {
  int pn = pattern.num_atoms();
  int mn = mol.num_atoms();
  std::vector<std::vector<bool>> candidate(pn, std::vector<bool>(mn, false));
  for (int p = 0; p < pn; ++p) {
    bool any = false;
    for (int m = 0; m < mn; ++m) {
      candidate[p][m] = eval_atom(pattern.atoms[p], mol, m) &&
                        (p != 0 || anchor < 0 || m == anchor);
      any = any || candidate[p][m];
    }
    if (!any) {
      return;
    }
  }
  MatchPlan plan = build_plan(pattern);
  std::vector<int> assign(pn, -1);
  std::vector<bool> used(mn, false);
  std::set<std::vector<int>> seen_sets;
  bool stop = false;

  std::function<void(size_t)> rec = [&](size_t step) {
    if (stop) {
      return;
    }
    if (step == plan.order.size()) {
      std::vector<int> key(assign);
      std::sort(key.begin(), key.end());
      if (seen_sets.insert(std::move(key)).second) {
        if (!on_match(assign)) {
          stop = true;
        }
      }
      return;
    }
    int patom = plan.order[step];
    for (int m = 0; m < mn && !stop; ++m) {
      if (used[m] || !candidate[patom][m]) {
        continue;
      }
      bool ok = true;
      for (int bi : plan.anchors[step]) {
        const auto &pb = pattern.bonds[bi];
        int other_p = pb.a == patom ? pb.b : pb.a;
        const Bond *mb = mol.bond_between(m, assign[other_p]);
        if (mb == nullptr || !eval_bond(pb.expr, *mb)) {
          ok = false;
          break;
        }
      }
      if (!ok) {
        continue;
      }
      assign[patom] = m;
      used[m] = true;
      rec(step + 1);
      used[m] = false;
      assign[patom] = -1;
    }
  };
  rec(0);
}

}  // namespace

std::vector<std::vector<int>> match(const Pattern &pattern,
                                    const Molecule &mol) {
  std::vector<std::vector<int>> out;
  enumerate_matches(pattern, mol, [&](const std::vector<int> &m) {
    out.push_back(m);
    return true;
  });
  return out;
}

bool matches_at(const Pattern &pattern, const Molecule &mol, int atom) {
  bool found = false;
  enumerate_matches(
      pattern, mol,
      [&](const std::vector<int> &) {
        found = true;
        return false;
      },
      atom);
  return found;
}

bool has_match(const Pattern &pattern, const Molecule &mol, int min_count) {
  int count = 0;
  enumerate_matches(pattern, mol, [&](const std::vector<int> &) {
    ++count;
    return count < min_count;
  });
  return count >= min_count;
}

FilterVerdict passes_filters(const Molecule &mol,
                             const std::vector<FilterPack> &packs) {
  FilterVerdict v;
  for (const auto &pack : packs) {
    for (const auto &pattern : pack.patterns) {
      if (has_match(pattern, mol, pattern.min_count)) {
        v.pass = false;
        v.violations.push_back(pattern.name);
      }
    }
  }
  std::sort(v.violations.begin(), v.violations.end());
  return v;
}

FilterPack load_filter_pack(const std::string &path, std::string provenance) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open filter pack: " + path);
  }
  FilterPack pack;
  pack.provenance = provenance.empty() ? path : std::move(provenance);
  std::set<std::string> names;
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
    std::vector<std::string> cols;
    size_t start = 0;
    while (true) {
      size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) {
        break;
      }
      start = tab + 1;
    }
    if (cols.size() < 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected NAME<TAB>PATTERN");
    }
    auto result = parse_pattern(cols[1]);
    if (!result.ok()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               result.error().message + " at offset " +
                               std::to_string(result.error().position));
    }
    Pattern p = std::move(result.value());
    p.name = cols[0];
    if (!names.insert(p.name).second) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": duplicate pattern name " + p.name);
    }
    for (size_t i = 2; i < cols.size(); ++i) {
      if (cols[i].rfind("min=", 0) == 0) {
        p.min_count = std::stoi(cols[i].substr(4));
      }
    }
    pack.patterns.push_back(std::move(p));
  }
  return pack;
}

}  // namespace molbench
