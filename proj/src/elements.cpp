//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include "molbench/elements.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <unordered_map>

namespace molbench {

namespace {

// Standard atomic weights (IUPAC 2021, abridged). Valence sets follow the
// usual organic-chemistry convention; elements outside the table carry an
// empty set and are treated as unconstrained.
const std::vector<ElementInfo> &registry() {
  static const std::vector<ElementInfo> kTable = {
      {0, "*", 0.0, {}, false, false},
      {1, "H", 1.008, {1}, false, false},
      {3, "Li", 6.94, {1}, false, false},
      {5, "B", 10.81, {3}, true, true},
      {6, "C", 12.011, {4}, true, true},
      {7, "N", 14.007, {3}, true, true},
      {8, "O", 15.999, {2}, true, true},
      {9, "F", 18.998, {1}, true, false},
      {11, "Na", 22.990, {1}, false, false},
      {12, "Mg", 24.305, {2}, false, false},
      {14, "Si", 28.085, {4}, false, false},
      {15, "P", 30.974, {3, 5}, true, true},
      {16, "S", 32.06, {2, 4, 6}, true, true},
      {17, "Cl", 35.45, {1}, true, false},
      {19, "K", 39.098, {1}, false, false},
      {20, "Ca", 40.078, {2}, false, false},
      {26, "Fe", 55.845, {}, false, false},
      {29, "Cu", 63.546, {}, false, false},
      {30, "Zn", 65.38, {}, false, false},
      {33, "As", 74.922, {3, 5}, false, false},
      {34, "Se", 78.971, {2, 4, 6}, false, false},
      {35, "Br", 79.904, {1}, true, false},
      {50, "Sn", 118.71, {}, false, false},
      {53, "I", 126.904, {1}, true, false},
  };
  return kTable;
}

const std::unordered_map<std::string, const ElementInfo *> &symbol_index() {
  static const auto *kIndex = [] {
    auto *idx = new std::unordered_map<std::string, const ElementInfo *>();
    for (const auto &e : registry()) {
      idx->emplace(e.symbol, &e);
    }
    return idx;
  }();
  return *kIndex;
}

}  // namespace

const ElementInfo *element_by_symbol(std::string_view symbol) {
  if (symbol.empty()) {
    return nullptr;
  }
  std::string key(symbol);
  key[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(key[0])));
  auto it = symbol_index().find(key);
  return it == symbol_index().end() ? nullptr : it->second;
}

const ElementInfo *element_by_number(uint8_t atomic_number) {
  for (const auto &e : registry()) {
    if (e.atomic_number == atomic_number) {
      return &e;
    }
  }
  return nullptr;
}

std::vector<int> allowed_valences(uint8_t atomic_number, int charge) {
  const ElementInfo *info = element_by_number(atomic_number);
  if (info == nullptr || info->valences.empty()) {
    return {};
  }
  if (charge == 0) {
    return info->valences;
  }
  std::vector<int> out;
  for (int v : info->valences) {
    int adjusted = v;
    switch (atomic_number) {
      case 5:  // boron: anion gains a bond (borate), cation loses one
        adjusted = v - charge;
        break;
      case 6:   // carbon: both carbanion and carbocation are trivalent
      case 14:  // silicon follows carbon
        adjusted = v - std::abs(charge);
        break;
      default:  // N/P/O/S/halogens: cation bonds more, anion bonds less
        adjusted = v + charge;
        break;
    }
    if (adjusted >= 0) {
      out.push_back(adjusted);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<int> min_fitting_valence(uint8_t atomic_number, int charge,
                                       int bond_sum) {
  const ElementInfo *info = element_by_number(atomic_number);
  if (info == nullptr || info->valences.empty()) {
    return bond_sum;  // unconstrained: no implicit hydrogens
  }
  for (int v : allowed_valences(atomic_number, charge)) {
    if (v >= bond_sum) {
      return v;
    }
  }
  return std::nullopt;
}

}  // namespace molbench
