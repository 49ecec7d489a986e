//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLBENCH_ELEMENTS_HPP
#define MOLBENCH_ELEMENTS_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace molbench {

struct ElementInfo {
  uint8_t atomic_number;
  const char *symbol;
  double atomic_weight;
  // Allowed valence states for neutral atoms, ascending. Empty means
  // "unconstrained" (no implicit hydrogens, any explicit valence accepted).
  std::vector<int> valences;
  bool organic_subset;   // writable without brackets
  bool can_be_aromatic;  // lowercase form accepted
};

// Lookup by symbol ("Cl", "c", ...). Case matters: lowercase symbols are
// resolved to their element but flagged aromatic by the caller.
const ElementInfo *element_by_symbol(std::string_view symbol);
const ElementInfo *element_by_number(uint8_t atomic_number);

// Allowed valences adjusted for formal charge; empty if unconstrained.
std::vector<int> allowed_valences(uint8_t atomic_number, int charge);

// Smallest allowed valence >= bond_sum, or nullopt if the element is
// constrained and no state fits.
std::optional<int> min_fitting_valence(uint8_t atomic_number, int charge,
                                       int bond_sum);

inline constexpr uint8_t kDummyAtom = 0;  // BRICS attachment points

}  // namespace molbench

#endif  // MOLBENCH_ELEMENTS_HPP
