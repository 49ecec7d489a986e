//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLBENCH_DECOMPOSE_HPP
#define MOLBENCH_DECOMPOSE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "molbench/molecule.hpp"
#include "molbench/substructure.hpp"

namespace molbench {

// Sparse frequency vector over canonical fragment or scaffold strings.
struct Profile {
  std::map<std::string, int64_t> counts;
  int64_t total = 0;

  void add(const std::string &key, int64_t n = 1) {
    counts[key] += n;
    total += n;
  }
  void merge(const Profile &other) {
    for (const auto &[k, v] : other.counts) {
      counts[k] += v;
    }
    total += other.total;
  }
};

// One retrosynthetic bond class: a single acyclic bond is cleavable when
// one endpoint satisfies `left` and the other `right` (either way round).
// Pattern atom 0 is the attachment atom on each side.
struct CleavageRule {
  std::string rule_id;  // "L-R" environment pair
  int left_label = 0;
  int right_label = 0;
  Pattern left;
  Pattern right;
};

// Rule file: lines `RULE<TAB>LEFT<TAB>RIGHT`, '#' comments. Throws
// std::runtime_error on I/O or grammar errors.
std::vector<CleavageRule> load_cleavage_rules(const std::string &path);

// Rule table shipped with the library.
const std::vector<CleavageRule> &default_cleavage_rules();

// Cleave every matching acyclic single bond simultaneously; severed
// valences are capped with dummy atoms labeled by the environment number
// of their own side. A molecule with no cleavable bond yields itself.
std::vector<std::string> brics_fragments(const Molecule &mol);
std::vector<std::string> brics_fragments(
    const Molecule &mol, const std::vector<CleavageRule> &rules);

// Ring systems plus connecting linkers, with exocyclic multiple-bonded
// atoms retained; side chains pruned. Acyclic molecules have no scaffold.
std::optional<std::string> murcko_scaffold(const Molecule &mol);

Profile build_profile(const std::vector<std::string> &strings);

}  // namespace molbench

#endif  // MOLBENCH_DECOMPOSE_HPP
