//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLBENCH_DATASET_HPP
#define MOLBENCH_DATASET_HPP

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "molbench/metrics.hpp"
#include "molbench/substructure.hpp"

namespace molbench {

// Lead-like cleaning rules mirroring the reference collection's criteria.
struct FilterConfig {
  double mw_min = 250.0;
  double mw_max = 350.0;
  int max_rotatable = 7;
  double max_logp = 3.5;
  StructuralConstraints constraints;
  std::vector<FilterPack> packs;  // empty = shipped MCF + PAINS
  bool reject_disconnected = true;
};

struct Rejection {
  int64_t line_no = 0;
  std::string input;
  std::string rule;  // first failed rule
};

// Streams raw strings through the filter; emits canonical strings of
// survivors in input order and logs the first failed rule otherwise.
// Memory use is independent of input size.
void clean_leads_filter(
    std::istream &in, const FilterConfig &config,
    const std::function<void(const std::string &)> &emit,
    const std::function<void(const Rejection &)> &reject);

// Convenience form over in-memory lists.
std::vector<std::string> clean_leads_filter(
    const std::vector<std::string> &raw, const FilterConfig &config,
    std::vector<Rejection> *rejections = nullptr);

// Single-molecule check; returns the first failed rule or empty string.
std::string filter_violation(const Molecule &mol, const FilterConfig &config);

// Stable first-occurrence deduplication.
std::vector<std::string> deduplicate(const std::vector<std::string> &input);

struct SplitSpec {
  double train_fraction = 0.9;
  double test_fraction = 0.05;
  double scaffold_test_fraction = 0.05;
  uint64_t seed = 0;
  bool scaffold_test = true;
};

struct Splits {
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::vector<std::string> scaffold_test;
};

// Scaffold-aware split: rarest scaffold groups are held out first, so no
// scaffold in scaffold_test ever appears in train or test; the remainder
// is shuffled by a portable seeded generator and divided train/test.
// Throws std::invalid_argument when the dataset cannot satisfy the spec.
Splits split(const std::vector<std::string> &dataset, const SplitSpec &spec);

// splitmix64 sequence + Fisher-Yates; identical on every platform.
void seeded_shuffle(std::vector<int> &indices, uint64_t seed);

}  // namespace molbench

#endif  // MOLBENCH_DATASET_HPP
