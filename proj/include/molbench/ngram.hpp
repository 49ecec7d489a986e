//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLBENCH_NGRAM_HPP
#define MOLBENCH_NGRAM_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace molbench {

// Token-level maximum-likelihood language model over SMILES strings.
// Token ids 0 and 1 are reserved for end-of-string and begin padding.
struct NgramModel {
  int order = 0;  // context length is order - 1
  std::vector<std::string> alphabet;
  std::map<std::vector<int>, std::vector<std::pair<int, int64_t>>> table;

  static constexpr int kEnd = 0;
  static constexpr int kBegin = 1;
};

// Two-character elements (Cl, Br), bracket atoms, and %nn ring closures
// are single tokens; splitting them mid-token would make nearly every
// sample unparseable.
std::vector<std::string> tokenize_smiles(const std::string &s);

// Pure MLE counts with begin/end padding. Throws std::invalid_argument on
// an empty corpus or order outside [1, 8].
NgramModel train_ngram(const std::vector<std::string> &corpus, int order);

// Seeded categorical sampling; sample i uses an independent substream
// derived as mix64(seed ^ i), so results are order- and thread-agnostic.
std::vector<std::string> sample_ngram(const NgramModel &model, int count,
                                      int max_len, uint64_t seed);

// Model file: magic, version, order, alphabet, context table.
void save_ngram(const std::string &path, const NgramModel &model);
NgramModel load_ngram(const std::string &path);

}  // namespace molbench

#endif  // MOLBENCH_NGRAM_HPP
