//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLBENCH_FINGERPRINT_HPP
#define MOLBENCH_FINGERPRINT_HPP

#include <cstdint>
#include <vector>

#include "molbench/molecule.hpp"

namespace molbench {

enum class FingerprintKind : uint8_t { kMorgan = 0, kPharmacophore = 1 };

struct BitFingerprint {
  FingerprintKind kind = FingerprintKind::kMorgan;
  int width = 0;  // bits, multiple of 64
  std::vector<uint64_t> words;

  void set_bit(uint64_t bit) {
    bit %= static_cast<uint64_t>(width);
    words[bit / 64] |= uint64_t{1} << (bit % 64);
  }
  bool test_bit(int bit) const {
    return ((words[bit / 64] >> (bit % 64)) & 1) != 0;
  }
  int popcount() const;
};

inline constexpr int kDefaultMorganRadius = 2;
inline constexpr int kDefaultMorganWidth = 1024;
inline constexpr int kDefaultPharmacophoreWidth = 2048;

// Circular-environment identifiers. The unfolded sparse form is a function
// of the molecule only; folding depends on width.
std::vector<uint64_t> morgan_environments(const Molecule &mol, int radius);
// Identifier of each atom's environment at exactly the given radius.
std::vector<uint64_t> atom_environment_ids(const Molecule &mol, int radius);

BitFingerprint morgan_fingerprint(const Molecule &mol,
                                  int radius = kDefaultMorganRadius,
                                  int width = kDefaultMorganWidth);

enum class PharmacophoreFeature : uint8_t {
  kDonor = 0,
  kAcceptor,
  kAromatic,
  kPositive,
  kNegative,
  kHydrophobic,
};

struct FeatureSite {
  PharmacophoreFeature type;
  std::vector<int> atoms;
};

// Feature assignment via the built-in pattern set (documented
// approximations of the usual 2D pharmacophore definitions).
std::vector<FeatureSite> pharmacophore_features(const Molecule &mol);

BitFingerprint pharmacophore_fingerprint(
    const Molecule &mol, int width = kDefaultPharmacophoreWidth);

// |a AND b| / |a OR b|; 1.0 for two all-zero inputs, 0.0 when exactly one
// is empty. Throws std::invalid_argument on width/kind mismatch.
double tanimoto(const BitFingerprint &a, const BitFingerprint &b);

// Fixed-seed 64-bit mixer used for all structural hashing; deterministic
// across platforms and runs.
uint64_t mix64(uint64_t x);
uint64_t hash_combine(uint64_t seed, uint64_t value);

// All-pairs topological distances (BFS); -1 for disconnected pairs.
std::vector<std::vector<int>> topological_distances(const Molecule &mol);

// Cache file: magic "MBFP", u32 kind, u32 width, u64 count, packed rows.
// All rows must share kind and width.
void save_fingerprints(const std::string &path,
                       const std::vector<BitFingerprint> &fps);
std::vector<BitFingerprint> load_fingerprints(const std::string &path);

}  // namespace molbench

#endif  // MOLBENCH_FINGERPRINT_HPP
