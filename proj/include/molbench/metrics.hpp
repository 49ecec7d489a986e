//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLBENCH_METRICS_HPP
#define MOLBENCH_METRICS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "molbench/decompose.hpp"
#include "molbench/descriptors.hpp"
#include "molbench/fingerprint.hpp"
#include "molbench/molecule.hpp"
#include "molbench/substructure.hpp"

namespace molbench {

// Scaffold vocabulary entry for acyclic molecules, so scaffold profiles
// never drop mass. The leading space cannot collide with a canonical
// string.
inline constexpr const char *kNoScaffoldToken = " acyclic";

struct EvalSets {
  std::vector<std::string> generated;  // raw strings, may be invalid
  std::unordered_set<std::string> train;
  std::unordered_set<std::string> test;
  std::unordered_set<std::string> test_scaffolds;
};

struct GaussianSummary {
  std::vector<double> mean;        // dim entries
  std::vector<double> covariance;  // dim x dim, row major
  int64_t n = 0;

  int dim() const { return static_cast<int>(mean.size()); }
};

struct MetricReport {
  std::vector<std::pair<std::string, double>> values;  // stable order
  std::map<std::string, std::string> metadata;

  void set(const std::string &name, double v) { values.emplace_back(name, v); }
  std::optional<double> get(const std::string &name) const;
};

// Parse every raw string; invalid entries are dropped.
std::vector<Molecule> valid_molecules(const std::vector<std::string> &raw);

double validity(const std::vector<std::string> &generated);

// Unique fraction among the first k valid molecules. Throws
// std::runtime_error naming the shortfall when fewer than k are valid.
double uniqueness_at_k(const std::vector<std::string> &generated, int k);

double novelty(const std::vector<std::string> &generated,
               const std::unordered_set<std::string> &train);

Profile fragment_profile(const std::vector<Molecule> &mols);
Profile scaffold_profile(const std::vector<Molecule> &mols);

// Cosine similarity of sparse frequency vectors. Throws
// std::invalid_argument when both profiles are empty.
double profile_cosine(const Profile &a, const Profile &b);

// Reported as similarity by default; as_distance selects 1 - cos.
double fragment_similarity(const std::vector<Molecule> &g,
                           const std::vector<Molecule> &r,
                           bool as_distance = false);
double scaffold_similarity(const std::vector<Molecule> &g,
                           const std::vector<Molecule> &r,
                           bool as_distance = false);

std::vector<BitFingerprint> fingerprints(const std::vector<Molecule> &mols,
                                         FingerprintKind kind,
                                         int threads = 1);

// Average nearest-neighbor Tanimoto of each g member against r.
double snn(const std::vector<BitFingerprint> &g,
           const std::vector<BitFingerprint> &r, int threads = 1);

// 1 - (mean of T^p over all ordered pairs including self)^(1/p).
double internal_diversity(const std::vector<BitFingerprint> &g, int p = 1,
                          int threads = 1);

GaussianSummary summarize(const std::vector<std::vector<double>> &rows);
GaussianSummary summarize_scalar(const std::vector<double> &values);

// ||mu_a - mu_b||^2 + Tr(Ca) + Tr(Cb) - 2 Tr((Ca^1/2 Cb Ca^1/2)^1/2).
double frechet_distance(const GaussianSummary &a, const GaussianSummary &b);

// Optional reference tables for corpus-dependent descriptors.
struct DescriptorContext {
  const ContributionTable *sa = nullptr;
  const NpTables *np = nullptr;
};

double descriptor_value(const Molecule &mol, const std::string &name,
                        const DescriptorContext &ctx = {});

double property_frechet(const std::vector<Molecule> &g,
                        const std::vector<Molecule> &r,
                        const std::string &descriptor,
                        const DescriptorContext &ctx = {});

// Element whitelist, charge, and ring-size constraints applied alongside
// the substructure packs.
struct StructuralConstraints {
  std::vector<uint8_t> allowed_elements = {6, 7, 16, 8, 9, 17, 35, 1};
  int max_ring_size = 8;
  bool reject_charged = true;
};

bool passes_constraints(const Molecule &mol,
                        const StructuralConstraints &constraints,
                        std::string *failed_rule = nullptr);

double filters_fraction(const std::vector<Molecule> &g,
                        const std::vector<FilterPack> &packs,
                        const StructuralConstraints &constraints = {});

// Embedding file for externally computed activation vectors:
// magic "MBEM", u32 dim, u64 count, count*dim row-major f32.
void write_embeddings(const std::string &path,
                      const std::vector<std::vector<float>> &rows);
std::vector<std::vector<float>> read_embeddings(const std::string &path);

struct ReportConfig {
  std::vector<int> unique_k = {1000, 10000};
  FingerprintKind fingerprint_kind = FingerprintKind::kMorgan;
  std::vector<int> diversity_p = {1, 2};
  int threads = 1;
  std::vector<FilterPack> packs;  // empty = shipped MCF + PAINS
  StructuralConstraints constraints;
};

MetricReport full_report(const EvalSets &sets, const ReportConfig &config);

}  // namespace molbench

#endif  // MOLBENCH_METRICS_HPP
