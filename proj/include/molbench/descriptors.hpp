//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLBENCH_DESCRIPTORS_HPP
#define MOLBENCH_DESCRIPTORS_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "molbench/molecule.hpp"
#include "molbench/substructure.hpp"

namespace molbench {

// Atom-typing table row: pattern anchored at the scored atom, plus one or
// more numeric columns. First matching row wins, in file order.
struct TypedRow {
  std::string name;
  Pattern pattern;
  std::vector<double> values;
};

// TSV: NAME<TAB>PATTERN<TAB>V1[<TAB>V2...]; '#' comments. Throws
// std::runtime_error on I/O or grammar errors.
std::vector<TypedRow> load_typed_table(const std::string &path,
                                       size_t value_columns);

double molecular_weight(const Molecule &mol);

// Per-heavy-atom partition coefficient contributions (hydrogen terms
// folded into their heavy atom). first = assigned type name.
std::vector<std::pair<std::string, double>> crippen_breakdown(
    const Molecule &mol);
double crippen_logp(const Molecule &mol);

// Non-ring single bonds with both endpoints of heavy degree >= 2,
// excluding amide C-N bonds.
int rotatable_bonds(const Molecule &mol);

int hba_count(const Molecule &mol);  // nitrogen and oxygen atoms
int hbd_count(const Molecule &mol);  // N/O atoms carrying hydrogen
double tpsa(const Molecule &mol);    // polar surface area approximation
int aromatic_ring_count(const Molecule &mol);
int alert_count(const Molecule &mol);  // structural alerts fired

// Weighted geometric mean of eight desirability functions; in [0, 1].
double qed(const Molecule &mol);

// Sparse environment-id -> contribution map, binary-serializable.
class ContributionTable {
 public:
  explicit ContributionTable(
      std::vector<std::pair<uint64_t, double>> entries = {});

  double get(uint64_t id, double fallback = 0.0) const;
  size_t size() const { return entries_.size(); }
  const std::vector<std::pair<uint64_t, double>> &entries() const {
    return entries_;
  }

  void save(const std::string &path) const;
  static ContributionTable load(const std::string &path);

 private:
  std::vector<std::pair<uint64_t, double>> entries_;  // sorted by id
};

// Streaming frequency accumulator over circular atom environments.
class ContributionTrainer {
 public:
  void add(const Molecule &mol);
  int64_t molecules() const { return molecules_; }

  // log10 frequency relative to the count covering the 80th percentile
  // of occurrence mass; frequent environments score positive.
  ContributionTable finish() const;

  // Raw environment counts sorted by id, for log-odds tables.
  std::vector<std::pair<uint64_t, int64_t>> counts() const;

 private:
  std::unordered_map<uint64_t, int64_t> counts_;
  int64_t molecules_ = 0;
};

ContributionTable train_contributions(const std::vector<Molecule> &corpus);

// Synthetic-accessibility estimate in [1, 10]; 1 is easy. Combines the
// corpus-frequency term with size, macrocycle, and ring-fusion penalties.
double sa_score(const Molecule &mol, const ContributionTable &table);

struct NpTables {
  ContributionTable log_odds;
};

NpTables train_np_tables(const std::vector<Molecule> &natural,
                         const std::vector<Molecule> &synthetic);

// Natural-product likeness in [-5, 5]; positive means natural-like.
double np_score(const Molecule &mol, const NpTables &tables);

struct DescriptorVector {
  double mw = 0;
  double logp = 0;
  int rotatable_bonds = 0;
  double qed = 0;
  double sa = 0;
  double np = 0;
};

}  // namespace molbench

#endif  // MOLBENCH_DESCRIPTORS_HPP
