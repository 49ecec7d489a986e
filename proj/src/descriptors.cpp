//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include "molbench/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "molbench/fingerprint.hpp"
#include "molbench/smiles.hpp"

namespace molbench {

namespace {

std::string data_path(const char *file) {
  return std::string(MOLBENCH_DATA_DIR) + "/" + file;
}

std::vector<std::string> split_tabs(const std::string &line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

std::vector<TypedRow> load_typed_table(const std::string &path,
                                       size_t value_columns) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open table: " + path);
  }
  std::vector<TypedRow> rows;
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
    auto fields = split_tabs(line);
    if (fields.size() != value_columns + 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": wrong column count");
    }
    TypedRow row;
    row.name = fields[0];
    auto parsed = parse_pattern(fields[1]);
    if (!parsed.ok()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               parsed.error().message);
    }
    row.pattern = std::move(parsed.value());
    for (size_t i = 0; i < value_columns; ++i) {
      row.values.push_back(std::stod(fields[2 + i]));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double molecular_weight(const Molecule &mol) {
  constexpr double kHydrogenWeight = 1.008;
  double mw = 0;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    const Atom &a = mol.atoms[i];
    if (a.is_dummy()) {
      continue;
    }
    const ElementInfo *info = element_by_number(a.atomic_number);
    mw += info->atomic_weight + kHydrogenWeight * a.total_h();
  }
  return mw;
}

namespace {

const std::vector<TypedRow> &crippen_table() {
  static const auto *kTable = new std::vector<TypedRow>(
      load_typed_table(data_path("crippen.tsv"), 2));
  return *kTable;
}

const std::vector<TypedRow> &tpsa_table() {
  static const auto *kTable =
      new std::vector<TypedRow>(load_typed_table(data_path("tpsa.tsv"), 1));
  return *kTable;
}

const TypedRow *first_match(const std::vector<TypedRow> &table,
                            const Molecule &mol, int atom) {
  for (const auto &row : table) {
    if (matches_at(row.pattern, mol, atom)) {
      return &row;
    }
  }
  return nullptr;
}

}  // namespace

std::vector<std::pair<std::string, double>> crippen_breakdown(
    const Molecule &mol) {
  std::vector<std::pair<std::string, double>> out;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    if (mol.atoms[i].is_dummy()) {
      continue;
    }
    const TypedRow *row = first_match(crippen_table(), mol, i);
    // the table ends in a universal fallback row
    double v = row->values[0] + row->values[1] * mol.atoms[i].total_h();
    out.emplace_back(row->name, v);
  }
  return out;
}

double crippen_logp(const Molecule &mol) {
  double sum = 0;
  for (const auto &[name, v] : crippen_breakdown(mol)) {
    sum += v;
  }
  return sum;
}

namespace {

bool is_amide_cn(const Molecule &mol, const Bond &b) {
  for (int flip = 0; flip < 2; ++flip) {
    int c = flip == 0 ? b.a : b.b;
    int n = flip == 0 ? b.b : b.a;
    if (mol.atoms[c].atomic_number != 6 || mol.atoms[n].atomic_number != 7) {
      continue;
    }
    for (int bi : mol.adjacency()[c]) {
      const Bond &cb = mol.bonds[bi];
      if (cb.order == BondOrder::kDouble && !cb.is_aromatic &&
          mol.atoms[cb.other(c)].atomic_number == 8) {
        return true;
      }
    }
  }
  return false;
}

int heavy_degree(const Molecule &mol, int atom) {
  int d = 0;
  for (int bi : mol.adjacency()[atom]) {
    const Atom &o = mol.atoms[mol.bonds[bi].other(atom)];
    if (!o.is_dummy()) {
      ++d;
    }
  }
  return d;
}

}  // namespace

int rotatable_bonds(const Molecule &mol) {
  int count = 0;
  for (const auto &b : mol.bonds) {
    if (b.in_ring || b.is_aromatic || b.order != BondOrder::kSingle) {
      continue;
    }
    if (heavy_degree(mol, b.a) < 2 || heavy_degree(mol, b.b) < 2) {
      continue;
    }
    if (is_amide_cn(mol, b)) {
      continue;
    }
    ++count;
  }
  return count;
}

int hba_count(const Molecule &mol) {
  int n = 0;
  for (const auto &a : mol.atoms) {
    if (a.atomic_number == 7 || a.atomic_number == 8) {
      ++n;
    }
  }
  return n;
}

int hbd_count(const Molecule &mol) {
  int n = 0;
  for (const auto &a : mol.atoms) {
    if ((a.atomic_number == 7 || a.atomic_number == 8) && a.total_h() > 0) {
      ++n;
    }
  }
  return n;
}

double tpsa(const Molecule &mol) {
  double area = 0;
  for (int i = 0; i < mol.num_atoms(); ++i) {
    uint8_t z = mol.atoms[i].atomic_number;
    if (z != 7 && z != 8) {
      continue;
    }
    const TypedRow *row = first_match(tpsa_table(), mol, i);
    if (row != nullptr) {
      area += row->values[0];
    }
  }
  return area;
}

int aromatic_ring_count(const Molecule &mol) {
  int n = 0;
  for (const auto &ring : mol.rings()) {
    bool aromatic = true;
    for (int a : ring) {
      aromatic = aromatic && mol.atoms[a].is_aromatic;
    }
    if (aromatic) {
      ++n;
    }
  }
  return n;
}

namespace {

const FilterPack &alert_pack() {
  static const auto *kPack = new FilterPack(
      load_filter_pack(data_path("mcf.smarts"), "mcf"));
  return *kPack;
}

}  // namespace

int alert_count(const Molecule &mol) {
  int n = 0;
  for (const auto &p : alert_pack().patterns) {
    if (has_match(p, mol, p.min_count)) {
      ++n;
    }
  }
  return n;
}

namespace {

struct QedRow {
  double a, b, c, d, e, f, dmax, weight;
};

struct QedParams {
  QedRow mw, alogp, hba, hbd, psa, rotb, arom, alerts;
};

const QedParams &qed_params() {
  static const auto *kParams = [] {
    std::ifstream in(data_path("qed.tsv"));
    if (!in) {
      throw std::runtime_error("cannot open qed parameter table");
    }
    auto *p = new QedParams();
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') {
        continue;
      }
      auto fields = split_tabs(line);
      if (fields.size() != 9) {
        throw std::runtime_error("qed table: wrong column count");
      }
      QedRow row{std::stod(fields[1]), std::stod(fields[2]),
                 std::stod(fields[3]), std::stod(fields[4]),
                 std::stod(fields[5]), std::stod(fields[6]),
                 std::stod(fields[7]), std::stod(fields[8])};
      if (fields[0] == "MW") {
        p->mw = row;
      } else if (fields[0] == "ALOGP") {
        p->alogp = row;
      } else if (fields[0] == "HBA") {
        p->hba = row;
      } else if (fields[0] == "HBD") {
        p->hbd = row;
      } else if (fields[0] == "PSA") {
        p->psa = row;
      } else if (fields[0] == "ROTB") {
        p->rotb = row;
      } else if (fields[0] == "AROM") {
        p->arom = row;
      } else if (fields[0] == "ALERTS") {
        p->alerts = row;
      } else {
        throw std::runtime_error("qed table: unknown property " + fields[0]);
      }
    }
    return p;
  }();
  return *kParams;
}

// Asymmetric double sigmoid, normalized to its maximum.
double desirability(const QedRow &r, double x) {
  double d = r.a +
             r.b / (1.0 + std::exp(-(x - r.c + r.d / 2.0) / r.e)) *
                 (1.0 - 1.0 / (1.0 + std::exp(-(x - r.c - r.d / 2.0) / r.f)));
  return d / r.dmax;
}

}  // namespace

double qed(const Molecule &mol) {
  const QedParams &p = qed_params();
  struct Term {
    const QedRow *row;
    double x;
  };
  const Term terms[] = {
      {&p.mw, molecular_weight(mol)},
      {&p.alogp, crippen_logp(mol)},
      {&p.hba, static_cast<double>(hba_count(mol))},
      {&p.hbd, static_cast<double>(hbd_count(mol))},
      {&p.psa, tpsa(mol)},
      {&p.rotb, static_cast<double>(rotatable_bonds(mol))},
      {&p.arom, static_cast<double>(aromatic_ring_count(mol))},
      {&p.alerts, static_cast<double>(alert_count(mol))},
  };
  double log_sum = 0;
  double weight_sum = 0;
  for (const auto &t : terms) {
    double d = std::clamp(desirability(*t.row, t.x), 1e-6, 1.0);
    log_sum += t.row->weight * std::log(d);
    weight_sum += t.row->weight;
  }
  return std::exp(log_sum / weight_sum);
}

ContributionTable::ContributionTable(
    std::vector<std::pair<uint64_t, double>> entries)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
}

double ContributionTable::get(uint64_t id, double fallback) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), id,
      [](const auto &e, uint64_t key) { return e.first < key; });
  if (it != entries_.end() && it->first == id) {
    return it->second;
  }
  return fallback;
}

namespace {
constexpr uint32_t kTableMagic = 0x4D424354;  // "MBCT"
constexpr uint32_t kTableVersion = 1;
}  // namespace

void ContributionTable::save(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write table: " + path);
  }
  uint64_t count = entries_.size();
  out.write(reinterpret_cast<const char *>(&kTableMagic), 4);
  out.write(reinterpret_cast<const char *>(&kTableVersion), 4);
  out.write(reinterpret_cast<const char *>(&count), 8);
  for (const auto &[id, value] : entries_) {
    out.write(reinterpret_cast<const char *>(&id), 8);
    out.write(reinterpret_cast<const char *>(&value), 8);
  }
  if (!out) {
    throw std::runtime_error("write failure: " + path);
  }
}

ContributionTable ContributionTable::load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open table: " + path);
  }
  uint32_t magic = 0;
  uint32_t version = 0;
  uint64_t count = 0;
  in.read(reinterpret_cast<char *>(&magic), 4);
  in.read(reinterpret_cast<char *>(&version), 4);
  in.read(reinterpret_cast<char *>(&count), 8);
  if (!in || magic != kTableMagic || version != kTableVersion) {
    throw std::runtime_error("bad table header: " + path);
  }
  std::vector<std::pair<uint64_t, double>> entries(count);
  for (auto &[id, value] : entries) {
    in.read(reinterpret_cast<char *>(&id), 8);
    in.read(reinterpret_cast<char *>(&value), 8);
  }
  if (!in) {
    throw std::runtime_error("truncated table: " + path);
  }
  return ContributionTable(std::move(entries));
}

namespace {

// Per-atom environment ids at every radius up to the default. Counting all
// shells, not just the outermost, lets small common fragments (methyls,
// hydroxyls) dominate the frequency statistics the way they do in a large
// reference corpus.
std::vector<uint64_t> shell_environment_ids(const Molecule &mol) {
  std::vector<uint64_t> ids;
  for (int r = 0; r <= kDefaultMorganRadius; ++r) {
    auto layer = atom_environment_ids(mol, r);
    ids.insert(ids.end(), layer.begin(), layer.end());
  }
  return ids;
}

}  // namespace

void ContributionTrainer::add(const Molecule &mol) {
  for (uint64_t id : shell_environment_ids(mol)) {
    ++counts_[id];
  }
  ++molecules_;
}

std::vector<std::pair<uint64_t, int64_t>> ContributionTrainer::counts()
    const {
  std::vector<std::pair<uint64_t, int64_t>> out(counts_.begin(),
                                                counts_.end());
  std::sort(out.begin(), out.end());
  return out;
}

ContributionTable ContributionTrainer::finish() const {
  if (molecules_ == 0) {
    throw std::runtime_error("empty training corpus");
  }
  std::vector<std::pair<int64_t, uint64_t>> by_count;
  int64_t total = 0;
  for (const auto &[id, n] : counts_) {
    by_count.emplace_back(n, id);
    total += n;
  }
  std::sort(by_count.rbegin(), by_count.rend());
  // reference count: the environment at which cumulative occurrence mass
  // reaches 80%, so the common vocabulary scores positive
  int64_t running = 0;
  int64_t reference = by_count.back().first;
  for (const auto &[n, id] : by_count) {
    running += n;
    if (running >= total * 4 / 5) {
      reference = n;
      break;
    }
  }
  double offset = std::log(static_cast<double>(reference));
  std::vector<std::pair<uint64_t, double>> entries;
  entries.reserve(by_count.size());
  for (const auto &[n, id] : by_count) {
    entries.emplace_back(id, std::log(static_cast<double>(n)) - offset);
  }
  return ContributionTable(std::move(entries));
}

ContributionTable train_contributions(const std::vector<Molecule> &corpus) {
  ContributionTrainer trainer;
  for (const auto &mol : corpus) {
    trainer.add(mol);
  }
  return trainer.finish();
}

double sa_score(const Molecule &mol, const ContributionTable &table) {
  auto ids = shell_environment_ids(mol);
  if (ids.empty()) {
    return 10.0;
  }
  double frag = 0;
  for (uint64_t id : ids) {
    frag += table.get(id, 0.0);
  }
  frag /= static_cast<double>(ids.size());

  int n = mol.num_heavy_atoms();
  double size_penalty =
      std::pow(static_cast<double>(n), 1.005) - static_cast<double>(n);
  int macro = 0;
  int ring_atoms = 0;
  int ring_bonds = 0;
  for (const auto &ring : mol.rings()) {
    if (ring.size() > 8) {
      ++macro;
    }
  }
  for (const auto &a : mol.atoms) {
    if (a.in_ring()) {
      ++ring_atoms;
    }
  }
  for (const auto &b : mol.bonds) {
    if (b.in_ring) {
      ++ring_bonds;
    }
  }
  double macro_penalty = std::log10(static_cast<double>(macro) + 1.0);
  // fused and bridged systems have more ring bonds than ring atoms
  double fusion_penalty = std::log10(
      static_cast<double>(std::max(0, ring_bonds - ring_atoms)) + 1.0);

  double raw = frag - size_penalty - macro_penalty - fusion_penalty;
  double sa = 11.0 - (raw + 5.0) / 6.5 * 9.0;
  return std::clamp(sa, 1.0, 10.0);
}

NpTables train_np_tables(const std::vector<Molecule> &natural,
                         const std::vector<Molecule> &synthetic) {
  ContributionTrainer nat;
  ContributionTrainer syn;
  for (const auto &m : natural) {
    nat.add(m);
  }
  for (const auto &m : synthetic) {
    syn.add(m);
  }
  auto nat_counts = nat.counts();
  auto syn_counts = syn.counts();
  double nat_total = 0;
  double syn_total = 0;
  for (const auto &[id, n] : nat_counts) {
    nat_total += static_cast<double>(n);
  }
  for (const auto &[id, n] : syn_counts) {
    syn_total += static_cast<double>(n);
  }
  std::vector<std::pair<uint64_t, double>> entries;
  size_t i = 0;
  size_t j = 0;
  while (i < nat_counts.size() || j < syn_counts.size()) {
    uint64_t id;
    double cn = 0;
    double cs = 0;
    if (j >= syn_counts.size() ||
        (i < nat_counts.size() && nat_counts[i].first < syn_counts[j].first)) {
      id = nat_counts[i].first;
      cn = static_cast<double>(nat_counts[i].second);
      ++i;
    } else if (i >= nat_counts.size() ||
               syn_counts[j].first < nat_counts[i].first) {
      id = syn_counts[j].first;
      cs = static_cast<double>(syn_counts[j].second);
      ++j;
    } else {
      id = nat_counts[i].first;
      cn = static_cast<double>(nat_counts[i].second);
      cs = static_cast<double>(syn_counts[j].second);
      ++i;
      ++j;
    }
    // additive smoothing keeps one-sided environments finite
    double odds = ((cn + 1.0) / (nat_total + 1.0)) /
                  ((cs + 1.0) / (syn_total + 1.0));
    entries.emplace_back(id, std::log10(odds));
  }
  return NpTables{ContributionTable(std::move(entries))};
}

double np_score(const Molecule &mol, const NpTables &tables) {
  auto ids = shell_environment_ids(mol);
  if (ids.empty()) {
    return 0.0;
  }
  double sum = 0;
  for (uint64_t id : ids) {
    sum += tables.log_odds.get(id, 0.0);
  }
  double score = sum / static_cast<double>(ids.size());
  return std::clamp(score, -5.0, 5.0);
}

}  // namespace molbench
