//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include "molbench/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>

#include "molbench/smiles.hpp"

namespace molbench {

std::optional<double> MetricReport::get(const std::string &name) const {
  for (const auto &[k, v] : values) {
    if (k == name) {
      return v;
    }
  }
  return std::nullopt;
}

namespace {

// Static partition of [0, n) across worker threads; the caller reduces
// per-worker results in index order so the total is deterministic.
void parallel_for(int64_t n, int threads,
                  const std::function<void(int64_t, int64_t)> &body) {
  threads = std::max(1, threads);
  if (threads == 1 || n < 2 * threads) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  int64_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    int64_t lo = t * chunk;
    int64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) {
      break;
    }
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto &th : pool) {
    th.join();
  }
}

}  // namespace

std::vector<Molecule> valid_molecules(const std::vector<std::string> &raw) {
  std::vector<Molecule> out;
  for (const auto &s : raw) {
    auto r = parse_smiles(s);
    if (r.ok()) {
      out.push_back(std::move(r.value()));
    }
  }
  return out;
}

double validity(const std::vector<std::string> &generated) {
  if (generated.empty()) {
    return 0.0;
  }
  int64_t valid = 0;
  for (const auto &s : generated) {
    if (parse_smiles(s).ok()) {
      ++valid;
    }
  }
  return static_cast<double>(valid) / static_cast<double>(generated.size());
}

double uniqueness_at_k(const std::vector<std::string> &generated, int k) {
  std::unordered_set<std::string> unique;
  int taken = 0;
  for (const auto &s : generated) {
    if (taken == k) {
      break;
    }
    auto r = parse_smiles(s);
    if (!r.ok()) {
      continue;
    }
    unique.insert(r.value().canonical());
    ++taken;
  }
  if (taken < k) {
    throw std::runtime_error("uniqueness@" + std::to_string(k) + ": only " +
                             std::to_string(taken) + " valid molecules");
  }
  return static_cast<double>(unique.size()) / static_cast<double>(k);
}

double novelty(const std::vector<std::string> &generated,
               const std::unordered_set<std::string> &train) {
  std::unordered_set<std::string> unique;
  for (const auto &s : generated) {
    auto r = parse_smiles(s);
    if (r.ok()) {
      unique.insert(r.value().canonical());
    }
  }
  if (unique.empty()) {
    throw std::runtime_error("novelty: no valid molecules");
  }
  int64_t novel = 0;
  for (const auto &c : unique) {
    if (train.find(c) == train.end()) {
      ++novel;
    }
  }
  return static_cast<double>(novel) / static_cast<double>(unique.size());
}

Profile fragment_profile(const std::vector<Molecule> &mols) {
  Profile p;
  for (const auto &m : mols) {
    for (auto &frag : brics_fragments(m)) {
      p.add(frag);
    }
  }
  return p;
}

Profile scaffold_profile(const std::vector<Molecule> &mols) {
  Profile p;
  for (const auto &m : mols) {
    auto scaf = murcko_scaffold(m);
    p.add(scaf.has_value() ? *scaf : std::string(kNoScaffoldToken));
  }
  return p;
}

double profile_cosine(const Profile &a, const Profile &b) {
  if (a.total == 0 && b.total == 0) {
    throw std::invalid_argument("cosine of two empty profiles");
  }
  if (a.total == 0 || b.total == 0) {
    return 0.0;
  }
  double dot = 0;
  double na = 0;
  double nb = 0;
  for (const auto &[k, v] : a.counts) {
    na += static_cast<double>(v) * static_cast<double>(v);
    auto it = b.counts.find(k);
    if (it != b.counts.end()) {
      dot += static_cast<double>(v) * static_cast<double>(it->second);
    }
  }
  for (const auto &[k, v] : b.counts) {
    nb += static_cast<double>(v) * static_cast<double>(v);
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double fragment_similarity(const std::vector<Molecule> &g,
                           const std::vector<Molecule> &r,
                           bool as_distance) {
  double cos = profile_cosine(fragment_profile(g), fragment_profile(r));
  return as_distance ? 1.0 - cos : cos;
}

double scaffold_similarity(const std::vector<Molecule> &g,
                           const std::vector<Molecule> &r,
                           bool as_distance) {
  double cos = profile_cosine(scaffold_profile(g), scaffold_profile(r));
  return as_distance ? 1.0 - cos : cos;
}

std::vector<BitFingerprint> fingerprints(const std::vector<Molecule> &mols,
                                         FingerprintKind kind, int threads) {
  std::vector<BitFingerprint> out(mols.size());
  parallel_for(static_cast<int64_t>(mols.size()), threads,
               [&](int64_t lo, int64_t hi) {
                 for (int64_t i = lo; i < hi; ++i) {
                   out[i] = kind == FingerprintKind::kMorgan
                                ? morgan_fingerprint(mols[i])
                                : pharmacophore_fingerprint(mols[i]);
                 }
               });
  return out;
}

double snn(const std::vector<BitFingerprint> &g,
           const std::vector<BitFingerprint> &r, int threads) {
  if (g.empty() || r.empty()) {
    throw std::invalid_argument("snn over an empty set");
  }
  std::vector<double> best(g.size(), 0.0);
  parallel_for(static_cast<int64_t>(g.size()), threads,
               [&](int64_t lo, int64_t hi) {
                 for (int64_t i = lo; i < hi; ++i) {
                   double m = 0;
                   for (const auto &ref : r) {
                     m = std::max(m, tanimoto(g[i], ref));
                     if (m == 1.0) {
                       break;
                     }
                   }
                   best[i] = m;
                 }
               });
  double sum = 0;
  for (double v : best) {
    sum += v;
  }
  return sum / static_cast<double>(g.size());
}

double internal_diversity(const std::vector<BitFingerprint> &g, int p,
                          int threads) {
  if (g.empty()) {
    throw std::invalid_argument("internal_diversity over an empty set");
  }
  if (p != 1 && p != 2) {
    throw std::invalid_argument("internal_diversity: p must be 1 or 2");
  }
  int64_t n = static_cast<int64_t>(g.size());
  std::vector<double> row_sums(n, 0.0);
  parallel_for(n, threads, [&](int64_t lo, int64_t hi) {
    for (int64_t i = lo; i < hi; ++i) {
      double s = 0;
      for (int64_t j = i + 1; j < n; ++j) {
        double t = tanimoto(g[i], g[j]);
        s += p == 1 ? t : t * t;
      }
      row_sums[i] = s;
    }
  });
  double off_diag = 0;
  for (double v : row_sums) {
    off_diag += v;
  }
  // ordered pairs: n self-pairs at T=1 plus both orders of each i<j pair
  double mean = (static_cast<double>(n) + 2.0 * off_diag) /
                (static_cast<double>(n) * static_cast<double>(n));
  return 1.0 - (p == 1 ? mean : std::sqrt(mean));
}

GaussianSummary summarize(const std::vector<std::vector<double>> &rows) {
  if (rows.size() < 2) {
    throw std::invalid_argument("need at least 2 samples for a summary");
  }
  size_t dim = rows[0].size();
  GaussianSummary s;
  s.n = static_cast<int64_t>(rows.size());
  s.mean.assign(dim, 0.0);
  for (const auto &row : rows) {
    if (row.size() != dim) {
      throw std::invalid_argument("ragged sample matrix");
    }
    for (size_t d = 0; d < dim; ++d) {
      s.mean[d] += row[d];
    }
  }
  for (auto &m : s.mean) {
    m /= static_cast<double>(s.n);
  }
  s.covariance.assign(dim * dim, 0.0);
  for (const auto &row : rows) {
    for (size_t i = 0; i < dim; ++i) {
      for (size_t j = 0; j < dim; ++j) {
        s.covariance[i * dim + j] +=
            (row[i] - s.mean[i]) * (row[j] - s.mean[j]);
      }
    }
  }
  for (auto &c : s.covariance) {
    c /= static_cast<double>(s.n - 1);
  }
  return s;
}

GaussianSummary summarize_scalar(const std::vector<double> &values) {
  std::vector<std::vector<double>> rows;
  rows.reserve(values.size());
  for (double v : values) {
    rows.push_back({v});
  }
  return summarize(rows);
}

double frechet_distance(const GaussianSummary &a, const GaussianSummary &b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("dimension mismatch in frechet_distance");
  }
  int d = a.dim();
  double mean_term = 0;
  for (int i = 0; i < d; ++i) {
    double delta = a.mean[i] - b.mean[i];
    mean_term += delta * delta;
  }
  using Matrix = Eigen::MatrixXd;
  Eigen::Map<const Matrix> ca(a.covariance.data(), d, d);
  Eigen::Map<const Matrix> cb(b.covariance.data(), d, d);

  Eigen::SelfAdjointEigenSolver<Matrix> es_a(ca);
  if (es_a.eigenvalues().minCoeff() < -1e-10) {
    throw std::invalid_argument("covariance is not positive semi-definite");
  }
  Matrix sqrt_a = es_a.eigenvectors() *
                  es_a.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                  es_a.eigenvectors().transpose();
  Matrix inner = sqrt_a * cb * sqrt_a;
  inner = 0.5 * (inner + inner.transpose());  // symmetrize roundoff
  Eigen::SelfAdjointEigenSolver<Matrix> es_m(inner);
  if (es_m.eigenvalues().minCoeff() < -1e-10 ||
      Eigen::SelfAdjointEigenSolver<Matrix>(cb).eigenvalues().minCoeff() <
          -1e-10) {
    throw std::invalid_argument("covariance is not positive semi-definite");
  }
  double cross = es_m.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  double trace_term = ca.trace() + cb.trace() - 2.0 * cross;
  return mean_term + std::max(0.0, trace_term);
}

double descriptor_value(const Molecule &mol, const std::string &name,
                        const DescriptorContext &ctx) {
  if (name == "mw") {
    return molecular_weight(mol);
  }
  if (name == "logp") {
    return crippen_logp(mol);
  }
  if (name == "rotatable_bonds") {
    return static_cast<double>(rotatable_bonds(mol));
  }
  if (name == "qed") {
    return qed(mol);
  }
  if (name == "sa") {
    if (ctx.sa == nullptr) {
      throw std::invalid_argument("sa requires a contribution table");
    }
    return sa_score(mol, *ctx.sa);
  }
  if (name == "np") {
    if (ctx.np == nullptr) {
      throw std::invalid_argument("np requires trained tables");
    }
    return np_score(mol, *ctx.np);
  }
  throw std::invalid_argument("unknown descriptor: " + name);
}

double property_frechet(const std::vector<Molecule> &g,
                        const std::vector<Molecule> &r,
                        const std::string &descriptor,
                        const DescriptorContext &ctx) {
  std::vector<double> gv;
  std::vector<double> rv;
  gv.reserve(g.size());
  rv.reserve(r.size());
  for (const auto &m : g) {
    gv.push_back(descriptor_value(m, descriptor, ctx));
  }
  for (const auto &m : r) {
    rv.push_back(descriptor_value(m, descriptor, ctx));
  }
  return frechet_distance(summarize_scalar(gv), summarize_scalar(rv));
}

bool passes_constraints(const Molecule &mol,
                        const StructuralConstraints &constraints,
                        std::string *failed_rule) {
  for (const auto &a : mol.atoms) {
    if (std::find(constraints.allowed_elements.begin(),
                  constraints.allowed_elements.end(),
                  a.atomic_number) == constraints.allowed_elements.end()) {
      if (failed_rule != nullptr) {
        *failed_rule = "element";
      }
      return false;
    }
    if (constraints.reject_charged && a.formal_charge != 0) {
      if (failed_rule != nullptr) {
        *failed_rule = "charged";
      }
      return false;
    }
  }
  for (const auto &ring : mol.rings()) {
    if (static_cast<int>(ring.size()) > constraints.max_ring_size) {
      if (failed_rule != nullptr) {
        *failed_rule = "ring_size";
      }
      return false;
    }
  }
  return true;
}

namespace {

const std::vector<FilterPack> &default_packs() {
  static const auto *kPacks = [] {
    auto *packs = new std::vector<FilterPack>();
    std::string dir(MOLBENCH_DATA_DIR);
    packs->push_back(load_filter_pack(dir + "/mcf.smarts", "mcf"));
    packs->push_back(load_filter_pack(dir + "/pains.smarts", "pains"));
    return packs;
  }();
  return *kPacks;
}

}  // namespace

double filters_fraction(const std::vector<Molecule> &g,
                        const std::vector<FilterPack> &packs,
                        const StructuralConstraints &constraints) {
  if (g.empty()) {
    throw std::invalid_argument("filters_fraction over an empty set");
  }
  const auto &effective = packs.empty() ? default_packs() : packs;
  int64_t pass = 0;
  for (const auto &m : g) {
    if (passes_constraints(m, constraints, nullptr) &&
        passes_filters(m, effective).pass) {
      ++pass;
    }
  }
  return static_cast<double>(pass) / static_cast<double>(g.size());
}

namespace {
constexpr uint32_t kEmbeddingMagic = 0x4D42454D;  // "MBEM"
}

void write_embeddings(const std::string &path,
                      const std::vector<std::vector<float>> &rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write embeddings: " + path);
  }
  uint32_t dim = rows.empty() ? 0 : static_cast<uint32_t>(rows[0].size());
  uint64_t count = rows.size();
  out.write(reinterpret_cast<const char *>(&kEmbeddingMagic), 4);
  out.write(reinterpret_cast<const char *>(&dim), 4);
  out.write(reinterpret_cast<const char *>(&count), 8);
  for (const auto &row : rows) {
    if (row.size() != dim) {
      throw std::runtime_error("ragged embedding rows");
    }
    out.write(reinterpret_cast<const char *>(row.data()),
              static_cast<std::streamsize>(dim * sizeof(float)));
  }
  if (!out) {
    throw std::runtime_error("write failure: " + path);
  }
}

std::vector<std::vector<float>> read_embeddings(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open embeddings: " + path);
  }
  uint32_t magic = 0;
  uint32_t dim = 0;
  uint64_t count = 0;
  in.read(reinterpret_cast<char *>(&magic), 4);
  in.read(reinterpret_cast<char *>(&dim), 4);
  in.read(reinterpret_cast<char *>(&count), 8);
  if (!in || magic != kEmbeddingMagic) {
    throw std::runtime_error("bad embedding header: " + path);
  }
  std::vector<std::vector<float>> rows(count, std::vector<float>(dim));
  for (auto &row : rows) {
    in.read(reinterpret_cast<char *>(row.data()),
            static_cast<std::streamsize>(dim * sizeof(float)));
  }
  if (!in) {
    throw std::runtime_error("truncated embeddings: " + path);
  }
  return rows;
}

MetricReport full_report(const EvalSets &sets, const ReportConfig &config) {
  MetricReport report;
  report.set("Valid", validity(sets.generated));
  for (int k : config.unique_k) {
    try {
      report.set("Unique@" + std::to_string(k),
                 uniqueness_at_k(sets.generated, k));
    } catch (const std::runtime_error &e) {
      report.metadata["Unique@" + std::to_string(k)] =
          std::string("skipped: ") + e.what();
    }
  }

  auto mols = valid_molecules(sets.generated);
  auto to_mols = [](const std::unordered_set<std::string> &set) {
    std::vector<std::string> sorted(set.begin(), set.end());
    std::sort(sorted.begin(), sorted.end());
    return valid_molecules(sorted);
  };
  auto test_mols = to_mols(sets.test);
  auto testsf_mols = to_mols(sets.test_scaffolds);

  auto g_fp = fingerprints(mols, config.fingerprint_kind, config.threads);
  if (!test_mols.empty()) {
    auto r_fp =
        fingerprints(test_mols, config.fingerprint_kind, config.threads);
    report.set("SNN/Test", snn(g_fp, r_fp, config.threads));
    report.set("Frag/Test", fragment_similarity(mols, test_mols));
    report.set("Scaf/Test", scaffold_similarity(mols, test_mols));
  }
  if (!testsf_mols.empty()) {
    auto r_fp =
        fingerprints(testsf_mols, config.fingerprint_kind, config.threads);
    report.set("SNN/TestSF", snn(g_fp, r_fp, config.threads));
    report.set("Frag/TestSF", fragment_similarity(mols, testsf_mols));
    report.set("Scaf/TestSF", scaffold_similarity(mols, testsf_mols));
  }
  for (int p : config.diversity_p) {
    report.set(p == 1 ? "IntDiv" : "IntDiv" + std::to_string(p),
               internal_diversity(g_fp, p, config.threads));
  }
  report.set("Filters",
             filters_fraction(mols, config.packs, config.constraints));
  report.set("Novelty", novelty(sets.generated, sets.train));

  report.metadata["generated"] = std::to_string(sets.generated.size());
  report.metadata["valid"] = std::to_string(mols.size());
  report.metadata["test"] = std::to_string(test_mols.size());
  report.metadata["test_scaffolds"] = std::to_string(testsf_mols.size());
  report.metadata["fingerprint"] =
      config.fingerprint_kind == FingerprintKind::kMorgan ? "morgan"
                                                          : "pharmacophore";
  return report;
}

}  // namespace molbench
