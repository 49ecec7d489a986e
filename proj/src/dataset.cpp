//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include "molbench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "molbench/decompose.hpp"
#include "molbench/descriptors.hpp"
#include "molbench/smiles.hpp"

namespace molbench {

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

std::string filter_violation(const Molecule &mol,
                             const FilterConfig &config) {
  if (config.reject_disconnected && mol.disconnected) {
    return "disconnected";
  }
  std::string rule;
  if (!passes_constraints(mol, config.constraints, &rule)) {
    return rule;
  }
  double mw = molecular_weight(mol);
  if (mw < config.mw_min || mw > config.mw_max) {
    return "mw_range";
  }
  if (rotatable_bonds(mol) > config.max_rotatable) {
    return "rotatable_bonds";
  }
  if (crippen_logp(mol) > config.max_logp) {
    return "logp";
  }
  const auto &packs = config.packs.empty() ? default_packs() : config.packs;
  auto verdict = passes_filters(mol, packs);
  if (!verdict.pass) {
    return verdict.violations.front();
  }
  return "";
}

void clean_leads_filter(
    std::istream &in, const FilterConfig &config,
    const std::function<void(const std::string &)> &emit,
    const std::function<void(const Rejection &)> &reject) {
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    // records are `SMILES[TAB]optional-id`
    size_t tab = line.find('\t');
    if (tab != std::string::npos) {
      line.resize(tab);
    }
    auto parsed = parse_smiles(line);
    if (!parsed.ok()) {
      reject({line_no, line, "parse"});
      continue;
    }
    std::string rule = filter_violation(parsed.value(), config);
    if (!rule.empty()) {
      reject({line_no, line, rule});
      continue;
    }
    emit(parsed.value().canonical());
  }
}

std::vector<std::string> clean_leads_filter(
    const std::vector<std::string> &raw, const FilterConfig &config,
    std::vector<Rejection> *rejections) {
  std::ostringstream joined;
  for (const auto &s : raw) {
    joined << s << '\n';
  }
  std::istringstream in(joined.str());
  std::vector<std::string> out;
  clean_leads_filter(
      in, config, [&](const std::string &s) { out.push_back(s); },
      [&](const Rejection &r) {
        if (rejections != nullptr) {
          rejections->push_back(r);
        }
      });
  return out;
}

std::vector<std::string> deduplicate(const std::vector<std::string> &input) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto &s : input) {
    if (seen.insert(s).second) {
      out.push_back(s);
    }
  }
  return out;
}

void seeded_shuffle(std::vector<int> &indices, uint64_t seed) {
  uint64_t state = seed;
  auto next = [&state] {
    // splitmix64 step; identical output on every platform
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  for (size_t i = indices.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(next() % i);
    std::swap(indices[i - 1], indices[j]);
  }
}

Splits split(const std::vector<std::string> &dataset, const SplitSpec &spec) {
  int64_t n = static_cast<int64_t>(dataset.size());
  if (n == 0) {
    throw std::invalid_argument("empty dataset");
  }
  if (spec.train_fraction + spec.test_fraction +
          (spec.scaffold_test ? spec.scaffold_test_fraction : 0.0) >
      1.0 + 1e-9) {
    throw std::invalid_argument("split fractions exceed 1");
  }
  Splits out;
  std::vector<bool> held(dataset.size(), false);

  if (spec.scaffold_test) {
    std::map<std::string, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) {
      auto parsed = parse_smiles(dataset[i]);
      if (!parsed.ok()) {
        throw std::invalid_argument("invalid molecule in dataset: " +
                                    dataset[i]);
      }
      auto scaf = murcko_scaffold(parsed.value());
      groups[scaf.has_value() ? *scaf : std::string(kNoScaffoldToken)]
          .push_back(i);
    }
    int64_t target = std::llround(spec.scaffold_test_fraction *
                                  static_cast<double>(n));
    if (target > 0 && groups.size() < 2) {
      throw std::invalid_argument("dataset too small for a scaffold split");
    }
    // rarest scaffolds first; the acyclic group is never held out, so the
    // holdout shares no scaffold vocabulary with the rest
    std::vector<std::pair<size_t, std::string>> order;
    for (const auto &[scaf, members] : groups) {
      if (scaf != kNoScaffoldToken) {
        order.emplace_back(members.size(), scaf);
      }
    }
    std::sort(order.begin(), order.end());
    int64_t taken = 0;
    for (const auto &[size, scaf] : order) {
      if (taken >= target) {
        break;
      }
      for (int i : groups[scaf]) {
        held[i] = true;
        ++taken;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (held[i]) {
        out.scaffold_test.push_back(dataset[i]);
      }
    }
  }

  std::vector<int> rest;
  for (int i = 0; i < n; ++i) {
    if (!held[i]) {
      rest.push_back(i);
    }
  }
  seeded_shuffle(rest, spec.seed);
  int64_t n_train =
      std::min<int64_t>(static_cast<int64_t>(rest.size()),
                        std::llround(spec.train_fraction *
                                     static_cast<double>(n)));
  if (n_train == 0 && spec.train_fraction > 0) {
    throw std::invalid_argument("dataset too small for requested fractions");
  }
  for (size_t i = 0; i < rest.size(); ++i) {
    if (static_cast<int64_t>(i) < n_train) {
      out.train.push_back(dataset[rest[i]]);
    } else {
      out.test.push_back(dataset[rest[i]]);
    }
  }
  return out;
}

}  // namespace molbench
