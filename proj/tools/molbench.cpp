//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "molbench/dataset.hpp"
#include "molbench/decompose.hpp"
#include "molbench/descriptors.hpp"
#include "molbench/fingerprint.hpp"
#include "molbench/metrics.hpp"
#include "molbench/ngram.hpp"
#include "molbench/smiles.hpp"
#include "molbench/substructure.hpp"

namespace {

constexpr const char *kVersion = "0.1.0";

using molbench::Molecule;

struct Record {
  std::string smiles;
  std::string id;
};

std::vector<Record> read_records(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open input: " + path);
  }
  std::vector<Record> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      records.push_back({line, ""});
    } else {
      records.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
  }
  return records;
}

std::vector<std::string> read_smiles_column(const std::string &path) {
  std::vector<std::string> out;
  for (auto &rec : read_records(path)) {
    out.push_back(std::move(rec.smiles));
  }
  return out;
}

std::ofstream open_output(const std::string &path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output: " + path);
  }
  return out;
}

int default_threads() {
  if (const char *env = std::getenv("MOLBENCH_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) {
      return n;
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---- parse ----------------------------------------------------------

int cmd_parse(const std::string &input, const std::string &output) {
  auto records = read_records(input);
  std::ostream *out = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file = open_output(output);
    out = &file;
  }
  int64_t invalid = 0;
  for (const auto &rec : records) {
    auto r = molbench::parse_smiles(rec.smiles);
    if (!r.ok()) {
      ++invalid;
      std::cerr << "invalid: " << rec.smiles << " (position "
                << r.error().position << ": " << r.error().message << ")\n";
      continue;
    }
    *out << r.value().canonical();
    if (!rec.id.empty()) {
      *out << '\t' << rec.id;
    }
    *out << '\n';
  }
  std::cerr << records.size() - invalid << " parsed, " << invalid
            << " invalid\n";
  return 0;
}

// ---- prepare --------------------------------------------------------

molbench::FilterConfig read_filter_config(const std::string &path) {
  molbench::FilterConfig config;
  if (path.empty()) {
    return config;
  }
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config: " + path);
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "mw_min") {
      config.mw_min = std::stod(value);
    } else if (key == "mw_max") {
      config.mw_max = std::stod(value);
    } else if (key == "max_rotatable") {
      config.max_rotatable = std::stoi(value);
    } else if (key == "max_logp") {
      config.max_logp = std::stod(value);
    } else if (key == "max_ring_size") {
      config.constraints.max_ring_size = std::stoi(value);
    } else if (key == "reject_charged") {
      config.constraints.reject_charged = value == "1" || value == "true";
    } else if (key == "reject_disconnected") {
      config.reject_disconnected = value == "1" || value == "true";
    } else if (key == "allowed_elements") {
      config.constraints.allowed_elements = {1};  // hydrogen always allowed
      std::istringstream list(value);
      std::string sym;
      while (std::getline(list, sym, ',')) {
        const auto *info = molbench::element_by_symbol(sym);
        if (info == nullptr) {
          throw std::invalid_argument("unknown element in config: " + sym);
        }
        config.constraints.allowed_elements.push_back(info->atomic_number);
      }
    } else if (key == "pack") {
      config.packs.push_back(molbench::load_filter_pack(value, value));
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  return config;
}

int cmd_prepare(const std::string &input, const std::string &out_dir,
                const std::string &config_path, molbench::SplitSpec spec) {
  auto config = read_filter_config(config_path);
  std::ifstream in(input);
  if (!in) {
    throw std::runtime_error("cannot open input: " + input);
  }
  auto log = open_output(out_dir + "/rejections.tsv");
  std::vector<std::string> accepted;
  molbench::clean_leads_filter(
      in, config, [&](const std::string &s) { accepted.push_back(s); },
      [&](const molbench::Rejection &r) {
        log << r.line_no << '\t' << r.input << '\t' << r.rule << '\n';
      });
  accepted = molbench::deduplicate(accepted);
  auto splits = molbench::split(accepted, spec);
  auto write_list = [&](const char *name,
                        const std::vector<std::string> &list) {
    auto out = open_output(out_dir + "/" + name);
    for (const auto &s : list) {
      out << s << '\n';
    }
  };
  write_list("train.smi", splits.train);
  write_list("test.smi", splits.test);
  write_list("scaffold_test.smi", splits.scaffold_test);
  std::cerr << "accepted " << accepted.size() << ": train "
            << splits.train.size() << ", test " << splits.test.size()
            << ", scaffold_test " << splits.scaffold_test.size() << '\n';
  return 0;
}

// ---- fingerprint ----------------------------------------------------

int cmd_fingerprint(const std::string &input, const std::string &output,
                    const std::string &kind, int radius, int width,
                    int threads) {
  auto mols = molbench::valid_molecules(read_smiles_column(input));
  std::vector<molbench::BitFingerprint> fps;
  if (kind == "morgan") {
    fps.resize(mols.size());
    for (size_t i = 0; i < mols.size(); ++i) {
      fps[i] = molbench::morgan_fingerprint(mols[i], radius, width);
    }
  } else {
    fps = molbench::fingerprints(
        mols, molbench::FingerprintKind::kPharmacophore, threads);
  }
  molbench::save_fingerprints(output, fps);
  std::cerr << fps.size() << " fingerprints written\n";
  return 0;
}

// ---- descriptors ----------------------------------------------------

int cmd_descriptors(const std::string &input, const std::string &output,
                    const std::string &sa_table_path,
                    const std::string &np_table_path,
                    const std::string &train_table_path) {
  auto mols = molbench::valid_molecules(read_smiles_column(input));
  if (!train_table_path.empty()) {
    auto table = molbench::train_contributions(mols);
    table.save(train_table_path);
    std::cerr << "contribution table over " << mols.size()
              << " molecules written\n";
    return 0;
  }
  std::optional<molbench::ContributionTable> sa_table;
  std::optional<molbench::NpTables> np_tables;
  if (!sa_table_path.empty()) {
    sa_table = molbench::ContributionTable::load(sa_table_path);
  }
  if (!np_table_path.empty()) {
    np_tables =
        molbench::NpTables{molbench::ContributionTable::load(np_table_path)};
  }
  std::ostream *out = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file = open_output(output);
    out = &file;
  }
  *out << "smiles\tmw\tlogp\trotatable_bonds\thba\thbd\ttpsa\tqed";
  if (sa_table.has_value()) {
    *out << "\tsa";
  }
  if (np_tables.has_value()) {
    *out << "\tnp";
  }
  *out << '\n';
  for (const auto &m : mols) {
    *out << m.canonical() << '\t' << molbench::molecular_weight(m) << '\t'
         << molbench::crippen_logp(m) << '\t' << molbench::rotatable_bonds(m)
         << '\t' << molbench::hba_count(m) << '\t' << molbench::hbd_count(m)
         << '\t' << molbench::tpsa(m) << '\t' << molbench::qed(m);
    if (sa_table.has_value()) {
      *out << '\t' << molbench::sa_score(m, *sa_table);
    }
    if (np_tables.has_value()) {
      *out << '\t' << molbench::np_score(m, *np_tables);
    }
    *out << '\n';
  }
  return 0;
}

// ---- eval -----------------------------------------------------------

int cmd_eval(const std::string &gen_path, const std::string &train_path,
             const std::string &test_path, const std::string &testsf_path,
             const std::string &output, const std::string &format,
             const std::string &kind,
             const std::vector<std::string> &pack_paths, int threads) {
  molbench::EvalSets sets;
  sets.generated = read_smiles_column(gen_path);
  auto canonical_set = [](const std::string &path) {
    std::unordered_set<std::string> out;
    if (path.empty()) {
      return out;
    }
    for (const auto &s : read_smiles_column(path)) {
      auto r = molbench::parse_smiles(s);
      if (r.ok()) {
        out.insert(r.value().canonical());
      }
    }
    return out;
  };
  sets.train = canonical_set(train_path);
  sets.test = canonical_set(test_path);
  sets.test_scaffolds = canonical_set(testsf_path);

  molbench::ReportConfig config;
  config.threads = threads;
  config.fingerprint_kind = kind == "pharmacophore"
                                ? molbench::FingerprintKind::kPharmacophore
                                : molbench::FingerprintKind::kMorgan;
  for (const auto &p : pack_paths) {
    config.packs.push_back(molbench::load_filter_pack(p, p));
  }
  std::cerr << "evaluating " << sets.generated.size() << " molecules\n";
  auto report = molbench::full_report(sets, config);

  std::ostream *out = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file = open_output(output);
    out = &file;
  }
  if (format == "tsv") {
    for (const auto &[k, v] : report.values) {
      *out << k << '\t' << v << '\n';
    }
  } else {
    for (const auto &[k, v] : report.values) {
      *out << k << " = " << v << '\n';
    }
    for (const auto &[k, v] : report.metadata) {
      *out << "# " << k << ": " << v << '\n';
    }
  }
  return 0;
}

// ---- distributions --------------------------------------------------

struct Binning {
  double lo;
  double hi;
  double width;
};

Binning binning_for(const std::string &descriptor) {
  if (descriptor == "mw") {
    return {0, 1000, 10};
  }
  if (descriptor == "logp") {
    return {-5, 10, 0.25};
  }
  if (descriptor == "qed") {
    return {0, 1, 0.05};
  }
  if (descriptor == "rotatable_bonds") {
    return {0, 30, 1};
  }
  if (descriptor == "sa") {
    return {1, 10, 0.25};
  }
  if (descriptor == "np") {
    return {-5, 5, 0.25};
  }
  throw std::invalid_argument("unknown descriptor: " + descriptor);
}

int cmd_distributions(const std::string &a_path, const std::string &b_path,
                      const std::vector<std::string> &descriptors,
                      const std::string &output,
                      const std::string &sa_table_path,
                      const std::string &np_table_path) {
  auto a = molbench::valid_molecules(read_smiles_column(a_path));
  auto b = molbench::valid_molecules(read_smiles_column(b_path));
  std::optional<molbench::ContributionTable> sa_table;
  std::optional<molbench::NpTables> np_tables;
  molbench::DescriptorContext ctx;
  if (!sa_table_path.empty()) {
    sa_table = molbench::ContributionTable::load(sa_table_path);
    ctx.sa = &*sa_table;
  }
  if (!np_table_path.empty()) {
    np_tables =
        molbench::NpTables{molbench::ContributionTable::load(np_table_path)};
    ctx.np = &*np_tables;
  }
  std::ostream *out = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file = open_output(output);
    out = &file;
  }
  *out << "descriptor\tbin_lo\tbin_hi\tcount_a\tcount_b\n";
  for (const auto &name : descriptors) {
    auto bins = binning_for(name);
    int nbins = static_cast<int>((bins.hi - bins.lo) / bins.width + 0.5);
    std::vector<int64_t> ha(nbins + 2, 0);  // 2 overflow bins
    std::vector<int64_t> hb(nbins + 2, 0);
    auto fill = [&](const std::vector<Molecule> &mols,
                    std::vector<int64_t> &h) {
      for (const auto &m : mols) {
        double v = molbench::descriptor_value(m, name, ctx);
        int bin;
        if (v < bins.lo) {
          bin = 0;
        } else if (v >= bins.hi) {
          bin = nbins + 1;
        } else {
          bin = 1 + static_cast<int>((v - bins.lo) / bins.width);
        }
        ++h[bin];
      }
    };
    fill(a, ha);
    fill(b, hb);
    for (int i = 0; i < nbins + 2; ++i) {
      double lo = i == 0 ? -1e300 : bins.lo + (i - 1) * bins.width;
      double hi = i == nbins + 1 ? 1e300 : bins.lo + i * bins.width;
      *out << name << '\t' << lo << '\t' << hi << '\t' << ha[i] << '\t'
           << hb[i] << '\n';
    }
    *out << "# frechet " << name << " = "
         << molbench::property_frechet(a, b, name, ctx) << '\n';
  }
  return 0;
}

// ---- baseline -------------------------------------------------------

int cmd_baseline_train(const std::string &input, const std::string &output,
                       int order) {
  auto corpus = read_smiles_column(input);
  auto model = molbench::train_ngram(corpus, order);
  molbench::save_ngram(output, model);
  std::cerr << "model over " << corpus.size() << " molecules, "
            << model.table.size() << " contexts\n";
  return 0;
}

int cmd_baseline_sample(const std::string &model_path,
                        const std::string &output, int count, int max_len,
                        uint64_t seed) {
  auto model = molbench::load_ngram(model_path);
  auto samples = molbench::sample_ngram(model, count, max_len, seed);
  std::ostream *out = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file = open_output(output);
    out = &file;
  }
  for (const auto &s : samples) {
    *out << s << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"molecular benchmarking toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string("molbench ") + kVersion +
                           " (packs: mcf 22 patterns, pains 8 patterns)");

  int threads = default_threads();
  app.add_option("--threads", threads, "worker thread cap");

  // parse
  std::string in_path;
  std::string out_path;
  auto *parse = app.add_subcommand("parse", "canonicalize a molecule file");
  parse->add_option("input", in_path)->required();
  parse->add_option("-o,--output", out_path);

  // prepare
  std::string prep_in;
  std::string prep_dir;
  std::string prep_config;
  molbench::SplitSpec spec;
  auto *prepare =
      app.add_subcommand("prepare", "filter, dedup, and split a dataset");
  prepare->add_option("input", prep_in)->required();
  prepare->add_option("--out-dir", prep_dir)->required();
  prepare->add_option("--config", prep_config);
  prepare->add_option("--seed", spec.seed);
  prepare->add_option("--train-fraction", spec.train_fraction);
  prepare->add_option("--test-fraction", spec.test_fraction);
  prepare->add_option("--scaffold-test-fraction",
                      spec.scaffold_test_fraction);

  // fingerprint
  std::string fp_in;
  std::string fp_out;
  std::string fp_kind = "morgan";
  int fp_radius = molbench::kDefaultMorganRadius;
  int fp_width = molbench::kDefaultMorganWidth;
  auto *fingerprint =
      app.add_subcommand("fingerprint", "emit a fingerprint cache file");
  fingerprint->add_option("input", fp_in)->required();
  fingerprint->add_option("-o,--output", fp_out)->required();
  fingerprint->add_option("--kind", fp_kind)
      ->check(CLI::IsMember({"morgan", "pharmacophore"}));
  fingerprint->add_option("--radius", fp_radius);
  fingerprint->add_option("--width", fp_width);

  // descriptors
  std::string desc_in;
  std::string desc_out;
  std::string sa_table;
  std::string np_table;
  std::string train_table;
  auto *descriptors =
      app.add_subcommand("descriptors", "per-molecule property TSV");
  descriptors->add_option("input", desc_in)->required();
  descriptors->add_option("-o,--output", desc_out);
  descriptors->add_option("--sa-table", sa_table);
  descriptors->add_option("--np-table", np_table);
  descriptors->add_option("--train-table", train_table,
                          "train a contribution table instead");

  // eval
  std::string gen_path;
  std::string train_path;
  std::string test_path;
  std::string testsf_path;
  std::string eval_out;
  std::string eval_format = "text";
  std::string eval_kind = "morgan";
  std::vector<std::string> pack_paths;
  auto *eval = app.add_subcommand("eval", "full metric report");
  eval->add_option("--gen", gen_path)->required();
  eval->add_option("--train", train_path)->required();
  eval->add_option("--test", test_path);
  eval->add_option("--test-scaffolds", testsf_path);
  eval->add_option("-o,--output", eval_out);
  eval->add_option("--format", eval_format)
      ->check(CLI::IsMember({"text", "tsv"}));
  eval->add_option("--fingerprint", eval_kind)
      ->check(CLI::IsMember({"morgan", "pharmacophore"}));
  eval->add_option("--filter-pack", pack_paths);

  // distributions
  std::string dist_a;
  std::string dist_b;
  std::string dist_out;
  std::vector<std::string> dist_desc = {"mw", "logp", "qed",
                                        "rotatable_bonds"};
  std::string dist_sa;
  std::string dist_np;
  auto *distributions = app.add_subcommand(
      "distributions", "descriptor histograms and distances");
  distributions->add_option("--a", dist_a)->required();
  distributions->add_option("--b", dist_b)->required();
  distributions->add_option("--descriptors", dist_desc);
  distributions->add_option("-o,--output", dist_out);
  distributions->add_option("--sa-table", dist_sa);
  distributions->add_option("--np-table", dist_np);

  // baseline
  auto *baseline = app.add_subcommand("baseline", "n-gram sample source");
  baseline->require_subcommand(1);
  std::string bl_in;
  std::string bl_out;
  int bl_order = 4;
  auto *bl_train = baseline->add_subcommand("train");
  bl_train->add_option("input", bl_in)->required();
  bl_train->add_option("-o,--output", bl_out)->required();
  bl_train->add_option("--order", bl_order)->check(CLI::Range(1, 8));
  std::string bl_model;
  std::string bl_sample_out;
  int bl_count = 1000;
  int bl_max_len = 120;
  uint64_t bl_seed = 0;
  auto *bl_sample = baseline->add_subcommand("sample");
  bl_sample->add_option("model", bl_model)->required();
  bl_sample->add_option("-o,--output", bl_sample_out);
  bl_sample->add_option("--count", bl_count);
  bl_sample->add_option("--max-len", bl_max_len);
  bl_sample->add_option("--seed", bl_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (parse->parsed()) {
      return cmd_parse(in_path, out_path);
    }
    if (prepare->parsed()) {
      return cmd_prepare(prep_in, prep_dir, prep_config, spec);
    }
    if (fingerprint->parsed()) {
      return cmd_fingerprint(fp_in, fp_out, fp_kind, fp_radius, fp_width,
                             threads);
    }
    if (descriptors->parsed()) {
      return cmd_descriptors(desc_in, desc_out, sa_table, np_table,
                             train_table);
    }
    if (eval->parsed()) {
      return cmd_eval(gen_path, train_path, test_path, testsf_path, eval_out,
                      eval_format, eval_kind, pack_paths, threads);
    }
    if (distributions->parsed()) {
      return cmd_distributions(dist_a, dist_b, dist_desc, dist_out, dist_sa,
                               dist_np);
    }
    if (baseline->parsed()) {
      if (bl_train->parsed()) {
        return cmd_baseline_train(bl_in, bl_out, bl_order);
      }
      return cmd_baseline_sample(bl_model, bl_sample_out, bl_count,
                                 bl_max_len, bl_seed);
    }
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
