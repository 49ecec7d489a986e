//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "molbench/dataset.hpp"
#include "molbench/decompose.hpp"
#include "test_util.hpp"

using namespace molbench;
using molbench::test::mol;

TEST_CASE("filter accepts a lead-like molecule") {
  FilterConfig cfg;
  // MW 296.8, no alerts, 4 rotatable bonds, moderate logp
  std::vector<std::string> in = {"CN1CCC(CC1)Oc1ccc(Cl)cc1C(N)=O"};
  std::vector<Rejection> rejected;
  auto out = clean_leads_filter(in, cfg, &rejected);
  CHECK(rejected.empty());
  REQUIRE(out.size() == 1);
  CHECK(out[0] == mol(in[0]).canonical());
}

TEST_CASE("filter names the first failed rule") {
  FilterConfig cfg;
  auto first_rule = [&](const std::string &s) {
    std::vector<Rejection> rejected;
    auto out = clean_leads_filter({s}, cfg, &rejected);
    CHECK(out.empty());
    REQUIRE(rejected.size() == 1);
    return rejected[0].rule;
  };
  CHECK(first_rule("C1CC") == "parse");
  CHECK(first_rule("CCO.CC") == "disconnected");
  CHECK(first_rule("CCO") == "mw_range");                   // too light
  CHECK(first_rule("C[N+](C)(C)CCCCCCCCCCCCCC") != "");     // charged
  // 30 carbons: too heavy
  CHECK(first_rule("CCCCCCCCCCCCCCCCCCCCCCCCCCCCCC") == "mw_range");
  // 9-membered ring violates the ring-size constraint
  CHECK(first_rule("O=C(O)C1CCCCCCCC1CCCCCC") != "mw_range");
}

TEST_CASE("filter enforces descriptor windows") {
  FilterConfig cfg;
  cfg.mw_min = 0.0;
  cfg.mw_max = 1000.0;
  // 9 rotatable bonds
  auto m = mol("CCCCCCCCCCCC");
  CHECK(filter_violation(m, cfg) == "rotatable_bonds");
  cfg.max_rotatable = 20;
  // dodecane logp exceeds 3.5
  CHECK(filter_violation(m, cfg) == "logp");
  cfg.max_logp = 100.0;
  CHECK(filter_violation(m, cfg).empty());
}

TEST_CASE("filter applies structural alert packs") {
  FilterConfig cfg;
  cfg.mw_min = 0.0;
  cfg.mw_max = 1000.0;
  auto v = filter_violation(mol("CCN=[N+]=[N-]"), cfg);
  CHECK_FALSE(v.empty());
  CHECK(v != "mw_range");
}

TEST_CASE("streaming filter matches the in-memory form") {
  FilterConfig cfg;
  cfg.mw_min = 0.0;
  cfg.mw_max = 1000.0;
  std::istringstream in("CCO\tmol1\nC1CC\tmol2\nCCCC\tmol3\n");
  std::vector<std::string> emitted;
  std::vector<Rejection> rejected;
  clean_leads_filter(
      in, cfg, [&](const std::string &s) { emitted.push_back(s); },
      [&](const Rejection &r) { rejected.push_back(r); });
  CHECK(emitted == std::vector<std::string>{mol("CCO").canonical(),
                                            mol("CCCC").canonical()});
  REQUIRE(rejected.size() == 1);
  CHECK(rejected[0].line_no == 2);
  CHECK(rejected[0].rule == "parse");
}

TEST_CASE("deduplicate keeps first occurrences in order") {
  std::vector<std::string> in = {"b", "a", "b", "c", "a"};
  CHECK(deduplicate(in) == std::vector<std::string>{"b", "a", "c"});
  CHECK(deduplicate({}).empty());
  auto once = deduplicate(in);
  CHECK(deduplicate(once) == once);
}

namespace {

std::vector<std::string> fixture_canonicals() {
  auto lines = molbench::test::read_lines(std::string(MOLBENCH_FIXTURE_DIR) +
                                          "/druglike_1k.smi");
  std::vector<std::string> out;
  for (const auto &line : lines) {
    out.push_back(mol(line.substr(0, line.find('\t'))).canonical());
  }
  return out;
}

}  // namespace

TEST_CASE("split partitions the dataset") {
  auto data = fixture_canonicals();
  SplitSpec spec;
  spec.seed = 7;
  auto splits = split(data, spec);
  CHECK(splits.train.size() + splits.test.size() +
            splits.scaffold_test.size() ==
        data.size());
  std::set<std::string> all;
  all.insert(splits.train.begin(), splits.train.end());
  all.insert(splits.test.begin(), splits.test.end());
  all.insert(splits.scaffold_test.begin(), splits.scaffold_test.end());
  CHECK(all.size() == data.size());
  CHECK(splits.train.size() > splits.test.size());
  CHECK_FALSE(splits.scaffold_test.empty());
}

TEST_CASE("scaffold holdout is disjoint from the rest") {
  auto data = fixture_canonicals();
  SplitSpec spec;
  spec.seed = 99;
  auto splits = split(data, spec);
  std::unordered_set<std::string> holdout_scaffolds;
  for (const auto &s : splits.scaffold_test) {
    auto sc = murcko_scaffold(mol(s));
    REQUIRE(sc.has_value());  // acyclic molecules are never held out
    holdout_scaffolds.insert(*sc);
  }
  for (const auto &s : splits.train) {
    auto sc = murcko_scaffold(mol(s));
    if (sc.has_value()) {
      CHECK(holdout_scaffolds.count(*sc) == 0);
    }
  }
  for (const auto &s : splits.test) {
    auto sc = murcko_scaffold(mol(s));
    if (sc.has_value()) {
      CHECK(holdout_scaffolds.count(*sc) == 0);
    }
  }
}

TEST_CASE("split is deterministic in the seed") {
  auto data = fixture_canonicals();
  SplitSpec spec;
  spec.seed = 1234;
  auto a = split(data, spec);
  auto b = split(data, spec);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  CHECK(a.scaffold_test == b.scaffold_test);
  spec.seed = 1235;
  auto c = split(data, spec);
  CHECK(a.train != c.train);  // different shuffle
}

TEST_CASE("split validates its spec") {
  CHECK_THROWS_AS(split({}, SplitSpec{}), std::invalid_argument);
  SplitSpec bad;
  bad.train_fraction = 0.9;
  bad.test_fraction = 0.2;
  CHECK_THROWS_AS(split(fixture_canonicals(), bad), std::invalid_argument);
}

TEST_CASE("seeded shuffle is a frozen permutation") {
  std::vector<int> idx = {0, 1, 2, 3, 4, 5, 6, 7};
  seeded_shuffle(idx, 42);
  std::vector<int> again = {0, 1, 2, 3, 4, 5, 6, 7};
  seeded_shuffle(again, 42);
  CHECK(idx == again);
  std::vector<int> sorted_copy = idx;
  std::sort(sorted_copy.begin(), sorted_copy.end());
  CHECK(sorted_copy == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
  std::vector<int> other = {0, 1, 2, 3, 4, 5, 6, 7};
  seeded_shuffle(other, 43);
  CHECK(idx != other);
}
