//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cstdio>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "molbench/fingerprint.hpp"
#include "test_util.hpp"

using namespace molbench;
using molbench::test::mol;

namespace {

// reference Tanimoto over explicit bit vectors
double oracle_tanimoto(const BitFingerprint &a, const BitFingerprint &b) {
  int both = 0;
  int any = 0;
  for (int i = 0; i < a.width; ++i) {
    bool x = a.test_bit(i);
    bool y = b.test_bit(i);
    both += x && y;
    any += x || y;
  }
  return any == 0 ? 1.0 : static_cast<double>(both) / any;
}

}  // namespace

TEST_CASE("fingerprints are deterministic and order invariant") {
  auto m = mol("CC(=O)Oc1ccccc1C(=O)O");
  auto a = morgan_fingerprint(m);
  auto b = morgan_fingerprint(m);
  CHECK(a.words == b.words);
  molbench::test::Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    auto p = molbench::test::permute_atoms(m, rng);
    CHECK(morgan_fingerprint(p).words == a.words);
    CHECK(pharmacophore_fingerprint(p).words ==
          pharmacophore_fingerprint(m).words);
  }
}

TEST_CASE("unfolded environments are width independent") {
  auto m = mol("CCO");
  auto envs = morgan_environments(m, 2);
  CHECK_FALSE(envs.empty());
  // radius 0 layer: one id per distinct initial atom invariant
  auto r0 = atom_environment_ids(m, 0);
  CHECK(r0.size() == 3);
  CHECK(r0[0] != r0[1]);  // CH3 vs CH2
  // identical atoms share ids at every radius
  auto butane = mol("CCCC");
  auto ids = atom_environment_ids(butane, 2);
  CHECK(ids[0] == ids[3]);
  CHECK(ids[1] == ids[2]);
  CHECK(ids[0] != ids[1]);
}

TEST_CASE("larger radius separates more contexts") {
  auto a = mol("CCCCO");
  auto v1 = morgan_environments(a, 1);
  auto v2 = morgan_environments(a, 2);
  CHECK(v2.size() >= v1.size());
}

TEST_CASE("tanimoto conventions") {
  BitFingerprint a{FingerprintKind::kMorgan, 64, {0}};
  BitFingerprint b{FingerprintKind::kMorgan, 64, {0}};
  CHECK(tanimoto(a, b) == 1.0);  // both empty
  b.words[0] = 0b1010;
  CHECK(tanimoto(a, b) == 0.0);  // one empty
  a.words[0] = 0b0110;
  CHECK(tanimoto(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(tanimoto(a, b) == tanimoto(b, a));
  CHECK(tanimoto(a, a) == 1.0);

  BitFingerprint wrong_width{FingerprintKind::kMorgan, 128, {0, 0}};
  CHECK_THROWS_AS(tanimoto(a, wrong_width), std::invalid_argument);
  BitFingerprint wrong_kind{FingerprintKind::kPharmacophore, 64, {0}};
  CHECK_THROWS_AS(tanimoto(a, wrong_kind), std::invalid_argument);
}

TEST_CASE("tanimoto agrees with the bitwise oracle") {
  molbench::test::Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    BitFingerprint a{FingerprintKind::kMorgan, 128, {0, 0}};
    BitFingerprint b{FingerprintKind::kMorgan, 128, {0, 0}};
    int na = static_cast<int>(rng.below(40));
    int nb = static_cast<int>(rng.below(40));
    for (int i = 0; i < na; ++i) {
      a.set_bit(rng.below(128));
    }
    for (int i = 0; i < nb; ++i) {
      b.set_bit(rng.below(128));
    }
    CHECK(tanimoto(a, b) == doctest::Approx(oracle_tanimoto(a, b)));
  }
}

TEST_CASE("similar molecules score higher than dissimilar ones") {
  auto ethanol = morgan_fingerprint(mol("CCO"));
  auto propanol = morgan_fingerprint(mol("CCCO"));
  auto benzene = morgan_fingerprint(mol("c1ccccc1"));
  CHECK(tanimoto(ethanol, propanol) > tanimoto(ethanol, benzene));
}

TEST_CASE("pharmacophore features") {
  auto feats = pharmacophore_features(mol("OCC(N)C(=O)O"));
  bool donor = false;
  bool acceptor = false;
  for (const auto &f : feats) {
    donor |= f.type == PharmacophoreFeature::kDonor;
    acceptor |= f.type == PharmacophoreFeature::kAcceptor;
  }
  CHECK(donor);
  CHECK(acceptor);

  bool aromatic = false;
  for (const auto &f : pharmacophore_features(mol("c1ccccc1"))) {
    if (f.type == PharmacophoreFeature::kAromatic) {
      aromatic = true;
      CHECK(f.atoms.size() == 6);
    }
  }
  CHECK(aromatic);

  bool positive = false;
  for (const auto &f : pharmacophore_features(mol("C[N+](C)(C)C"))) {
    positive |= f.type == PharmacophoreFeature::kPositive;
  }
  CHECK(positive);

  bool negative = false;
  for (const auto &f : pharmacophore_features(mol("CC(=O)[O-]"))) {
    negative |= f.type == PharmacophoreFeature::kNegative;
  }
  CHECK(negative);

  CHECK(pharmacophore_fingerprint(mol("CC(N)=O")).popcount() > 0);
}

TEST_CASE("topological distances") {
  auto d = topological_distances(mol("CCO"));
  CHECK(d[0][0] == 0);
  CHECK(d[0][1] == 1);
  CHECK(d[0][2] == 2);
  CHECK(d[2][0] == 2);
  auto ring = topological_distances(mol("C1CCCCC1"));
  CHECK(ring[0][3] == 3);
  CHECK(ring[0][5] == 1);
}

TEST_CASE("fingerprint file round trip") {
  std::vector<BitFingerprint> fps;
  for (const char *s : {"CCO", "c1ccccc1", "CC(=O)O"}) {
    fps.push_back(morgan_fingerprint(mol(s)));
  }
  std::string path = "fp_roundtrip.bin";
  save_fingerprints(path, fps);
  auto back = load_fingerprints(path);
  std::remove(path.c_str());
  REQUIRE(back.size() == fps.size());
  for (size_t i = 0; i < fps.size(); ++i) {
    CHECK(back[i].kind == fps[i].kind);
    CHECK(back[i].width == fps[i].width);
    CHECK(back[i].words == fps[i].words);
  }
  CHECK_THROWS(load_fingerprints("/nonexistent/fps.bin"));
}

TEST_CASE("hashing utilities are stable") {
  CHECK(mix64(0) == mix64(0));
  CHECK(mix64(1) != mix64(2));
  CHECK(hash_combine(1, 2) != hash_combine(2, 1));
}
