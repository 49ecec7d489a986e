//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include "molbench/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <queue>
#include <stdexcept>

#include "molbench/substructure.hpp"

namespace molbench {

namespace {
constexpr uint64_t kHashSeed = 0x9e3779b97f4a7c15ULL;
}

uint64_t mix64(uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t hash_combine(uint64_t seed, uint64_t value) {
  return mix64(seed ^ mix64(value));
}

int BitFingerprint::popcount() const {
  int n = 0;
  for (uint64_t w : words) {
    n += std::popcount(w);
  }
  return n;
}

namespace {

int fp_bond_code(const Bond &b) {
  return b.is_aromatic ? 4 : static_cast<int>(b.order);
}

uint64_t initial_invariant(const Molecule &mol, int atom) {
  const Atom &a = mol.atoms[atom];
  uint64_t h = kHashSeed;
  h = hash_combine(h, a.atomic_number);
  h = hash_combine(h, static_cast<uint64_t>(mol.degree(atom)));
  h = hash_combine(h, static_cast<uint64_t>(a.formal_charge + 16));
  h = hash_combine(h, static_cast<uint64_t>(a.total_h()));
  h = hash_combine(h, a.in_ring() ? 1 : 0);
  h = hash_combine(h, a.is_aromatic ? 1 : 0);
  return h;
}

// Iterated neighborhood invariants; layers[r][atom] identifies the atom's
// r-environment.
std::vector<std::vector<uint64_t>> environment_layers(const Molecule &mol,
                                                      int radius) {
  int n = mol.num_atoms();
  std::vector<std::vector<uint64_t>> layers;
  layers.emplace_back(n);
  for (int i = 0; i < n; ++i) {
    layers[0][i] = initial_invariant(mol, i);
  }
  for (int r = 1; r <= radius; ++r) {
    const auto &prev = layers.back();
    std::vector<uint64_t> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<uint64_t> nbr;
      for (int bi : mol.adjacency()[i]) {
        const Bond &b = mol.bonds[bi];
        nbr.push_back(hash_combine(fp_bond_code(b), prev[b.other(i)]));
      }
      std::sort(nbr.begin(), nbr.end());
      uint64_t h = hash_combine(kHashSeed, static_cast<uint64_t>(r));
      h = hash_combine(h, prev[i]);
      for (uint64_t x : nbr) {
        h = hash_combine(h, x);
      }
      next[i] = h;
    }
    layers.push_back(std::move(next));
  }
  return layers;
}

}  // namespace

std::vector<uint64_t> morgan_environments(const Molecule &mol, int radius) {
  auto layers = environment_layers(mol, radius);
  std::vector<uint64_t> ids;
  for (const auto &layer : layers) {
    ids.insert(ids.end(), layer.begin(), layer.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<uint64_t> atom_environment_ids(const Molecule &mol, int radius) {
  return environment_layers(mol, radius).back();
}

BitFingerprint morgan_fingerprint(const Molecule &mol, int radius,
                                  int width) {
  BitFingerprint fp;
  fp.kind = FingerprintKind::kMorgan;
  fp.width = width;
  fp.words.assign(width / 64, 0);
  for (uint64_t id : morgan_environments(mol, radius)) {
    fp.set_bit(id);
  }
  return fp;
}

std::vector<std::vector<int>> topological_distances(const Molecule &mol) {
  int n = mol.num_atoms();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (int s = 0; s < n; ++s) {
    std::queue<int> q;
    q.push(s);
    dist[s][s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int bi : mol.adjacency()[u]) {
        int v = mol.bonds[bi].other(u);
        if (dist[s][v] == -1) {
          dist[s][v] = dist[s][u] + 1;
          q.push(v);
        }
      }
    }
  }
  return dist;
}

namespace {

struct FeatureDef {
  PharmacophoreFeature type;
  const char *smarts;
};

// Approximations of the usual 2D pharmacophore typing rules; aromatic
// sites are taken from ring perception instead of a pattern.
const std::vector<std::pair<PharmacophoreFeature, Pattern>> &
feature_patterns() {
  static const auto *kPatterns = [] {
    const FeatureDef defs[] = {
        {PharmacophoreFeature::kDonor, "[#7,#8;H1,H2,H3]"},
        {PharmacophoreFeature::kAcceptor, "[#7,#8;!+1;!+2]"},
        {PharmacophoreFeature::kPositive, "[+1,+2]"},
        {PharmacophoreFeature::kPositive, "[NX3;!R;H1,H2]"},
        {PharmacophoreFeature::kNegative, "[-1,-2]"},
        {PharmacophoreFeature::kNegative, "[CX3](=[OX1])[OX2;H1]"},
        {PharmacophoreFeature::kHydrophobic, "[CX4]([#6])[#6]"},
        {PharmacophoreFeature::kHydrophobic, "[F,Cl,Br,I]"},
    };
    auto *out =
        new std::vector<std::pair<PharmacophoreFeature, Pattern>>();
    for (const auto &d : defs) {
      auto r = parse_pattern(d.smarts);
      if (!r.ok()) {
        throw std::logic_error("bad built-in pharmacophore pattern");
      }
      out->emplace_back(d.type, std::move(r.value()));
    }
    return out;
  }();
  return *kPatterns;
}

}  // namespace

std::vector<FeatureSite> pharmacophore_features(const Molecule &mol) {
  std::vector<FeatureSite> sites;
  std::vector<std::vector<bool>> seen(
      6, std::vector<bool>(mol.num_atoms(), false));
  for (const auto &[type, pattern] : feature_patterns()) {
    for (const auto &m : match(pattern, mol)) {
      int atom = m[0];  // pattern anchor atom carries the feature
      auto flag = seen[static_cast<int>(type)][atom];
      if (!flag) {
        seen[static_cast<int>(type)][atom] = true;
        sites.push_back({type, {atom}});
      }
    }
  }
  for (const auto &ring : mol.rings()) {
    bool aromatic = true;
    for (int a : ring) {
      aromatic = aromatic && mol.atoms[a].is_aromatic;
    }
    if (aromatic) {
      sites.push_back({PharmacophoreFeature::kAromatic, ring});
    }
  }
  return sites;
}

namespace {

// Documented distance bins: 1-2, 3-4, 5-6, 7-8, >=9. Distance 0 (two
// features on one atom) falls into the first bin.
int distance_bin(int d) {
  if (d <= 2) {
    return 0;
  }
  if (d <= 4) {
    return 1;
  }
  if (d <= 6) {
    return 2;
  }
  if (d <= 8) {
    return 3;
  }
  return 4;
}

}  // namespace

BitFingerprint pharmacophore_fingerprint(const Molecule &mol, int width) {
  BitFingerprint fp;
  fp.kind = FingerprintKind::kPharmacophore;
  fp.width = width;
  fp.words.assign(width / 64, 0);
  auto sites = pharmacophore_features(mol);
  if (sites.empty()) {
    return fp;
  }
  auto dist = topological_distances(mol);
  for (size_t i = 0; i < sites.size(); ++i) {
    for (size_t j = i + 1; j < sites.size(); ++j) {
      int best = -1;
      for (int a : sites[i].atoms) {
        for (int b : sites[j].atoms) {
          int d = dist[a][b];
          if (d >= 0 && (best < 0 || d < best)) {
            best = d;
          }
        }
      }
      if (best < 0) {
        continue;  // disconnected components
      }
      int ta = static_cast<int>(sites[i].type);
      int tb = static_cast<int>(sites[j].type);
      if (ta > tb) {
        std::swap(ta, tb);
      }
      uint64_t h = hash_combine(kHashSeed, 0x70686172ULL);
      h = hash_combine(h, static_cast<uint64_t>(ta));
      h = hash_combine(h, static_cast<uint64_t>(tb));
      h = hash_combine(h, static_cast<uint64_t>(distance_bin(best)));
      fp.set_bit(h);
    }
  }
  return fp;
}

double tanimoto(const BitFingerprint &a, const BitFingerprint &b) {
  if (a.width != b.width || a.kind != b.kind) {
    throw std::invalid_argument("fingerprint width/kind mismatch");
  }
  int inter = 0;
  int uni = 0;
  for (size_t i = 0; i < a.words.size(); ++i) {
    inter += std::popcount(a.words[i] & b.words[i]);
    uni += std::popcount(a.words[i] | b.words[i]);
  }
  if (uni == 0) {
    return 1.0;  // two feature-less molecules are maximally similar
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {
constexpr uint32_t kFingerprintMagic = 0x4D424650;  // "MBFP"
}

void save_fingerprints(const std::string &path,
                       const std::vector<BitFingerprint> &fps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write fingerprints: " + path);
  }
  uint32_t kind = fps.empty() ? 0 : static_cast<uint32_t>(fps[0].kind);
  uint32_t width = fps.empty() ? 0 : static_cast<uint32_t>(fps[0].width);
  uint64_t count = fps.size();
  out.write(reinterpret_cast<const char *>(&kFingerprintMagic), 4);
  out.write(reinterpret_cast<const char *>(&kind), 4);
  out.write(reinterpret_cast<const char *>(&width), 4);
  out.write(reinterpret_cast<const char *>(&count), 8);
  for (const auto &fp : fps) {
    if (static_cast<uint32_t>(fp.width) != width ||
        static_cast<uint32_t>(fp.kind) != kind) {
      throw std::runtime_error("mixed fingerprint kinds in one file");
    }
    out.write(reinterpret_cast<const char *>(fp.words.data()),
              static_cast<std::streamsize>(fp.words.size() * 8));
  }
  if (!out) {
    throw std::runtime_error("write failure: " + path);
  }
}

std::vector<BitFingerprint> load_fingerprints(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open fingerprints: " + path);
  }
  uint32_t magic = 0;
  uint32_t kind = 0;
  uint32_t width = 0;
  uint64_t count = 0;
  in.read(reinterpret_cast<char *>(&magic), 4);
  in.read(reinterpret_cast<char *>(&kind), 4);
  in.read(reinterpret_cast<char *>(&width), 4);
  in.read(reinterpret_cast<char *>(&count), 8);
  if (!in || magic != kFingerprintMagic) {
    throw std::runtime_error("bad fingerprint header: " + path);
  }
  std::vector<BitFingerprint> fps(count);
  for (auto &fp : fps) {
    fp.kind = static_cast<FingerprintKind>(kind);
    fp.width = static_cast<int>(width);
    fp.words.resize(width / 64);
    in.read(reinterpret_cast<char *>(fp.words.data()),
            static_cast<std::streamsize>(fp.words.size() * 8));
  }
  if (!in) {
    throw std::runtime_error("truncated fingerprints: " + path);
  }
  return fps;
}

}  // namespace molbench
