//
// Project MolBench - Copyright 2026 MolBench Developers
// SPDX-License-Identifier: Apache-2.0
//

#include "molbench/ngram.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "molbench/fingerprint.hpp"

namespace molbench {

std::vector<std::string> tokenize_smiles(const std::string &s) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '[') {
      size_t close = s.find(']', i);
      if (close == std::string::npos) {
        tokens.push_back(s.substr(i));
        break;
      }
      tokens.push_back(s.substr(i, close - i + 1));
      i = close + 1;
    } else if (c == '%' && i + 3 <= s.size()) {
      tokens.push_back(s.substr(i, 3));
      i += 3;
    } else if (i + 1 < s.size() && ((c == 'C' && s[i + 1] == 'l') ||
                                    (c == 'B' && s[i + 1] == 'r'))) {
      tokens.push_back(s.substr(i, 2));
      i += 2;
    } else {
      tokens.push_back(std::string(1, c));
      ++i;
    }
  }
  return tokens;
}

NgramModel train_ngram(const std::vector<std::string> &corpus, int order) {
  if (corpus.empty()) {
    throw std::invalid_argument("empty training corpus");
  }
  if (order < 1 || order > 8) {
    throw std::invalid_argument("order must be in [1, 8]");
  }
  NgramModel model;
  model.order = order;
  model.alphabet = {"<end>", "<begin>"};
  std::unordered_map<std::string, int> ids{{"<end>", NgramModel::kEnd},
                                           {"<begin>", NgramModel::kBegin}};
  std::map<std::vector<int>, std::unordered_map<int, int64_t>> counts;
  for (const auto &s : corpus) {
    std::vector<int> seq(order - 1, NgramModel::kBegin);
    for (const auto &tok : tokenize_smiles(s)) {
      auto [it, inserted] =
          ids.emplace(tok, static_cast<int>(model.alphabet.size()));
      if (inserted) {
        model.alphabet.push_back(tok);
      }
      seq.push_back(it->second);
    }
    seq.push_back(NgramModel::kEnd);
    for (size_t i = order - 1; i < seq.size(); ++i) {
      std::vector<int> ctx(seq.begin() + i - (order - 1), seq.begin() + i);
      ++counts[ctx][seq[i]];
    }
  }
  for (auto &[ctx, m] : counts) {
    auto &entries = model.table[ctx];
    entries.assign(m.begin(), m.end());
    std::sort(entries.begin(), entries.end());
    // reduce each distribution by its gcd so a duplicated corpus trains
    // the exact same model
    int64_t g = 0;
    for (const auto &[tok, c] : entries) {
      g = std::gcd(g, c);
    }
    if (g > 1) {
      for (auto &[tok, c] : entries) {
        c /= g;
      }
    }
  }
  return model;
}

std::vector<std::string> sample_ngram(const NgramModel &model, int count,
                                      int max_len, uint64_t seed) {
  std::vector<std::string> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    uint64_t state = mix64(seed ^ static_cast<uint64_t>(i));
    auto next = [&state] {
      state = mix64(state);
      return state;
    };
    std::vector<int> ctx(model.order - 1, NgramModel::kBegin);
    std::string s;
    for (int len = 0; len < max_len; ++len) {
      auto it = model.table.find(ctx);
      if (it == model.table.end()) {
        break;  // unreachable for MLE-trained models
      }
      int64_t total = 0;
      for (const auto &[tok, n] : it->second) {
        total += n;
      }
      int64_t r = static_cast<int64_t>(next() % static_cast<uint64_t>(total));
      int tok = NgramModel::kEnd;
      for (const auto &[t, n] : it->second) {
        if (r < n) {
          tok = t;
          break;
        }
        r -= n;
      }
      if (tok == NgramModel::kEnd) {
        break;
      }
      s += model.alphabet[tok];
      if (model.order > 1) {
        ctx.erase(ctx.begin());
        ctx.push_back(tok);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {
constexpr uint32_t kNgramMagic = 0x4D424E47;  // "MBNG"
constexpr uint32_t kNgramVersion = 1;

void write_u32(std::ostream &out, uint32_t v) {
  out.write(reinterpret_cast<const char *>(&v), 4);
}
void write_u64(std::ostream &out, uint64_t v) {
  out.write(reinterpret_cast<const char *>(&v), 8);
}
uint32_t read_u32(std::istream &in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char *>(&v), 4);
  return v;
}
uint64_t read_u64(std::istream &in) {
  uint64_t v = 0;
  in.read(reinterpret_cast<char *>(&v), 8);
  return v;
}
}  // namespace

void save_ngram(const std::string &path, const NgramModel &model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write model: " + path);
  }
  write_u32(out, kNgramMagic);
  write_u32(out, kNgramVersion);
  write_u32(out, static_cast<uint32_t>(model.order));
  write_u32(out, static_cast<uint32_t>(model.alphabet.size()));
  for (const auto &tok : model.alphabet) {
    write_u32(out, static_cast<uint32_t>(tok.size()));
    out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
  }
  write_u64(out, model.table.size());
  for (const auto &[ctx, entries] : model.table) {
    for (int id : ctx) {
      write_u32(out, static_cast<uint32_t>(id));
    }
    write_u32(out, static_cast<uint32_t>(entries.size()));
    for (const auto &[tok, n] : entries) {
      write_u32(out, static_cast<uint32_t>(tok));
      write_u64(out, static_cast<uint64_t>(n));
    }
  }
  if (!out) {
    throw std::runtime_error("write failure: " + path);
  }
}

NgramModel load_ngram(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open model: " + path);
  }
  if (read_u32(in) != kNgramMagic || read_u32(in) != kNgramVersion) {
    throw std::runtime_error("bad model header: " + path);
  }
  NgramModel model;
  model.order = static_cast<int>(read_u32(in));
  uint32_t alphabet_size = read_u32(in);
  model.alphabet.resize(alphabet_size);
  for (auto &tok : model.alphabet) {
    uint32_t len = read_u32(in);
    tok.resize(len);
    in.read(tok.data(), len);
  }
  uint64_t contexts = read_u64(in);
  for (uint64_t c = 0; c < contexts; ++c) {
    std::vector<int> ctx(model.order - 1);
    for (auto &id : ctx) {
      id = static_cast<int>(read_u32(in));
    }
    uint32_t entries = read_u32(in);
    auto &vec = model.table[ctx];
    vec.resize(entries);
    for (auto &[tok, n] : vec) {
      tok = static_cast<int>(read_u32(in));
      n = static_cast<int64_t>(read_u64(in));
    }
  }
  if (!in) {
    throw std::runtime_error("truncated model: " + path);
  }
  return model;
}

}  // namespace molbench
