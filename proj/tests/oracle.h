// Copyright 2026 The corefpipe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Brute-force coreference metrics used as test oracles. They work directly
// on small clusterings: MUC by counting connected components of response
// links inside every key entity, B-cubed from per-mention overlaps, and
// CEAF-e by trying every injective entity alignment.

#ifndef COREFPIPE_TESTS_ORACLE_H_
#define COREFPIPE_TESTS_ORACLE_H_

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "corefpipe/scorer.h"

namespace corefpipe::testing {

inline Prf OraclePrf(double p_num, double p_den, double r_num, double r_den) {
  Prf out;
  out.precision = p_den > 0 ? 100 * p_num / p_den : 0;
  out.recall = r_den > 0 ? 100 * r_num / r_den : 0;
  const double sum = out.precision + out.recall;
  out.f1 = sum > 0 ? 2 * out.precision * out.recall / sum : 0;
  return out;
}

// Number of groups `entity` falls into when mentions linked in `other` are
// joined, computed by flood fill over mention pairs.
inline int Components(const std::vector<int> &entity, const Clustering &other) {
  std::map<int, int> cluster_of;
  for (size_t c = 0; c < other.size(); ++c) {
    for (int m : other[c]) cluster_of[m] = c;
  }
  std::vector<bool> seen(entity.size(), false);
  int components = 0;
  for (size_t i = 0; i < entity.size(); ++i) {
    if (seen[i]) continue;
    ++components;
    std::vector<size_t> stack = {i};
    seen[i] = true;
    while (!stack.empty()) {
      size_t a = stack.back();
      stack.pop_back();
      for (size_t b = 0; b < entity.size(); ++b) {
        if (seen[b]) continue;
        auto ca = cluster_of.find(entity[a]), cb = cluster_of.find(entity[b]);
        if (ca != cluster_of.end() && cb != cluster_of.end() && ca->second == cb->second) {
          seen[b] = true;
          stack.push_back(b);
        }
      }
    }
  }
  return components;
}

inline Prf OracleMuc(const Clustering &key, const Clustering &response) {
  double r_num = 0, r_den = 0, p_num = 0, p_den = 0;
  for (const auto &k : key) {
    r_num += k.size() - Components(k, response);
    r_den += k.size() - 1;
  }
  for (const auto &r : response) {
    p_num += r.size() - Components(r, key);
    p_den += r.size() - 1;
  }
  return OraclePrf(p_num, p_den, r_num, r_den);
}

inline int Overlap(const std::vector<int> &a, const std::vector<int> &b) {
  int n = 0;
  for (int x : a) n += std::count(b.begin(), b.end(), x);
  return n;
}

inline Prf OracleBcub(const Clustering &key, const Clustering &response) {
  double r_num = 0, r_den = 0, p_num = 0, p_den = 0;
  for (const auto &k : key) {
    for (int m : k) {
      r_den += 1;
      for (const auto &r : response) {
        if (std::count(r.begin(), r.end(), m)) r_num += double(Overlap(k, r)) / k.size();
      }
    }
  }
  for (const auto &r : response) {
    for (int m : r) {
      p_den += 1;
      for (const auto &k : key) {
        if (std::count(k.begin(), k.end(), m)) p_num += double(Overlap(k, r)) / r.size();
      }
    }
  }
  return OraclePrf(p_num, p_den, r_num, r_den);
}

inline Prf OracleCeafe(const Clustering &key, const Clustering &response) {
  auto phi4 = [](const std::vector<int> &k, const std::vector<int> &r) {
    return 2.0 * Overlap(k, r) / (k.size() + r.size());
  };
  // Permute the longer side's indices; the first min(|K|, |R|) positions
  // are paired.
  const bool key_longer = key.size() >= response.size();
  const size_t big = std::max(key.size(), response.size());
  const size_t small = std::min(key.size(), response.size());
  std::vector<int> order(big);
  std::iota(order.begin(), order.end(), 0);
  double best = 0;
  do {
    double sum = 0;
    for (size_t i = 0; i < small; ++i) {
      sum += key_longer ? phi4(key[order[i]], response[i]) : phi4(key[i], response[order[i]]);
    }
    best = std::max(best, sum);
  } while (std::next_permutation(order.begin(), order.end()));
  return OraclePrf(best, response.size(), best, key.size());
}

inline std::array<Prf, 3> BruteForceMetrics(const Clustering &key,
                                            const Clustering &response) {
  return {OracleMuc(key, response), OracleBcub(key, response),
          OracleCeafe(key, response)};
}

// A random key over mentions 0..n-1 with up to `max_mentions` mentions and
// a response that keeps, drops and adds mentions and regroups them.
inline std::pair<Clustering, Clustering> RandomClusterings(std::mt19937_64 &rng,
                                                           int max_mentions) {
  std::uniform_int_distribution<int> count(1, max_mentions);
  auto random_partition = [&](const std::vector<int> &mentions) {
    std::map<int, std::vector<int>> groups;
    std::uniform_int_distribution<int> group(0, std::max<int>(0, mentions.size() - 1));
    for (int m : mentions) groups[group(rng)].push_back(m);
    Clustering out;
    for (auto &[g, members] : groups) out.push_back(members);
    return out;
  };
  std::vector<int> key_mentions(count(rng));
  std::iota(key_mentions.begin(), key_mentions.end(), 0);
  std::vector<int> response_mentions;
  std::bernoulli_distribution keep(0.75);
  for (int m : key_mentions) {
    if (keep(rng)) response_mentions.push_back(m);
  }
  const int extra = std::uniform_int_distribution<int>(0, 2)(rng);
  for (int i = 0; i < extra && static_cast<int>(response_mentions.size()) < max_mentions; ++i) {
    response_mentions.push_back(100 + i);
  }
  return {random_partition(key_mentions), random_partition(response_mentions)};
}

}  // namespace corefpipe::testing

#endif  // COREFPIPE_TESTS_ORACLE_H_
