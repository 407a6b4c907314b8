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

#include "corefpipe/clusters.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "corefpipe/errors.h"

namespace corefpipe {

std::vector<int> ArgmaxAntecedents(const nn::Matrix &scores) {
  if (scores.rows() != scores.cols()) {
    throw ModelError("link score matrix must be square");
  }
  std::vector<int> best(scores.rows());
  for (int i = 0; i < scores.rows(); ++i) {
    int arg = 0;
    for (int j = 1; j <= i; ++j) {
      if (scores(i, j) > scores(i, arg)) arg = j;
    }
    best[i] = arg;
  }
  return best;
}

std::vector<int> DecodeClusters(std::span<const int> antecedents) {
  const int n = antecedents.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int i = 0; i < n; ++i) {
    int a = antecedents[i];
    if (a < 0 || a > i) {
      throw ModelError("antecedent of mention " + std::to_string(i) +
                       " is not an earlier mention");
    }
    int ra = find(a), ri = find(i);
    if (ra != ri) parent[std::max(ra, ri)] = std::min(ra, ri);
  }
  std::vector<int> cluster(n);
  std::map<int, int> numbering;
  for (int i = 0; i < n; ++i) {
    int root = find(i);
    auto [it, inserted] = numbering.emplace(root, numbering.size());
    cluster[i] = it->second;
  }
  return cluster;
}

std::vector<Entity> BuildEntities(const std::vector<Mention> &mentions,
                                  std::span<const int> clusters) {
  if (mentions.size() != clusters.size()) {
    throw ModelError("cluster assignment does not match mention count");
  }
  int count = 0;
  for (int c : clusters) count = std::max(count, c + 1);
  std::vector<Entity> entities(count);
  for (size_t i = 0; i < mentions.size(); ++i) {
    entities[clusters[i]].mentions.push_back(mentions[i]);
  }
  std::erase_if(entities, [](const Entity &e) { return e.mentions.empty(); });
  Document holder;
  holder.entities = std::move(entities);
  Canonicalize(holder);
  for (size_t i = 0; i < holder.entities.size(); ++i) {
    Entity &entity = holder.entities[i];
    entity.id = "e" + std::to_string(i + 1);
    for (Mention &m : entity.mentions) m.entity_id = entity.id;
  }
  return holder.entities;
}

std::vector<Entity> DecodeEntities(const nn::Matrix &link_scores,
                                   const std::vector<Mention> &mentions) {
  std::vector<int> antecedents = ArgmaxAntecedents(link_scores);
  return BuildEntities(mentions, DecodeClusters(antecedents));
}

}  // namespace corefpipe
