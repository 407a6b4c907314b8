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

#ifndef COREFPIPE_CLUSTERS_H_
#define COREFPIPE_CLUSTERS_H_

#include <span>
#include <vector>

#include "corefpipe/conllu.h"
#include "corefpipe/nn.h"

namespace corefpipe {

// Row-wise argmax over columns 0..row of a square score matrix. Ties go to
// the lowest column. Only the order of scores within a row matters.
std::vector<int> ArgmaxAntecedents(const nn::Matrix &scores);

// Union-find over antecedent links, antecedents[i] in [0, i], where
// antecedents[i] == i starts a new entity. Returns the entity index of every
// mention, entities numbered in order of their first mention.
std::vector<int> DecodeClusters(std::span<const int> antecedents);

// Groups mentions (given in link order) into entities named e1, e2, ... in
// document order of their first mention. Singletons are kept.
std::vector<Entity> BuildEntities(const std::vector<Mention> &mentions,
                                  std::span<const int> clusters);

// ArgmaxAntecedents, DecodeClusters and BuildEntities in one step.
std::vector<Entity> DecodeEntities(const nn::Matrix &link_scores,
                                   const std::vector<Mention> &mentions);

}  // namespace corefpipe

#endif  // COREFPIPE_CLUSTERS_H_
