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

// Intrinsic evaluation of predicted empty nodes.
//
// Gold and predicted empty nodes of a sentence are matched when they share
// the dependency head. A matched prediction counts as correct for a metric
// when the compared fields agree: ARC needs only the head, DEP the
// relation, WO the word order position, DEP_WO both, FORM..FEATS the
// column, and ALL every field of every present column.

#ifndef COREFPIPE_EMPTY_NODE_SCORER_H_
#define COREFPIPE_EMPTY_NODE_SCORER_H_

#include <array>
#include <string>
#include <vector>

#include "corefpipe/conllu.h"
#include "corefpipe/scorer.h"

namespace corefpipe {

enum EnodeMetric {
  kArc, kDep, kWo, kDepWo, kFormMetric, kLemmaMetric, kUposMetric,
  kXposMetric, kFeatsMetric, kAll, kMetricCount
};

const char *EnodeMetricName(int metric);

struct EnodeScores {
  int gold = 0;
  int predicted = 0;
  std::array<int, kMetricCount> correct{};
  // False for a morphology column whose gold values are all "_".
  std::array<bool, kMetricCount> present{};
  std::array<Prf, kMetricCount> scores;
};

// Throws DataError when documents or surface tokens differ.
EnodeScores ScoreEmptyNodes(const std::vector<Document> &gold,
                            const std::vector<Document> &pred);

// Header of metric names and one row of F1 values, "-" for absent columns.
std::string EnodeTable(const EnodeScores &scores);

}  // namespace corefpipe

#endif  // COREFPIPE_EMPTY_NODE_SCORER_H_
