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

#include "corefpipe/empty_node_scorer.h"

#include <gtest/gtest.h>

#include "corefpipe/checkpoint.h"
#include "corefpipe/errors.h"
#include "corefpipe/synthetic.h"
#include "fixtures.h"
#include "test_util.h"

namespace corefpipe {
namespace {

using testing::FlatDocument;
using testing::NodeTarget;

double F1(const EnodeScores &s, int metric) { return s.scores[metric].f1; }

TEST(EmptyNodeScorerTest, IdenticalDocumentsScoreHundred) {
  std::vector<Document> docs =
      ParseConllu(ReadFile(testing::DataDir() / "empty_nodes.conllu"));
  for (const Document &d : GenerateSynthetic("xa_syn", 4, 5, "dev")) docs.push_back(d);
  EnodeScores s = ScoreEmptyNodes(docs, docs);
  EXPECT_GT(s.gold, 0);
  EXPECT_EQ(s.gold, s.predicted);
  for (int m = 0; m < kMetricCount; ++m) {
    if (s.present[m]) {
      EXPECT_DOUBLE_EQ(F1(s, m), 100) << EnodeMetricName(m);
    }
  }
  EXPECT_TRUE(s.present[kFormMetric]);
  EXPECT_TRUE(s.present[kXposMetric]);
}

TEST(EmptyNodeScorerTest, WrongRelationSameOrder) {
  Document base = FlatDocument("d", 4);
  Document gold = InsertEmptyNodes(base, {NodeTarget(2, 2, "nsubj")});
  Document pred = InsertEmptyNodes(base, {NodeTarget(2, 2, "obj")});
  EnodeScores s = ScoreEmptyNodes({gold}, {pred});
  EXPECT_DOUBLE_EQ(F1(s, kArc), 100);
  EXPECT_DOUBLE_EQ(F1(s, kDep), 0);
  EXPECT_DOUBLE_EQ(F1(s, kWo), 100);
  EXPECT_DOUBLE_EQ(F1(s, kDepWo), 0);
  EXPECT_DOUBLE_EQ(F1(s, kAll), 0);
  EXPECT_DOUBLE_EQ(F1(s, kFormMetric), 100);
}

TEST(EmptyNodeScorerTest, OneOfTwoRecalled) {
  Document base = FlatDocument("d", 5);
  Document gold =
      InsertEmptyNodes(base, {NodeTarget(2, 2, "nsubj"), NodeTarget(4, 4, "nsubj")});
  Document pred = InsertEmptyNodes(base, {NodeTarget(2, 2, "nsubj")});
  EnodeScores s = ScoreEmptyNodes({gold}, {pred});
  EXPECT_DOUBLE_EQ(s.scores[kArc].precision, 100);
  EXPECT_DOUBLE_EQ(s.scores[kArc].recall, 50);
  EXPECT_NEAR(F1(s, kArc), 66.67, 0.01);
}

TEST(EmptyNodeScorerTest, WordOrderMatters) {
  Document base = FlatDocument("d", 5);
  Document gold = InsertEmptyNodes(base, {NodeTarget(2, 3, "nsubj")});
  Document pred = InsertEmptyNodes(base, {NodeTarget(4, 3, "nsubj")});
  EnodeScores s = ScoreEmptyNodes({gold}, {pred});
  EXPECT_DOUBLE_EQ(F1(s, kArc), 100);
  EXPECT_DOUBLE_EQ(F1(s, kDep), 100);
  EXPECT_DOUBLE_EQ(F1(s, kWo), 0);
  EXPECT_DOUBLE_EQ(F1(s, kAll), 0);
}

TEST(EmptyNodeScorerTest, NodesOfOneHeadPairByWordOrderFirst) {
  Document base = FlatDocument("d", 5);
  Document gold = InsertEmptyNodes(
      base, {NodeTarget(1, 3, "nsubj"), NodeTarget(4, 3, "obj", "#Gen")});
  Document pred = InsertEmptyNodes(
      base, {NodeTarget(1, 3, "nsubj"), NodeTarget(4, 3, "obj", "#Gen")});
  // Swapping the prediction order must not change the pairing.
  EnodeScores s = ScoreEmptyNodes({gold}, {pred});
  EXPECT_DOUBLE_EQ(F1(s, kAll), 100);
  Document reversed = InsertEmptyNodes(
      base, {NodeTarget(4, 3, "obj", "#Gen"), NodeTarget(1, 3, "nsubj")});
  EXPECT_DOUBLE_EQ(F1(ScoreEmptyNodes({gold}, {reversed}), kAll), 100);
}

TEST(EmptyNodeScorerTest, AbsentColumnsAreMarked) {
  Document base = FlatDocument("d", 3);
  Document gold = InsertEmptyNodes(base, {NodeTarget(1, 1, "nsubj")});
  EnodeScores s = ScoreEmptyNodes({gold}, {gold});
  EXPECT_FALSE(s.present[kXposMetric]);
  EXPECT_FALSE(s.present[kFeatsMetric]);
  EXPECT_TRUE(s.present[kUposMetric]);
  std::string table = EnodeTable(s);
  EXPECT_NE(table.find("ARC"), std::string::npos);
  EXPECT_NE(table.find("-"), std::string::npos);
}

TEST(EmptyNodeScorerTest, AllIsBoundedByEveryColumn) {
  std::mt19937_64 rng(31);
  auto gold = GenerateSynthetic("xa_syn", 3, 12, "dev");
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Document> pred;
    for (const Document &d : gold) pred.push_back(testing::PerturbEmptyNodes(d, rng));
    EnodeScores s = ScoreEmptyNodes(gold, pred);
    for (int m = 0; m < kAll; ++m) {
      if (s.present[m]) {
        EXPECT_LE(F1(s, kAll), F1(s, m) + 1e-12) << EnodeMetricName(m);
      }
    }
    EXPECT_LE(F1(s, kDepWo), std::min(F1(s, kDep), F1(s, kWo)) + 1e-12);
  }
}

TEST(EmptyNodeScorerTest, SurfaceMismatchIsAnError) {
  Document a = FlatDocument("d", 3);
  Document b = FlatDocument("d", 4);
  EXPECT_THROW(ScoreEmptyNodes({a}, {b}), DataError);
  EXPECT_THROW(ScoreEmptyNodes({a}, {FlatDocument("e", 3)}), DataError);
}

TEST(EmptyNodeScorerTest, NoNodesAnywhere) {
  Document a = FlatDocument("d", 3);
  EnodeScores s = ScoreEmptyNodes({a}, {a});
  EXPECT_EQ(s.gold, 0);
  EXPECT_EQ(s.predicted, 0);
  EXPECT_DOUBLE_EQ(F1(s, kArc), 0);
}

}  // namespace
}  // namespace corefpipe
