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

#include "corefpipe/ensemble.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "corefpipe/errors.h"
#include "corefpipe/pipeline.h"
#include "corefpipe/synthetic.h"
#include "corefpipe/training.h"
#include "models.h"

namespace corefpipe {
namespace {

using nn::Matrix;

TEST(AverageProbabilitiesTest, SingleMemberIsReturnedUnchanged) {
  std::mt19937_64 rng(1);
  const Matrix p = nn::SoftmaxRows(nn::Normal(5, 7, 3.0, rng));
  const std::vector<Matrix> members = {p};
  EXPECT_EQ(AverageProbabilities(members), p);
}

TEST(AverageProbabilitiesTest, IdenticalMembersAreReturnedUnchanged) {
  std::mt19937_64 rng(2);
  for (int k = 2; k <= 7; ++k) {
    const Matrix p = nn::SoftmaxRows(nn::Normal(4, 9, 3.0, rng));
    const std::vector<Matrix> members(k, p);
    EXPECT_EQ(AverageProbabilities(members), p) << k;
  }
}

TEST(AverageProbabilitiesTest, MemberOrderDoesNotMatter) {
  std::mt19937_64 rng(3);
  std::vector<Matrix> members;
  for (int i = 0; i < 5; ++i) members.push_back(nn::SoftmaxRows(nn::Normal(3, 6, 2.0, rng)));
  const Matrix expected = AverageProbabilities(members);
  Matrix mean = Matrix::Zero(3, 6);
  for (const Matrix &m : members) mean += m / 5.0;
  EXPECT_TRUE(expected.isApprox(mean, 1e-14));
  std::vector<int> order(5);
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Matrix> permuted;
    for (int i : order) permuted.push_back(members[i]);
    EXPECT_EQ(AverageProbabilities(permuted), expected);
  }
}

TEST(AverageProbabilitiesTest, ConfidentMemberWins) {
  Matrix a(1, 2), b(1, 2);
  a << 0.9, 0.1;
  b << 0.4, 0.6;
  const Matrix avg = AverageProbabilities(std::vector<Matrix>{a, b});
  EXPECT_NEAR(avg(0, 0), 0.65, 1e-15);
  EXPECT_NEAR(avg(0, 1), 0.35, 1e-15);
}

TEST(AverageProbabilitiesTest, RejectsEmptyAndMismatchedInputs) {
  EXPECT_THROW(AverageProbabilities(std::vector<Matrix>{}), ModelError);
  EXPECT_THROW(AverageProbabilities(std::vector<Matrix>{Matrix::Zero(2, 3), Matrix::Zero(3, 2)}),
               ModelError);
}

TEST(CheckCompatibleTest, RequiresSharedLabelsAndTokenizer) {
  using testing::SmallCorefConfig;
  CorefModel a(SmallCorefConfig(Variant::kTwoStage), 1);
  CorefModel b(SmallCorefConfig(Variant::kTwoStage), 2);
  CorefModel one(SmallCorefConfig(Variant::kOneStage), 3);
  CorefModelConfig other_tokens = SmallCorefConfig(Variant::kTwoStage);
  other_tokens.tokenizer = "hash:3:4096";
  CorefModel c(other_tokens, 4);
  CorefModelConfig other_cap = SmallCorefConfig(Variant::kTwoStage);
  other_cap.tag_cap = 3;
  CorefModel d(other_cap, 5);
  const CorefModel *same[] = {&a, &b};
  EXPECT_NO_THROW(CheckCompatible(same));
  for (const CorefModel *odd : {&one, &c, &d}) {
    const CorefModel *models[] = {&a, odd};
    EXPECT_THROW(CheckCompatible(models), ModelError);
  }
  EXPECT_THROW(CheckCompatible(std::span<const CorefModel *const>()), ModelError);
}

// Members trained on one document with different seeds, and a weight copy
// of the first.
class EnsemblePredictTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    doc_ = new Document(GenerateSynthetic("xb_syn", 1, 12).front());
    for (uint64_t seed : {1, 2, 3}) {
      TrainConfig recipe = testing::MemorizeRecipe(120, 8);
      recipe.seed = seed;
      members_.push_back(TrainCorefModel(recipe, {*doc_}).release());
    }
    copy_ = new CorefModel(members_[0]->config(), 77);
    copy_->params().CopyValuesFrom(members_[0]->params());
  }
  static void TearDownTestSuite() {
    for (CorefModel *m : members_) delete m;
    members_.clear();
    delete copy_;
    delete doc_;
  }

  static std::vector<Segment> Segments() {
    return BuildSegments(*doc_, members_[0]->tokenizer(), 128, 0);
  }

  static void ExpectSame(const SegmentPrediction &a, const SegmentPrediction &b) {
    EXPECT_EQ(a.tag_probs, b.tag_probs);
    EXPECT_EQ(a.link_probs, b.link_probs);
    EXPECT_EQ(a.antecedents, b.antecedents);
    ASSERT_EQ(a.mentions.size(), b.mentions.size());
    for (size_t i = 0; i < a.mentions.size(); ++i) {
      EXPECT_EQ(a.mentions[i].start, b.mentions[i].start);
      EXPECT_EQ(a.mentions[i].end, b.mentions[i].end);
    }
  }

  static Document *doc_;
  static std::vector<CorefModel *> members_;
  static CorefModel *copy_;
};

Document *EnsemblePredictTest::doc_ = nullptr;
std::vector<CorefModel *> EnsemblePredictTest::members_;
CorefModel *EnsemblePredictTest::copy_ = nullptr;

TEST_F(EnsemblePredictTest, OneMemberReproducesTheModel) {
  const CorefModel &model = *members_[0];
  int mentions = 0;
  for (const Segment &segment : Segments()) {
    const CorefModel *models[] = {&model};
    const SegmentPrediction p = EnsemblePredict(models, segment);
    const WindowPositions window(segment);
    std::vector<int> word_subwords;
    for (int pos : segment.CurrentWords()) word_subwords.push_back(*window.ToSubword(pos));
    const SegmentOutputs out = model.Run(segment, word_subwords);
    EXPECT_EQ(p.tag_probs, out.tag_probs);
    std::vector<MentionSource> sources;
    for (const LinkMention &m : p.mentions) sources.push_back(*SourceIn(m, window));
    if (sources.empty()) continue;
    mentions += sources.size();
    Matrix reps = model.Represent(out, sources);
    EXPECT_EQ(p.link_probs, model.LinkScores(reps));
  }
  EXPECT_GT(mentions, 0);
}

TEST_F(EnsemblePredictTest, IdenticalMembersReproduceOneMember) {
  for (const Segment &segment : Segments()) {
    const CorefModel *alone[] = {members_[0]};
    const CorefModel *twins[] = {members_[0], copy_, members_[0]};
    ExpectSame(EnsemblePredict(twins, segment), EnsemblePredict(alone, segment));
  }
}

TEST_F(EnsemblePredictTest, MemberOrderDoesNotMatter) {
  std::vector<const CorefModel *> order(members_.begin(), members_.end());
  std::sort(order.begin(), order.end());
  for (const Segment &segment : Segments()) {
    const SegmentPrediction expected = EnsemblePredict(order, segment);
    std::vector<const CorefModel *> permuted = order;
    while (std::next_permutation(permuted.begin(), permuted.end())) {
      ExpectSame(EnsemblePredict(permuted, segment), expected);
    }
  }
}

TEST_F(EnsemblePredictTest, DocumentPredictionsFollowTheSameIdentities) {
  Document input = *doc_;
  input.entities.clear();
  const DecodeOptions options;
  const CorefModel *alone[] = {members_[0]};
  const CorefModel *twins[] = {copy_, members_[0]};
  const CorefModel *forward[] = {members_[0], members_[1], members_[2]};
  const CorefModel *backward[] = {members_[2], members_[1], members_[0]};
  EXPECT_EQ(PredictCoreference(twins, input, options),
            PredictCoreference(alone, input, options));
  EXPECT_EQ(PredictCoreference(forward, input, options),
            PredictCoreference(backward, input, options));
}

}  // namespace
}  // namespace corefpipe
