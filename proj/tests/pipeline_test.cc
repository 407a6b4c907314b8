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

#include "corefpipe/pipeline.h"

#include <gtest/gtest.h>

#include <memory>
#include <vector>

#include "corefpipe/conllu.h"
#include "corefpipe/synthetic.h"
#include "corefpipe/training.h"
#include "models.h"

namespace corefpipe {
namespace {

int EmptyNodeCount(const Document &doc) {
  int count = 0;
  for (const Sentence &s : doc.sentences) {
    for (const Token &t : s.tokens) count += t.is_empty;
  }
  return count;
}

class PipelineTest : public ::testing::Test {
 protected:
  PipelineTest()
      : gold_(Mixed()),
        enode_(testing::SmallEnodeConfig(GenerateSynthetic("xa_syn", 2, 1)), 4),
        two_(testing::SmallCorefConfig(Variant::kTwoStage), 5),
        one_(testing::SmallCorefConfig(Variant::kOneStage), 6),
        input_(PipelineInput(gold_)) {}

  static std::vector<Document> Mixed() {
    std::vector<Document> docs;
    for (const std::string &id : SyntheticDatasets()) {
      for (Document &doc : GenerateSynthetic(id, 3, 7, "dev")) docs.push_back(doc);
    }
    return docs;
  }

  std::vector<Document> gold_;
  EmptyNodeModel enode_;
  CorefModel two_;
  CorefModel one_;
  std::vector<Document> input_;
};

TEST_F(PipelineTest, InputHasNoEmptyNodesOrEntities) {
  ASSERT_EQ(input_.size(), gold_.size());
  for (const Document &doc : input_) {
    EXPECT_EQ(EmptyNodeCount(doc), 0);
    EXPECT_TRUE(doc.entities.empty());
  }
}

TEST_F(PipelineTest, EmptyNodeGateFollowsTrainingData) {
  DecodeOptions options;
  EXPECT_TRUE(PredictsEmptyNodes(enode_, "xa_syn", options));
  EXPECT_FALSE(PredictsEmptyNodes(enode_, "xc_syn", options));
  options.empty_node_datasets = std::set<std::string>{"xc_syn"};
  EXPECT_FALSE(PredictsEmptyNodes(enode_, "xa_syn", options));
  EXPECT_TRUE(PredictsEmptyNodes(enode_, "xc_syn", options));
  options.empty_nodes_everywhere = true;
  EXPECT_TRUE(PredictsEmptyNodes(enode_, "xb_syn", options));
}

TEST_F(PipelineTest, TwoStageInsertsNodesOnlyWhereGated) {
  DecodeOptions options;
  options.threshold = 0.0;  // every candidate fires
  const CorefModel *models[] = {&two_};
  for (const Document &doc : input_) {
    const Document out = RunPipeline(&enode_, models, doc, options);
    if (doc.dataset_id == "xa_syn") {
      EXPECT_EQ(EmptyNodeCount(out), 2 * doc.TokenCount());
    } else {
      EXPECT_EQ(EmptyNodeCount(out), 0) << doc.dataset_id;
    }
  }
  options.empty_nodes_everywhere = true;
  EXPECT_GT(EmptyNodeCount(RunPipeline(&enode_, models, input_.back(), options)), 0);
  // Without an empty node model the surface is kept.
  EXPECT_EQ(RunPipeline(nullptr, models, input_[0], options).sentences, input_[0].sentences);
}

TEST_F(PipelineTest, OneStageReadsSurfaceOnly) {
  const CorefModel *models[] = {&one_};
  DecodeOptions options;
  for (size_t i = 0; i < gold_.size(); ++i) {
    Document with_nodes = gold_[i];
    with_nodes.entities.clear();
    EXPECT_EQ(RunPipeline(&enode_, models, with_nodes, options),
              RunPipeline(nullptr, models, input_[i], options));
  }
}

TEST_F(PipelineTest, WorkersKeepInputOrder) {
  DecodeOptions options;
  options.threshold = 0.3;
  const CorefModel *models[] = {&two_};
  const auto serial = PredictDocuments(&enode_, models, input_, options);
  ASSERT_EQ(serial.size(), input_.size());
  for (size_t i = 0; i < input_.size(); ++i) EXPECT_EQ(serial[i].doc_id, input_[i].doc_id);
  for (int threads : {2, 4, 16}) {
    options.threads = threads;
    EXPECT_EQ(PredictDocuments(&enode_, models, input_, options), serial) << threads;
  }
}

TEST_F(PipelineTest, InputsAreNotModified) {
  const std::vector<Document> before = input_;
  const CorefModel *models[] = {&two_};
  DecodeOptions options;
  options.threads = 3;
  PredictDocuments(&enode_, models, input_, options);
  const CorefModel *one_models[] = {&one_};
  PredictDocuments(&enode_, one_models, gold_, options);
  EXPECT_EQ(input_, before);
  EXPECT_EQ(gold_, Mixed());
}

TEST_F(PipelineTest, OutputIsValidConllu) {
  DecodeOptions options;
  options.threshold = 0.4;
  for (const CorefModel *model : {&two_, &one_}) {
    const CorefModel *models[] = {model};
    const auto out = PredictDocuments(&enode_, models, input_, options);
    const std::string text = SerializeConllu(out);
    EXPECT_EQ(SerializeConllu(ParseConllu(text)), text);
  }
}

TEST_F(PipelineTest, SegmentLengthRules) {
  DecodeOptions options;
  Document doc;
  doc.dataset_id = "cu_proiel";
  EXPECT_EQ(SegmentLength(two_, doc, options), 512);
  doc.dataset_id = "grc_proiel";
  EXPECT_EQ(SegmentLength(two_, doc, options), 512);
  doc.dataset_id = "cs_pdt";
  EXPECT_EQ(SegmentLength(two_, doc, options), two_.config().inference_max_len);
  options.max_len = 100;
  EXPECT_EQ(SegmentLength(two_, doc, options), 100);
}

TEST_F(PipelineTest, EmptyDocumentListGivesNoOutput) {
  const CorefModel *models[] = {&two_};
  EXPECT_TRUE(PredictDocuments(&enode_, models, {}, DecodeOptions()).empty());
}

}  // namespace
}  // namespace corefpipe
