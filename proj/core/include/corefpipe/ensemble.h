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

// Ensembles of coreference models.
//
// Members run on the same segment; their post-softmax distributions of the
// tag head, the candidate head and the antecedent rows are averaged before
// a single decoding. The average sorts the member values of every entry
// before accumulating a running mean, so it does not depend on member order
// and returns the input unchanged when all members agree.

#ifndef COREFPIPE_ENSEMBLE_H_
#define COREFPIPE_ENSEMBLE_H_

#include <optional>
#include <span>
#include <vector>

#include "corefpipe/coref_model.h"
#include "corefpipe/nn.h"
#include "corefpipe/segmenter.h"

namespace corefpipe {

// Entry-wise mean of equally shaped matrices. Throws ModelError on an empty
// list or shape mismatch.
nn::Matrix AverageProbabilities(std::span<const nn::Matrix> members);

// Throws ModelError unless all models share variant, tokenizer, tag labels
// and candidate labels.
void CheckCompatible(std::span<const CorefModel *const> models);

// Mentions of the current sentence decoded from (averaged) head outputs.
// `words` holds the document positions of the current words. Zero mentions
// are produced from `candidate_probs` unless `force_none` is set or the
// matrices are empty.
std::vector<LinkMention> DecodeMentions(const TagVocabulary &tags,
                                        const std::vector<std::string> &deprels,
                                        const std::vector<int> &words,
                                        const nn::Matrix &tag_probs,
                                        const std::array<nn::Matrix, 2> &candidate_probs,
                                        bool force_none);

// Where a mention lives in a segment, if all its words start inside it.
std::optional<MentionSource> SourceIn(const LinkMention &mention,
                                      const WindowPositions &window);

struct SegmentPrediction {
  nn::Matrix tag_probs;
  std::array<nn::Matrix, 2> candidate_probs;
  std::vector<LinkMention> mentions;  // current sentence, linking order
  nn::Matrix link_probs;              // mentions x mentions
  std::vector<int> antecedents;       // argmax column of every row
};

// Predicts the current sentence of one segment, linking its mentions among
// themselves.
SegmentPrediction EnsemblePredict(std::span<const CorefModel *const> models,
                                  const Segment &segment, bool force_none = false);

}  // namespace corefpipe

#endif  // COREFPIPE_ENSEMBLE_H_
