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

// Document-level prediction.
//
// Documents are processed one sentence at a time. Mentions decoded in
// earlier sentences stay antecedent candidates: those still inside the
// current window are re-represented from it, the others use the
// representation stored when they were last visible, limited to the most
// recent `memory_size` of them.

#ifndef COREFPIPE_PIPELINE_H_
#define COREFPIPE_PIPELINE_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "corefpipe/conllu.h"
#include "corefpipe/coref_model.h"
#include "corefpipe/empty_node_model.h"

namespace corefpipe {

struct DecodeOptions {
  // Segment length; 0 selects the model default, 512 for the PROIEL
  // datasets.
  int max_len = 0;
  double threshold = 0.5;  // empty node existence threshold
  bool force_none = false;  // one-stage: never predict zero mentions
  int threads = 1;
  // Datasets that receive predicted empty nodes. Unset selects the datasets
  // the empty node model was trained on; other documents are processed
  // without empty nodes.
  std::optional<std::set<std::string>> empty_node_datasets;
  bool empty_nodes_everywhere = false;
};

// Whether the two-stage pipeline predicts empty nodes for `dataset_id`.
bool PredictsEmptyNodes(const EmptyNodeModel &enode, const std::string &dataset_id,
                        const DecodeOptions &options);

// Predicts mentions and entities of `doc` with an ensemble of one or more
// coreference models. One-stage models read the surface text, dropping any
// empty nodes of the input, and add zero mentions as empty nodes.
Document PredictCoreference(std::span<const CorefModel *const> models,
                            const Document &doc, const DecodeOptions &options);

// Two-stage: empty nodes from `enode` (when given) are inserted into the
// surface document before coreference prediction. One-stage models ignore
// `enode`.
Document RunPipeline(const EmptyNodeModel *enode,
                     std::span<const CorefModel *const> models,
                     const Document &doc, const DecodeOptions &options);

// RunPipeline over many documents with `options.threads` workers. Output
// order follows input order.
std::vector<Document> PredictDocuments(const EmptyNodeModel *enode,
                                       std::span<const CorefModel *const> models,
                                       const std::vector<Document> &docs,
                                       const DecodeOptions &options);

// Segment length used for a dataset.
int SegmentLength(const CorefModel &model, const Document &doc,
                  const DecodeOptions &options);

}  // namespace corefpipe

#endif  // COREFPIPE_PIPELINE_H_
