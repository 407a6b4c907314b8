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

// Data views of the one-stage variant.
//
// The model reads surface text only. Gold empty nodes that head a mention
// become zero mentions attached to their dependency head (the anchor word)
// in slot 0 or 1 by word order; other empty nodes are not predicted.

#ifndef COREFPIPE_ONE_STAGE_H_
#define COREFPIPE_ONE_STAGE_H_

#include <span>
#include <vector>

#include "corefpipe/conllu.h"
#include "corefpipe/coref_model.h"

namespace corefpipe {

struct OneStageStats {
  int zero_mentions = 0;
  // Mentions headed by an empty node without a usable anchor, or beyond the
  // second slot of an anchor.
  int dropped = 0;
};

// Surface document plus surface and zero mentions in linking order.
LinkDocument OneStageView(const Document &gold, OneStageStats *stats = nullptr);

// Writes predictions into a copy of `input` without entities. Zero
// mentions become empty nodes right after their anchor word with
// "_" morphology and DEPS "anchor:deprel", ordered by slot; spans are
// re-headed with the default head rule. `clusters` holds the entity index
// of every mention.
Document EmitPrediction(const Document &input,
                        const std::vector<LinkMention> &mentions,
                        std::span<const int> clusters);

}  // namespace corefpipe

#endif  // COREFPIPE_ONE_STAGE_H_
