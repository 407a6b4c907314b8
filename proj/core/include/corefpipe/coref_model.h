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

// Joint mention detection and antecedent linking over a segment.
//
// The encoder output at word starts of the current sentence feeds a tag
// classifier over the stack codec labels. Mentions are represented by the
// concatenation of the embeddings of their first and last word, and every
// mention attends over itself and all earlier mentions; attending to itself
// marks the first mention of an entity.
//
// The one-stage variant first maps each encoder embedding through a
// dense-ReLU-dropout-dense projection to three D-dimensional embeddings: the
// token representation used above, and two empty node candidates. Each
// candidate is classified as NONE or a dependency relation; a non-NONE
// candidate becomes a zero mention represented by its embedding repeated
// twice.

#ifndef COREFPIPE_COREF_MODEL_H_
#define COREFPIPE_COREF_MODEL_H_

#include <array>
#include <filesystem>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corefpipe/conllu.h"
#include "corefpipe/encoder.h"
#include "corefpipe/mention_codec.h"
#include "corefpipe/nn.h"
#include "corefpipe/segmenter.h"

namespace corefpipe {

enum class Variant { kTwoStage, kOneStage };

std::string VariantName(Variant variant);
// "two_stage" or "one_stage". Throws DataError otherwise.
Variant ParseVariant(std::string_view name);

struct CorefModelConfig {
  Variant variant = Variant::kTwoStage;
  EncoderConfig encoder;
  std::string tokenizer = "hash:4:4096";
  int tag_cap = 4;
  int tag_hidden = 64;
  int antecedent_hidden = 64;
  int antecedent_dim = 64;
  double dropout = 0.1;
  int train_max_len = 512;
  int inference_max_len = 2560;
  int lookahead = 50;
  // Antecedent candidates kept from outside the current window.
  int memory_size = 200;
  // Candidate labels of the one-stage variant, NONE excluded.
  std::vector<std::string> deprels;

  std::string ToJson() const;
  // Throws ModelError on malformed or inconsistent configs.
  static CorefModelConfig FromJson(std::string_view json);

  bool operator==(const CorefModelConfig &) const = default;
};

// A mention in linking order. Spans address document positions; zero
// mentions of the one-stage variant address their anchor word.
struct LinkMention {
  int start = 0;
  int end = 0;
  int slot = -1;  // 0 or 1 for zero mentions, -1 for spans
  int entity = -1;
  std::string deprel;  // zero mentions only

  bool zero() const { return slot >= 0; }
};

// Spans first by (start asc, end desc); a zero mention follows every span
// starting at its anchor word, slot 0 before slot 1.
bool LinkOrderLess(const LinkMention &a, const LinkMention &b);

// A document with its mentions in linking order.
struct LinkDocument {
  Document doc;
  std::vector<LinkMention> mentions;
};

// All annotated mentions of `doc`, empty nodes being ordinary tokens.
LinkDocument TwoStageView(const Document &doc);

// Where the representation of a mention comes from inside one segment.
struct MentionSource {
  int first = 0;  // subword index of the first word (zero: the anchor)
  int last = 0;   // subword index of the last word (zero: the anchor)
  int slot = -1;  // candidate slot of zero mentions
};

// Training targets for one segment.
struct CorefExample {
  Segment segment;
  std::vector<int> word_subwords;  // first subword of each current word
  std::vector<int> tags;           // tag label per current word
  // One-stage only: label per (slot, word) at index slot * n + word, 0 for
  // NONE and 1 + deprel index otherwise.
  std::vector<int> candidates;
  std::vector<MentionSource> mentions;  // visible mentions in link order
  std::vector<int> queries;             // mentions of the current sentence
  // Per query, the index of the gold antecedent in `mentions`; the query
  // itself for a first mention and -1 when the antecedent lies outside the
  // window.
  std::vector<int> antecedents;
};

// Outputs of one model on one segment in evaluation mode.
struct SegmentOutputs {
  // Token rows, followed in the one-stage variant by candidate-0 rows and
  // candidate-1 rows, one per subword each.
  nn::Matrix sources;
  int length = 0;
  nn::Matrix tag_probs;                        // words x tags
  std::array<nn::Matrix, 2> candidate_probs;  // words x (1 + deprels)
};

class CorefModel {
 public:
  CorefModel(const CorefModelConfig &config, uint64_t seed);

  const CorefModelConfig &config() const { return config_; }
  nn::ParameterStore &params() { return params_; }
  const nn::ParameterStore &params() const { return params_; }
  const TagVocabulary &tags() const { return tags_; }
  const Tokenizer &tokenizer() const { return *tokenizer_; }
  const Encoder &encoder() const { return *encoder_; }
  int hidden_size() const { return config_.encoder.hidden; }
  bool one_stage() const { return config_.variant == Variant::kOneStage; }
  int candidate_labels() const { return 1 + config_.deprels.size(); }
  int DeprelIndex(const std::string &deprel) const;

  // Training examples of a document, one per sentence.
  std::vector<CorefExample> BuildExamples(const LinkDocument &doc,
                                          int max_len) const;

  // Loss of one example: tag cross-entropy per word, antecedent
  // cross-entropy per query and, for the one-stage variant, candidate
  // cross-entropy per candidate, summed with equal weights.
  nn::Var Loss(nn::Tape &tape, const CorefExample &example) const;

  SegmentOutputs Run(const Segment &segment,
                     std::span<const int> word_subwords) const;

  // Mention representations (rows of 2D values) from segment outputs.
  nn::Matrix Represent(const SegmentOutputs &outputs,
                       std::span<const MentionSource> mentions) const;

  // Antecedent distributions of the `queries` rows of `reps`. Row i covers
  // columns 0..queries[i]; later columns get probability 0.
  nn::Matrix AntecedentProbabilities(const nn::Matrix &reps,
                                     std::span<const int> queries) const;

  // Full m x m link probabilities over all rows.
  nn::Matrix LinkScores(const nn::Matrix &reps) const;

  void Save(const std::filesystem::path &dir) const;
  // Throws ModelError on missing files or shape mismatches.
  static std::unique_ptr<CorefModel> Load(const std::filesystem::path &dir);

  // Graph pieces, exposed for gradient checks.
  struct Features {
    nn::Var tokens;
    nn::Var sources;
  };
  Features Encode(nn::Tape &tape, std::span<const int> ids) const;
  nn::Var MentionMatrix(nn::Var sources, int length,
                        std::span<const MentionSource> mentions) const;
  nn::Var AntecedentLogits(nn::Var reps, std::span<const int> queries) const;

 private:
  CorefModelConfig config_;
  nn::ParameterStore params_;
  std::mt19937_64 init_rng_;
  TagVocabulary tags_;
  std::unique_ptr<Tokenizer> tokenizer_;
  std::unique_ptr<ToyEncoder> encoder_;
  nn::FeedForward split_;
  nn::FeedForward candidate_head_;
  nn::FeedForward tag_head_;
  nn::Linear antecedent_hidden_;
  nn::Linear query_;
  nn::Linear key_;
};

// Mask of allowed antecedent columns: entry (i, j) is 1 when j <= queries[i].
nn::Matrix AntecedentMask(int columns, std::span<const int> queries);

}  // namespace corefpipe

#endif  // COREFPIPE_COREF_MODEL_H_
