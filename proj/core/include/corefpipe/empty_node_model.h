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

// Empty node prediction from a sentence without empty nodes.
//
// Every word is a potential dependency head of up to two empty nodes. The
// first candidate of a word comes from its embedding through a
// dense-ReLU-dropout-dense module, the second from the first candidate
// concatenated with the word embedding through an analogous module. Each
// candidate passes through eight heads, each with its own ReLU hidden layer
// and dropout: existence, deprel, form, lemma, UPOS, XPOS, FEATS, and a word
// order head attending over the n+1 insertion points of the sentence.

#ifndef COREFPIPE_EMPTY_NODE_MODEL_H_
#define COREFPIPE_EMPTY_NODE_MODEL_H_

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "corefpipe/conllu.h"
#include "corefpipe/encoder.h"
#include "corefpipe/nn.h"
#include "corefpipe/segmenter.h"

namespace corefpipe {

enum EnodeColumn { kDeprel, kForm, kLemma, kUpos, kXpos, kFeats, kColumnCount };

// "DEPREL", "FORM", ...
const char *ColumnName(int column);
// Value of a column of an empty node; DEPREL reads the enhanced relation.
std::string ColumnValue(const Token &token, int column);

// Label sets of the classification heads. Label 0 of every column is the
// unknown label. DEPREL and UPOS labels are shared by all datasets; FORM,
// LEMMA, XPOS and FEATS predictions are restricted to the labels seen in the
// training data of the dataset. A column whose training values are all "_"
// is absent for the dataset: it gets no loss and predicts "_".
struct EmptyNodeVocabulary {
  std::array<std::vector<std::string>, kColumnCount> labels;

  struct DatasetColumns {
    std::array<bool, kColumnCount> present{};
    std::array<std::vector<int>, kColumnCount> allowed;  // empty: all labels

    bool operator==(const DatasetColumns &) const = default;
  };
  std::map<std::string, DatasetColumns> datasets;

  int size(int column) const { return labels[column].size(); }
  // Label index, 0 for unknown values.
  int Index(int column, const std::string &value) const;
  bool Present(int column, const std::string &dataset) const;
  // 1 x size(column) mask of the labels a dataset may predict.
  nn::Matrix Mask(int column, const std::string &dataset) const;

  static EmptyNodeVocabulary Build(const std::vector<Document> &docs);

  bool operator==(const EmptyNodeVocabulary &) const = default;
};

struct EmptyNodeModelConfig {
  EncoderConfig encoder;
  std::string tokenizer = "hash:4:4096";
  int candidate_hidden = 64;
  int candidate_dim = 32;
  int head_hidden = 64;
  int word_order_dim = 32;
  double dropout = 0.5;
  int max_len = 512;
  EmptyNodeVocabulary vocab;

  std::string ToJson() const;
  static EmptyNodeModelConfig FromJson(std::string_view json);

  bool operator==(const EmptyNodeModelConfig &) const = default;
};

struct EnodeStats {
  int nodes = 0;
  // Gold nodes that cannot be targets: no surface head, or a third node
  // sharing one head.
  int dropped = 0;
};

// Training targets of one sentence. Index w of every list is word w+1.
struct EmptyNodeExample {
  std::string dataset_id;
  Segment segment;
  std::vector<int> word_subwords;
  std::array<std::vector<int>, 2> exists;
  // Label per slot, column and word; -1 where there is no node or the
  // column is absent.
  std::array<std::array<std::vector<int>, kColumnCount>, 2> labels;
  // Insertion point 0..n per slot and word, -1 where there is no node.
  std::array<std::vector<int>, 2> word_order;
};

struct SlotProbabilities {
  Eigen::VectorXd exists;                       // n
  std::array<nn::Matrix, kColumnCount> columns;  // n x labels, masked
  nn::Matrix word_order;                         // n x (n + 1)
};
using SentenceProbabilities = std::array<SlotProbabilities, 2>;

class EmptyNodeModel {
 public:
  EmptyNodeModel(const EmptyNodeModelConfig &config, uint64_t seed);

  const EmptyNodeModelConfig &config() const { return config_; }
  const EmptyNodeVocabulary &vocab() const { return config_.vocab; }
  nn::ParameterStore &params() { return params_; }
  const nn::ParameterStore &params() const { return params_; }
  const Tokenizer &tokenizer() const { return *tokenizer_; }

  // Examples of a gold document with empty nodes, one per sentence.
  std::vector<EmptyNodeExample> BuildExamples(const Document &gold,
                                              EnodeStats *stats = nullptr) const;

  // Existence cross-entropy averaged over words plus, over gold nodes, the
  // averaged cross-entropies of the present columns and the word order.
  nn::Var Loss(nn::Tape &tape, const EmptyNodeExample &example) const;

  // Evaluation-mode distributions for a sentence.
  SentenceProbabilities Predict(const Segment &segment,
                                std::span<const int> word_subwords,
                                const std::string &dataset_id) const;
  // Same, from given word embeddings (n x D).
  SentenceProbabilities PredictFromWords(const nn::Matrix &words,
                                         const std::string &dataset_id) const;

  // Empty nodes of sentence `sentence` whose existence probability reaches
  // `threshold`, as insertion targets ordered by (position, head, slot).
  std::vector<EmptyNodeTarget> Decode(const SentenceProbabilities &probs,
                                      int sentence, const std::string &dataset_id,
                                      double threshold) const;

  // Inserts predicted empty nodes into a document without empty nodes.
  Document PredictDocument(const Document &doc, double threshold = 0.5) const;

  void Save(const std::filesystem::path &dir) const;
  static std::unique_ptr<EmptyNodeModel> Load(const std::filesystem::path &dir);

  // Graph pieces, exposed for gradient checks.
  struct Candidates {
    nn::Var words;
    std::array<nn::Var, 2> slots;
  };
  Candidates Candidate(nn::Tape &tape, std::span<const int> ids,
                       std::span<const int> word_subwords) const;
  nn::Var WordOrderLogits(nn::Var candidates, nn::Var words) const;

 private:
  nn::Var HeadLogits(int column, nn::Var candidates) const;
  SentenceProbabilities ProbabilitiesFrom(nn::Tape &tape, const Candidates &c,
                                          const std::string &dataset_id) const;

  EmptyNodeModelConfig config_;
  nn::ParameterStore params_;
  std::mt19937_64 init_rng_;
  std::unique_ptr<Tokenizer> tokenizer_;
  std::unique_ptr<ToyEncoder> encoder_;
  nn::FeedForward candidate0_;
  nn::FeedForward candidate1_;
  nn::FeedForward exists_;
  std::array<nn::FeedForward, kColumnCount> columns_;
  nn::Linear word_order_hidden_;
  nn::Linear word_order_query_;
  nn::Linear word_order_key_;
  nn::Parameter *word_order_start_ = nullptr;
};

}  // namespace corefpipe

#endif  // COREFPIPE_EMPTY_NODE_MODEL_H_
