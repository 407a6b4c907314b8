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

#include "corefpipe/empty_node_model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "corefpipe/checkpoint.h"
#include "corefpipe/errors.h"
#include "json_util.h"

namespace corefpipe {

using nlohmann::json;

namespace {

constexpr char kUnknown[] = "<unk>";

bool SharedColumn(int column) { return column == kDeprel || column == kUpos; }

int ParseWord(const std::string &id) {
  if (id.empty() || id.find('.') != std::string::npos) return -1;
  try {
    size_t used = 0;
    int value = std::stoi(id, &used);
    return used == id.size() ? value : -1;
  } catch (const std::exception &) {
    return -1;
  }
}

int ArgmaxRow(const nn::Matrix &m, int row) {
  int best = 0;
  for (int j = 1; j < m.cols(); ++j) {
    if (m(row, j) > m(row, best)) best = j;
  }
  return best;
}

}  // namespace

const char *ColumnName(int column) {
  static const char *kNames[] = {"DEPREL", "FORM", "LEMMA", "UPOS", "XPOS", "FEATS"};
  return kNames[column];
}

std::string ColumnValue(const Token &token, int column) {
  switch (column) {
    case kDeprel: return token.DependencyRelation();
    case kForm: return token.form;
    case kLemma: return token.lemma;
    case kUpos: return token.upos;
    case kXpos: return token.xpos;
    default: return token.feats;
  }
}

int EmptyNodeVocabulary::Index(int column, const std::string &value) const {
  const auto &list = labels[column];
  auto it = std::lower_bound(list.begin() + std::min<size_t>(1, list.size()),
                             list.end(), value);
  return it != list.end() && *it == value ? it - list.begin() : 0;
}

bool EmptyNodeVocabulary::Present(int column, const std::string &dataset) const {
  auto it = datasets.find(dataset);
  if (it != datasets.end()) return it->second.present[column];
  return std::any_of(datasets.begin(), datasets.end(),
                     [&](const auto &entry) { return entry.second.present[column]; });
}

nn::Matrix EmptyNodeVocabulary::Mask(int column, const std::string &dataset) const {
  auto it = datasets.find(dataset);
  if (it == datasets.end() || it->second.allowed[column].empty()) {
    return nn::Matrix::Ones(1, size(column));
  }
  nn::Matrix mask = nn::Matrix::Zero(1, size(column));
  mask(0, 0) = 1.0;
  for (int label : it->second.allowed[column]) mask(0, label) = 1.0;
  return mask;
}

EmptyNodeVocabulary EmptyNodeVocabulary::Build(const std::vector<Document> &docs) {
  std::array<std::set<std::string>, kColumnCount> values;
  std::map<std::string, std::array<std::set<std::string>, kColumnCount>> seen;
  std::map<std::string, std::array<bool, kColumnCount>> present;
  for (const Document &doc : docs) {
    auto &flags = present[doc.dataset_id];
    seen[doc.dataset_id];
    for (const Sentence &sentence : doc.sentences) {
      for (const Token &token : sentence.tokens) {
        if (!token.is_empty) continue;
        for (int c = 0; c < kColumnCount; ++c) {
          std::string value = ColumnValue(token, c);
          values[c].insert(value);
          seen[doc.dataset_id][c].insert(value);
          if (value != "_") flags[c] = true;
        }
      }
    }
  }
  EmptyNodeVocabulary vocab;
  for (int c = 0; c < kColumnCount; ++c) {
    vocab.labels[c].push_back(kUnknown);
    vocab.labels[c].insert(vocab.labels[c].end(), values[c].begin(), values[c].end());
  }
  for (auto &[dataset, columns] : seen) {
    DatasetColumns entry;
    entry.present = present[dataset];
    for (int c = 0; c < kColumnCount; ++c) {
      if (SharedColumn(c)) continue;
      for (const std::string &value : columns[c]) {
        entry.allowed[c].push_back(vocab.Index(c, value));
      }
      if (entry.allowed[c].empty()) entry.allowed[c].push_back(0);
    }
    vocab.datasets[dataset] = entry;
  }
  return vocab;
}

std::string EmptyNodeModelConfig::ToJson() const {
  json labels = json::object(), datasets = json::object();
  for (int c = 0; c < kColumnCount; ++c) labels[ColumnName(c)] = vocab.labels[c];
  for (const auto &[id, columns] : vocab.datasets) {
    json present = json::object(), allowed = json::object();
    for (int c = 0; c < kColumnCount; ++c) {
      present[ColumnName(c)] = columns.present[c];
      allowed[ColumnName(c)] = columns.allowed[c];
    }
    datasets[id] = {{"present", present}, {"allowed", allowed}};
  }
  json j = {{"model", "empty_nodes"},
            {"encoder_id", "toy-transformer"},
            {"encoder", internal::EncoderToJson(encoder)},
            {"tokenizer", tokenizer},
            {"candidate_hidden", candidate_hidden},
            {"candidate_dim", candidate_dim},
            {"head_hidden", head_hidden},
            {"word_order_dim", word_order_dim},
            {"dropout", dropout},
            {"max_len", max_len},
            {"labels", labels},
            {"datasets", datasets}};
  return j.dump(2) + "\n";
}

EmptyNodeModelConfig EmptyNodeModelConfig::FromJson(std::string_view text) {
  json j = internal::ParseJson(text, "empty node model config");
  if (j.value("model", "") != "empty_nodes") {
    throw ModelError("config does not describe an empty node model");
  }
  EmptyNodeModelConfig config;
  if (j.contains("encoder")) config.encoder = internal::EncoderFromJson(j["encoder"]);
  internal::Read(j, "tokenizer", config.tokenizer);
  internal::Read(j, "candidate_hidden", config.candidate_hidden);
  internal::Read(j, "candidate_dim", config.candidate_dim);
  internal::Read(j, "head_hidden", config.head_hidden);
  internal::Read(j, "word_order_dim", config.word_order_dim);
  internal::Read(j, "dropout", config.dropout);
  internal::Read(j, "max_len", config.max_len);
  try {
    for (int c = 0; c < kColumnCount; ++c) {
      config.vocab.labels[c] =
          j.at("labels").at(ColumnName(c)).get<std::vector<std::string>>();
      if (config.vocab.labels[c].empty() || config.vocab.labels[c][0] != kUnknown) {
        throw ModelError(std::string("label list of ") + ColumnName(c) +
                         " must start with " + kUnknown);
      }
    }
    for (auto &[id, entry] : j.at("datasets").items()) {
      EmptyNodeVocabulary::DatasetColumns columns;
      for (int c = 0; c < kColumnCount; ++c) {
        columns.present[c] = entry.at("present").at(ColumnName(c)).get<bool>();
        columns.allowed[c] =
            entry.at("allowed").at(ColumnName(c)).get<std::vector<int>>();
        for (int label : columns.allowed[c]) {
          if (label < 0 || label >= config.vocab.size(c)) {
            throw ModelError("label index out of range in dataset " + id);
          }
        }
      }
      config.vocab.datasets[id] = columns;
    }
  } catch (const json::exception &e) {
    throw ModelError(std::string("invalid empty node vocabulary: ") + e.what());
  }
  return config;
}

EmptyNodeModel::EmptyNodeModel(const EmptyNodeModelConfig &config, uint64_t seed)
    : config_(config), init_rng_(seed) {
  tokenizer_ = std::make_unique<HashTokenizer>(
      HashTokenizer::FromReference(config.tokenizer));
  if (tokenizer_->vocab_size() != config.encoder.vocab_size) {
    throw ModelError("tokenizer vocabulary does not match encoder vocabulary");
  }
  for (int c = 0; c < kColumnCount; ++c) {
    if (config.vocab.size(c) < 1) {
      throw ModelError("empty node vocabulary is missing; build it from data");
    }
  }
  encoder_ = std::make_unique<ToyEncoder>(params_, "encoder", config.encoder,
                                          init_rng_);
  const int d = config.encoder.hidden;
  const int c = config.candidate_dim;
  const int h = config.head_hidden;
  const double p = config.dropout;
  candidate0_ = nn::FeedForward(params_, "candidate0", d, config.candidate_hidden,
                                c, p, init_rng_);
  candidate1_ = nn::FeedForward(params_, "candidate1", c + d,
                                config.candidate_hidden, c, p, init_rng_);
  exists_ = nn::FeedForward(params_, "heads/exists", c, h, 1, p, init_rng_);
  for (int col = 0; col < kColumnCount; ++col) {
    std::string name = std::string("heads/") + ColumnName(col);
    std::transform(name.begin(), name.end(), name.begin(), ::tolower);
    columns_[col] = nn::FeedForward(params_, name, c, h, config.vocab.size(col),
                                    p, init_rng_);
  }
  word_order_hidden_ = nn::Linear(params_, "heads/word_order/hidden", c, h, init_rng_);
  word_order_query_ = nn::Linear(params_, "heads/word_order/query", h,
                                 config.word_order_dim, init_rng_);
  word_order_key_ = nn::Linear(params_, "heads/word_order/key", d,
                               config.word_order_dim, init_rng_);
  word_order_start_ = &params_.Add(
      "heads/word_order/start",
      nn::GlorotUniform(1, config.word_order_dim, init_rng_));
}

std::vector<EmptyNodeExample> EmptyNodeModel::BuildExamples(
    const Document &gold, EnodeStats *stats) const {
  EnodeStats local;
  StrippedDocument stripped = StripEmptyNodes(gold);
  const Document &doc = stripped.doc;
  TokenizedDocument tokens = TokenizeDocument(doc, *tokenizer_);

  std::map<int, std::vector<const EmptyNodeTarget *>> by_sentence;
  for (const EmptyNodeTarget &t : stripped.targets) {
    by_sentence[t.sentence].push_back(&t);
  }

  std::vector<EmptyNodeExample> examples;
  for (size_t s = 0; s < doc.sentences.size(); ++s) {
    EmptyNodeExample ex;
    ex.dataset_id = gold.dataset_id;
    ex.segment = SentenceSegment(doc, tokens, s, config_.max_len);
    WindowPositions window(ex.segment);
    for (int position : ex.segment.CurrentWords()) {
      ex.word_subwords.push_back(*window.ToSubword(position));
    }
    const int n = ex.word_subwords.size();
    for (int slot = 0; slot < 2; ++slot) {
      ex.exists[slot].assign(n, 0);
      ex.word_order[slot].assign(n, -1);
      for (auto &list : ex.labels[slot]) list.assign(n, -1);
    }
    std::map<int, int> used;  // head word -> slots taken
    for (const EmptyNodeTarget *t : by_sentence[s]) {
      ++local.nodes;
      int head = ParseWord(t->Head());
      if (head < 1 || head > n || used[head] >= 2 || t->anchor > n) {
        ++local.dropped;
        continue;
      }
      int slot = used[head]++;
      int w = head - 1;
      ex.exists[slot][w] = 1;
      ex.word_order[slot][w] = t->anchor;
      for (int c = 0; c < kColumnCount; ++c) {
        if (vocab().Present(c, gold.dataset_id)) {
          ex.labels[slot][c][w] = vocab().Index(c, ColumnValue(t->token, c));
        }
      }
    }
    examples.push_back(std::move(ex));
  }
  if (stats != nullptr) {
    stats->nodes += local.nodes;
    stats->dropped += local.dropped;
  }
  return examples;
}

EmptyNodeModel::Candidates EmptyNodeModel::Candidate(
    nn::Tape &tape, std::span<const int> ids,
    std::span<const int> word_subwords) const {
  nn::Var encoded = encoder_->Forward(tape, ids);
  Candidates c;
  c.words = nn::GatherRows(encoded, word_subwords);
  c.slots[0] = candidate0_(c.words);
  std::vector<nn::Var> parts = {c.slots[0], c.words};
  c.slots[1] = candidate1_(nn::ConcatCols(parts));
  return c;
}

nn::Var EmptyNodeModel::HeadLogits(int column, nn::Var candidates) const {
  return columns_[column](candidates);
}

nn::Var EmptyNodeModel::WordOrderLogits(nn::Var candidates, nn::Var words) const {
  nn::Tape &tape = *candidates.tape;
  nn::Var hidden =
      nn::Dropout(nn::Relu(word_order_hidden_(candidates)), config_.dropout);
  nn::Var query = word_order_query_(hidden);
  std::vector<nn::Var> keys = {tape.Param(*word_order_start_),
                               word_order_key_(words)};
  return nn::Scale(nn::MatMulTransposed(query, nn::ConcatRows(keys)),
                   1.0 / std::sqrt(static_cast<double>(config_.word_order_dim)));
}

nn::Var EmptyNodeModel::Loss(nn::Tape &tape, const EmptyNodeExample &ex) const {
  Candidates c = Candidate(tape, ex.segment.subword_ids, ex.word_subwords);
  const int n = ex.word_subwords.size();
  nn::Var loss = tape.Constant(nn::Matrix::Zero(1, 1));
  if (n == 0) return loss;
  for (int slot = 0; slot < 2; ++slot) {
    nn::Var x = c.slots[slot];
    loss = nn::Add(loss, nn::Scale(nn::BinaryCrossEntropy(exists_(x), ex.exists[slot]),
                                   1.0 / n));
    std::vector<int> positives;
    for (int w = 0; w < n; ++w) {
      if (ex.exists[slot][w]) positives.push_back(w);
    }
    if (positives.empty()) continue;
    const double scale = 1.0 / positives.size();
    nn::Var selected = nn::GatherRows(x, positives);
    for (int col = 0; col < kColumnCount; ++col) {
      std::vector<int> targets;
      for (int w : positives) targets.push_back(ex.labels[slot][col][w]);
      if (std::all_of(targets.begin(), targets.end(), [](int t) { return t < 0; })) {
        continue;
      }
      nn::Matrix mask = vocab().Mask(col, ex.dataset_id).replicate(positives.size(), 1);
      loss = nn::Add(loss, nn::Scale(nn::CrossEntropy(HeadLogits(col, selected),
                                                      targets, mask),
                                     scale));
    }
    std::vector<int> order;
    for (int w : positives) order.push_back(ex.word_order[slot][w]);
    loss = nn::Add(loss, nn::Scale(nn::CrossEntropy(WordOrderLogits(selected, c.words),
                                                    order),
                                   scale));
  }
  return loss;
}

SentenceProbabilities EmptyNodeModel::ProbabilitiesFrom(
    nn::Tape &tape, const Candidates &c, const std::string &dataset_id) const {
  (void)tape;
  const int n = c.words.rows();
  SentenceProbabilities probs;
  for (int slot = 0; slot < 2; ++slot) {
    SlotProbabilities &out = probs[slot];
    nn::Var x = c.slots[slot];
    const nn::Matrix &logits = exists_(x).value();
    out.exists.resize(n);
    for (int w = 0; w < n; ++w) out.exists(w) = nn::Sigmoid(logits(w, 0));
    for (int col = 0; col < kColumnCount; ++col) {
      if (!vocab().Present(col, dataset_id)) {
        out.columns[col] = nn::Matrix(n, 0);
        continue;
      }
      nn::Matrix mask = vocab().Mask(col, dataset_id).replicate(n, 1);
      out.columns[col] = nn::SoftmaxRows(HeadLogits(col, x).value(), mask);
    }
    out.word_order = nn::SoftmaxRows(WordOrderLogits(x, c.words).value());
  }
  return probs;
}

SentenceProbabilities EmptyNodeModel::Predict(const Segment &segment,
                                              std::span<const int> word_subwords,
                                              const std::string &dataset_id) const {
  nn::Tape tape;
  return ProbabilitiesFrom(tape, Candidate(tape, segment.subword_ids, word_subwords),
                           dataset_id);
}

SentenceProbabilities EmptyNodeModel::PredictFromWords(
    const nn::Matrix &words, const std::string &dataset_id) const {
  nn::Tape tape;
  Candidates c;
  c.words = tape.Constant(words);
  c.slots[0] = candidate0_(c.words);
  std::vector<nn::Var> parts = {c.slots[0], c.words};
  c.slots[1] = candidate1_(nn::ConcatCols(parts));
  return ProbabilitiesFrom(tape, c, dataset_id);
}

std::vector<EmptyNodeTarget> EmptyNodeModel::Decode(
    const SentenceProbabilities &probs, int sentence,
    const std::string & /*dataset_id*/, double threshold) const {
  struct Found {
    int position, head, slot;
    Token token;
  };
  std::vector<Found> found;
  for (int slot = 0; slot < 2; ++slot) {
    const SlotProbabilities &p = probs[slot];
    for (int w = 0; w < p.exists.size(); ++w) {
      if (p.exists(w) < threshold) continue;
      Token token;
      token.is_empty = true;
      std::array<std::string, kColumnCount> values;
      for (int col = 0; col < kColumnCount; ++col) {
        values[col] = "_";
        if (p.columns[col].cols() == 0) continue;
        int label = ArgmaxRow(p.columns[col], w);
        if (label > 0) values[col] = vocab().labels[col][label];
      }
      token.form = values[kForm];
      token.lemma = values[kLemma];
      token.upos = values[kUpos];
      token.xpos = values[kXpos];
      token.feats = values[kFeats];
      std::string deprel = values[kDeprel] == "_" ? "dep" : values[kDeprel];
      token.deps = std::to_string(w + 1) + ":" + deprel;
      found.push_back({ArgmaxRow(p.word_order, w), w + 1, slot, token});
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const Found &a, const Found &b) {
    if (a.position != b.position) return a.position < b.position;
    if (a.head != b.head) return a.head < b.head;
    return a.slot < b.slot;
  });
  std::vector<EmptyNodeTarget> targets;
  std::map<int, int> slots;
  for (const Found &f : found) {
    EmptyNodeTarget target;
    target.sentence = sentence;
    target.anchor = f.position;
    target.slot = slots[f.position]++;
    target.token = f.token;
    targets.push_back(std::move(target));
  }
  return targets;
}

Document EmptyNodeModel::PredictDocument(const Document &doc, double threshold) const {
  for (const Sentence &sentence : doc.sentences) {
    for (const Token &token : sentence.tokens) {
      if (token.is_empty) {
        throw DataError("document " + doc.doc_id +
                        " already contains empty nodes");
      }
    }
  }
  TokenizedDocument tokens = TokenizeDocument(doc, *tokenizer_);
  std::vector<EmptyNodeTarget> targets;
  for (size_t s = 0; s < doc.sentences.size(); ++s) {
    Segment segment = SentenceSegment(doc, tokens, s, config_.max_len);
    WindowPositions window(segment);
    std::vector<int> word_subwords;
    for (int position : segment.CurrentWords()) {
      word_subwords.push_back(*window.ToSubword(position));
    }
    if (word_subwords.empty()) continue;
    auto found = Decode(Predict(segment, word_subwords, doc.dataset_id), s,
                        doc.dataset_id, threshold);
    targets.insert(targets.end(), found.begin(), found.end());
  }
  return InsertEmptyNodes(doc, targets);
}

void EmptyNodeModel::Save(const std::filesystem::path &dir) const {
  SaveCheckpoint(dir, config_.ToJson(), tokenizer_->Reference(), params_);
}

std::unique_ptr<EmptyNodeModel> EmptyNodeModel::Load(const std::filesystem::path &dir) {
  CheckpointFiles files = ReadCheckpoint(dir);
  EmptyNodeModelConfig config = EmptyNodeModelConfig::FromJson(files.config);
  if (files.tokenizer != config.tokenizer) {
    throw ModelError("tokenizer reference does not match the model config");
  }
  auto model = std::make_unique<EmptyNodeModel>(config, 0);
  LoadTensors(dir / kWeightsFile, model->params());
  return model;
}

}  // namespace corefpipe
