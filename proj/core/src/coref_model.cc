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

#include "corefpipe/coref_model.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "corefpipe/checkpoint.h"
#include "corefpipe/errors.h"
#include "json_util.h"

namespace corefpipe {

using nlohmann::json;

std::string VariantName(Variant variant) {
  return variant == Variant::kOneStage ? "one_stage" : "two_stage";
}

Variant ParseVariant(std::string_view name) {
  if (name == "two_stage") return Variant::kTwoStage;
  if (name == "one_stage") return Variant::kOneStage;
  throw DataError("unknown variant '" + std::string(name) +
                  "', expected two_stage or one_stage");
}

std::string CorefModelConfig::ToJson() const {
  json j = {{"variant", VariantName(variant)},
            {"encoder_id", "toy-transformer"},
            {"encoder", internal::EncoderToJson(encoder)},
            {"tokenizer", tokenizer},
            {"tag_cap", tag_cap},
            {"tag_labels", json::parse(TagVocabulary(tag_cap).ToJson())},
            {"tag_hidden", tag_hidden},
            {"antecedent_hidden", antecedent_hidden},
            {"antecedent_dim", antecedent_dim},
            {"dropout", dropout},
            {"train_max_len", train_max_len},
            {"inference_max_len", inference_max_len},
            {"lookahead", lookahead},
            {"memory_size", memory_size},
            {"deprels", deprels}};
  return j.dump(2) + "\n";
}

CorefModelConfig CorefModelConfig::FromJson(std::string_view text) {
  json j = internal::ParseJson(text, "coreference model config");
  CorefModelConfig config;
  std::string variant = "two_stage";
  internal::Read(j, "variant", variant);
  try {
    config.variant = ParseVariant(variant);
  } catch (const DataError &e) {
    throw ModelError(e.what());
  }
  std::string encoder_id = "toy-transformer";
  internal::Read(j, "encoder_id", encoder_id);
  if (encoder_id != "toy-transformer") {
    throw ModelError("unsupported encoder '" + encoder_id + "'");
  }
  if (j.contains("encoder")) {
    config.encoder = internal::EncoderFromJson(j["encoder"]);
  }
  internal::Read(j, "tokenizer", config.tokenizer);
  internal::Read(j, "tag_cap", config.tag_cap);
  if (j.contains("tag_labels")) {
    TagVocabulary vocab = TagVocabulary::FromJson(j["tag_labels"].dump());
    if (vocab.cap() != config.tag_cap) {
      throw ModelError("tag labels do not match tag_cap");
    }
  }
  internal::Read(j, "tag_hidden", config.tag_hidden);
  internal::Read(j, "antecedent_hidden", config.antecedent_hidden);
  internal::Read(j, "antecedent_dim", config.antecedent_dim);
  internal::Read(j, "dropout", config.dropout);
  internal::Read(j, "train_max_len", config.train_max_len);
  internal::Read(j, "inference_max_len", config.inference_max_len);
  internal::Read(j, "lookahead", config.lookahead);
  internal::Read(j, "memory_size", config.memory_size);
  internal::Read(j, "deprels", config.deprels);
  if (config.tag_cap < 1 || config.tag_hidden < 1 ||
      config.antecedent_hidden < 1 || config.antecedent_dim < 1 ||
      config.train_max_len < 1 || config.inference_max_len < 1 ||
      config.lookahead < 0 || config.memory_size < 0) {
    throw ModelError("invalid coreference model configuration");
  }
  return config;
}

bool LinkOrderLess(const LinkMention &a, const LinkMention &b) {
  if (a.start != b.start) return a.start < b.start;
  if (a.zero() != b.zero()) return !a.zero();
  if (a.zero()) return a.slot < b.slot;
  return a.end > b.end;
}

LinkDocument TwoStageView(const Document &doc) {
  LinkDocument view;
  view.doc = doc;
  for (size_t e = 0; e < doc.entities.size(); ++e) {
    for (const Mention &m : doc.entities[e].mentions) {
      LinkMention lm;
      lm.start = m.start;
      lm.end = m.end;
      lm.entity = e;
      view.mentions.push_back(lm);
    }
  }
  std::stable_sort(view.mentions.begin(), view.mentions.end(), LinkOrderLess);
  return view;
}

nn::Matrix AntecedentMask(int columns, std::span<const int> queries) {
  nn::Matrix mask = nn::Matrix::Zero(queries.size(), columns);
  for (size_t i = 0; i < queries.size(); ++i) {
    mask.row(i).head(queries[i] + 1).setOnes();
  }
  return mask;
}

CorefModel::CorefModel(const CorefModelConfig &config, uint64_t seed)
    : config_(config), init_rng_(seed), tags_(config.tag_cap) {
  tokenizer_ = std::make_unique<HashTokenizer>(
      HashTokenizer::FromReference(config.tokenizer));
  if (tokenizer_->vocab_size() != config.encoder.vocab_size) {
    throw ModelError("tokenizer vocabulary " +
                     std::to_string(tokenizer_->vocab_size()) +
                     " does not match encoder vocabulary " +
                     std::to_string(config.encoder.vocab_size));
  }
  encoder_ = std::make_unique<ToyEncoder>(params_, "encoder", config.encoder,
                                          init_rng_);
  const int d = config.encoder.hidden;
  if (one_stage()) {
    split_ = nn::FeedForward(params_, "split", d, 4 * d, 3 * d, config.dropout,
                             init_rng_);
    candidate_head_ = nn::FeedForward(params_, "candidate", d, 4 * d,
                                      candidate_labels(), config.dropout,
                                      init_rng_);
  }
  tag_head_ = nn::FeedForward(params_, "tags", d, config.tag_hidden,
                              tags_.size(), config.dropout, init_rng_);
  antecedent_hidden_ = nn::Linear(params_, "antecedent/hidden", 2 * d,
                                  config.antecedent_hidden, init_rng_);
  query_ = nn::Linear(params_, "antecedent/query", config.antecedent_hidden,
                      config.antecedent_dim, init_rng_);
  key_ = nn::Linear(params_, "antecedent/key", config.antecedent_hidden,
                    config.antecedent_dim, init_rng_);
}

int CorefModel::DeprelIndex(const std::string &deprel) const {
  auto it = std::find(config_.deprels.begin(), config_.deprels.end(), deprel);
  return it == config_.deprels.end() ? -1 : it - config_.deprels.begin();
}

CorefModel::Features CorefModel::Encode(nn::Tape &tape,
                                        std::span<const int> ids) const {
  nn::Var encoded = encoder_->Forward(tape, ids);
  if (!one_stage()) return {encoded, encoded};
  const int d = hidden_size();
  nn::Var split = split_(encoded);
  nn::Var tokens = nn::SliceCols(split, 0, d);
  std::vector<nn::Var> parts = {tokens, nn::SliceCols(split, d, d),
                                nn::SliceCols(split, 2 * d, d)};
  return {tokens, nn::ConcatRows(parts)};
}

namespace {

int SourceRow(int subword, int slot, int length) {
  return slot < 0 ? subword : (1 + slot) * length + subword;
}

}  // namespace

nn::Var CorefModel::MentionMatrix(nn::Var sources, int length,
                                  std::span<const MentionSource> mentions) const {
  std::vector<int> firsts, lasts;
  for (const MentionSource &m : mentions) {
    firsts.push_back(SourceRow(m.first, m.slot, length));
    lasts.push_back(SourceRow(m.last, m.slot, length));
  }
  std::vector<nn::Var> halves = {nn::GatherRows(sources, firsts),
                                 nn::GatherRows(sources, lasts)};
  return nn::ConcatCols(halves);
}

nn::Var CorefModel::AntecedentLogits(nn::Var reps,
                                     std::span<const int> queries) const {
  nn::Var hidden =
      nn::Dropout(nn::Relu(antecedent_hidden_(reps)), config_.dropout);
  nn::Var q = query_(nn::GatherRows(hidden, queries));
  nn::Var k = key_(hidden);
  return nn::Scale(nn::MatMulTransposed(q, k),
                   1.0 / std::sqrt(static_cast<double>(config_.antecedent_dim)));
}

std::vector<CorefExample> CorefModel::BuildExamples(const LinkDocument &view,
                                                    int max_len) const {
  const Document &doc = view.doc;
  TokenizedDocument tokens = TokenizeDocument(doc, *tokenizer_);
  std::vector<Segment> segments =
      BuildSegments(doc, tokens, max_len, config_.lookahead);
  std::vector<int> sentence_of;
  for (const LinkMention &m : view.mentions) {
    sentence_of.push_back(doc.Locate(m.start).first);
  }

  std::vector<CorefExample> examples;
  for (size_t s = 0; s < segments.size(); ++s) {
    CorefExample ex;
    ex.segment = segments[s];
    WindowPositions window(ex.segment);
    std::vector<int> words = ex.segment.CurrentWords();
    const int n = words.size();
    std::map<int, int> word_index;  // document position -> 1-based word
    for (int w = 0; w < n; ++w) {
      word_index[words[w]] = w + 1;
      ex.word_subwords.push_back(*window.ToSubword(words[w]));
    }

    std::set<Span> spans;
    if (one_stage()) ex.candidates.assign(2 * n, 0);
    for (size_t i = 0; i < view.mentions.size(); ++i) {
      const LinkMention &m = view.mentions[i];
      if (sentence_of[i] != static_cast<int>(s)) continue;
      auto start = word_index.find(m.start);
      auto end = word_index.find(m.end);
      if (start == word_index.end() || end == word_index.end()) continue;
      if (!m.zero()) {
        spans.emplace(start->second, end->second);
      } else if (one_stage()) {
        int label = DeprelIndex(m.deprel);
        if (label >= 0) ex.candidates[m.slot * n + start->second - 1] = 1 + label;
      }
    }
    for (const SpanTag &tag : EncodeSpans(n, spans, tags_.cap()).tags) {
      ex.tags.push_back(tags_.Index(tag));
    }

    std::vector<int> global;  // visible mention -> index in view.mentions
    for (size_t i = 0; i < view.mentions.size(); ++i) {
      if (sentence_of[i] > static_cast<int>(s)) break;
      const LinkMention &m = view.mentions[i];
      if (m.zero() && !one_stage()) continue;
      auto first = window.ToSubword(m.start);
      auto last = window.ToSubword(m.zero() ? m.start : m.end);
      if (!first || !last) continue;
      ex.mentions.push_back({*first, *last, m.zero() ? m.slot : -1});
      global.push_back(i);
      if (sentence_of[i] == static_cast<int>(s)) {
        ex.queries.push_back(ex.mentions.size() - 1);
      }
    }
    for (int q : ex.queries) {
      const LinkMention &m = view.mentions[global[q]];
      int target = q;
      if (m.entity >= 0) {
        for (int j = q - 1; j >= 0; --j) {
          if (view.mentions[global[j]].entity == m.entity) {
            target = j;
            break;
          }
        }
        if (target == q) {
          for (int g = 0; g < global[q]; ++g) {
            if (view.mentions[g].entity == m.entity) {
              target = -1;
              break;
            }
          }
        }
      }
      ex.antecedents.push_back(target);
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

nn::Var CorefModel::Loss(nn::Tape &tape, const CorefExample &ex) const {
  Features f = Encode(tape, ex.segment.subword_ids);
  const int n = ex.word_subwords.size();
  const int length = ex.segment.size();
  nn::Var loss = tape.Constant(nn::Matrix::Zero(1, 1));
  if (n > 0) {
    nn::Var words = nn::GatherRows(f.tokens, ex.word_subwords);
    loss = nn::Add(loss, nn::Scale(nn::CrossEntropy(tag_head_(words), ex.tags),
                                   1.0 / n));
    if (one_stage()) {
      std::vector<int> rows;
      for (int slot = 0; slot < 2; ++slot) {
        for (int w : ex.word_subwords) rows.push_back(SourceRow(w, slot, length));
      }
      nn::Var logits = candidate_head_(nn::GatherRows(f.sources, rows));
      loss = nn::Add(loss, nn::Scale(nn::CrossEntropy(logits, ex.candidates),
                                     1.0 / (2 * n)));
    }
  }
  int valid = std::count_if(ex.antecedents.begin(), ex.antecedents.end(),
                            [](int a) { return a >= 0; });
  if (valid > 0) {
    nn::Var reps = MentionMatrix(f.sources, length, ex.mentions);
    nn::Var logits = AntecedentLogits(reps, ex.queries);
    nn::Matrix mask = AntecedentMask(ex.mentions.size(), ex.queries);
    loss = nn::Add(loss, nn::Scale(nn::CrossEntropy(logits, ex.antecedents, mask),
                                   1.0 / valid));
  }
  return loss;
}

SegmentOutputs CorefModel::Run(const Segment &segment,
                               std::span<const int> word_subwords) const {
  nn::Tape tape;
  Features f = Encode(tape, segment.subword_ids);
  SegmentOutputs out;
  out.length = segment.size();
  out.sources = f.sources.value();
  if (word_subwords.empty()) {
    out.tag_probs = nn::Matrix(0, tags_.size());
    for (auto &probs : out.candidate_probs) probs = nn::Matrix(0, candidate_labels());
    return out;
  }
  nn::Var words = nn::GatherRows(f.tokens, word_subwords);
  out.tag_probs = nn::SoftmaxRows(tag_head_(words).value());
  if (one_stage()) {
    for (int slot = 0; slot < 2; ++slot) {
      std::vector<int> rows;
      for (int w : word_subwords) rows.push_back(SourceRow(w, slot, out.length));
      out.candidate_probs[slot] = nn::SoftmaxRows(
          candidate_head_(nn::GatherRows(f.sources, rows)).value());
    }
  }
  return out;
}

nn::Matrix CorefModel::Represent(const SegmentOutputs &outputs,
                                 std::span<const MentionSource> mentions) const {
  const int d = hidden_size();
  nn::Matrix reps(mentions.size(), 2 * d);
  for (size_t i = 0; i < mentions.size(); ++i) {
    const MentionSource &m = mentions[i];
    reps.row(i).head(d) = outputs.sources.row(SourceRow(m.first, m.slot, outputs.length));
    reps.row(i).tail(d) = outputs.sources.row(SourceRow(m.last, m.slot, outputs.length));
  }
  return reps;
}

nn::Matrix CorefModel::AntecedentProbabilities(
    const nn::Matrix &reps, std::span<const int> queries) const {
  if (queries.empty()) return nn::Matrix(0, reps.rows());
  nn::Tape tape;
  nn::Var logits = AntecedentLogits(tape.Constant(reps), queries);
  return nn::SoftmaxRows(logits.value(), AntecedentMask(reps.rows(), queries));
}

nn::Matrix CorefModel::LinkScores(const nn::Matrix &reps) const {
  std::vector<int> queries(reps.rows());
  for (int i = 0; i < reps.rows(); ++i) queries[i] = i;
  return AntecedentProbabilities(reps, queries);
}

void CorefModel::Save(const std::filesystem::path &dir) const {
  SaveCheckpoint(dir, config_.ToJson(), tokenizer_->Reference(), params_);
}

std::unique_ptr<CorefModel> CorefModel::Load(const std::filesystem::path &dir) {
  CheckpointFiles files = ReadCheckpoint(dir);
  CorefModelConfig config = CorefModelConfig::FromJson(files.config);
  if (files.tokenizer != config.tokenizer) {
    throw ModelError("tokenizer reference " + files.tokenizer +
                     " does not match config " + config.tokenizer);
  }
  auto model = std::make_unique<CorefModel>(config, 0);
  LoadTensors(dir / kWeightsFile, model->params());
  return model;
}

}  // namespace corefpipe
