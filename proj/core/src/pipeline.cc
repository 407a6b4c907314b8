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

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "corefpipe/clusters.h"
#include "corefpipe/datasets.h"
#include "corefpipe/ensemble.h"
#include "corefpipe/errors.h"
#include "corefpipe/one_stage.h"

namespace corefpipe {

int SegmentLength(const CorefModel &model, const Document &doc,
                  const DecodeOptions &options) {
  if (options.max_len > 0) return options.max_len;
  return InferenceMaxLength(doc.dataset_id, model.config().inference_max_len);
}

namespace {

bool HasEmptyNodes(const Document &doc) {
  for (const Sentence &s : doc.sentences) {
    for (const Token &t : s.tokens) {
      if (t.is_empty) return true;
    }
  }
  return false;
}

}  // namespace

Document PredictCoreference(std::span<const CorefModel *const> models,
                            const Document &input, const DecodeOptions &options) {
  CheckCompatible(models);
  const CorefModel &lead = *models.front();
  Document doc = input;
  if (lead.one_stage() && HasEmptyNodes(doc)) doc = StripEmptyNodes(doc).doc;
  doc.entities.clear();

  TokenizedDocument tokens = TokenizeDocument(doc, lead.tokenizer());
  std::vector<Segment> segments =
      BuildSegments(doc, tokens, SegmentLength(lead, doc, options),
                    lead.config().lookahead);
  const int memory_size = lead.config().memory_size;
  const size_t k = models.size();

  std::vector<LinkMention> mentions;
  std::vector<int> antecedents;
  // Last known representation of every mention, per model.
  std::vector<std::vector<nn::Matrix>> memory(k);

  for (const Segment &segment : segments) {
    WindowPositions window(segment);
    std::vector<int> words = segment.CurrentWords();
    std::vector<int> word_subwords;
    for (int p : words) word_subwords.push_back(*window.ToSubword(p));

    std::vector<SegmentOutputs> outputs;
    for (const CorefModel *model : models) {
      outputs.push_back(model->Run(segment, word_subwords));
    }
    std::vector<nn::Matrix> list;
    for (const SegmentOutputs &o : outputs) list.push_back(o.tag_probs);
    nn::Matrix tag_probs = AverageProbabilities(list);
    std::array<nn::Matrix, 2> candidate_probs;
    if (lead.one_stage()) {
      for (int slot = 0; slot < 2; ++slot) {
        list.clear();
        for (const SegmentOutputs &o : outputs) list.push_back(o.candidate_probs[slot]);
        candidate_probs[slot] = AverageProbabilities(list);
      }
    }
    std::vector<LinkMention> fresh =
        DecodeMentions(lead.tags(), lead.config().deprels, words, tag_probs,
                       candidate_probs, options.force_none);
    if (fresh.empty()) continue;

    // Antecedent columns: earlier mentions visible in the window or among
    // the most recent stored ones, then the new mentions.
    const int previous = mentions.size();
    std::vector<std::optional<MentionSource>> visible(previous);
    std::vector<int> hidden;
    for (int j = 0; j < previous; ++j) {
      visible[j] = SourceIn(mentions[j], window);
      if (!visible[j]) hidden.push_back(j);
    }
    std::vector<char> remembered(previous, 0);
    for (size_t h = hidden.size() > static_cast<size_t>(memory_size)
                        ? hidden.size() - memory_size
                        : 0;
         h < hidden.size(); ++h) {
      remembered[hidden[h]] = 1;
    }
    std::vector<int> columns;  // global mention index per column
    for (int j = 0; j < previous; ++j) {
      if (visible[j] || remembered[j]) columns.push_back(j);
    }
    std::vector<int> queries;
    for (size_t f = 0; f < fresh.size(); ++f) {
      queries.push_back(columns.size());
      columns.push_back(previous + f);
      mentions.push_back(fresh[f]);
      visible.push_back(SourceIn(fresh[f], window));
    }

    std::vector<nn::Matrix> links;
    for (size_t i = 0; i < k; ++i) {
      std::vector<MentionSource> sources;
      std::vector<int> rows;
      for (size_t c = 0; c < columns.size(); ++c) {
        if (visible[columns[c]]) {
          sources.push_back(*visible[columns[c]]);
          rows.push_back(c);
        }
      }
      nn::Matrix fresh_reps = models[i]->Represent(outputs[i], sources);
      nn::Matrix reps(columns.size(), fresh_reps.cols());
      for (size_t r = 0; r < rows.size(); ++r) reps.row(rows[r]) = fresh_reps.row(r);
      for (size_t c = 0; c < columns.size(); ++c) {
        if (!visible[columns[c]]) reps.row(c) = memory[i][columns[c]];
      }
      memory[i].resize(mentions.size());
      for (size_t r = 0; r < rows.size(); ++r) {
        memory[i][columns[rows[r]]] = fresh_reps.row(r);
      }
      links.push_back(models[i]->AntecedentProbabilities(reps, queries));
    }
    nn::Matrix probs = AverageProbabilities(links);
    for (size_t q = 0; q < queries.size(); ++q) {
      int best = 0;
      for (int c = 1; c <= queries[q]; ++c) {
        if (probs(q, c) > probs(q, best)) best = c;
      }
      antecedents.push_back(columns[best]);
    }
  }
  return EmitPrediction(doc, mentions, DecodeClusters(antecedents));
}

Document RunPipeline(const EmptyNodeModel *enode,
                     std::span<const CorefModel *const> models,
                     const Document &doc, const DecodeOptions &options) {
  if (models.empty()) throw ModelError("no coreference model given");
  if (enode == nullptr || models.front()->one_stage()) {
    return PredictCoreference(models, doc, options);
  }
  Document surface = HasEmptyNodes(doc) ? StripEmptyNodes(doc).doc : doc;
  surface.entities.clear();
  if (!PredictsEmptyNodes(*enode, doc.dataset_id, options)) {
    return PredictCoreference(models, surface, options);
  }
  return PredictCoreference(models, enode->PredictDocument(surface, options.threshold),
                            options);
}

bool PredictsEmptyNodes(const EmptyNodeModel &enode, const std::string &dataset_id,
                        const DecodeOptions &options) {
  if (options.empty_nodes_everywhere) return true;
  if (options.empty_node_datasets) {
    return options.empty_node_datasets->count(dataset_id) > 0;
  }
  return enode.vocab().datasets.count(dataset_id) > 0;
}

std::vector<Document> PredictDocuments(const EmptyNodeModel *enode,
                                       std::span<const CorefModel *const> models,
                                       const std::vector<Document> &docs,
                                       const DecodeOptions &options) {
  if (models.empty()) throw ModelError("no coreference model given");
  CheckCompatible(models);
  std::vector<Document> results(docs.size());
  std::vector<std::exception_ptr> errors(docs.size());
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < docs.size(); i = next++) {
      try {
        results[i] = RunPipeline(enode, models, docs[i], options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int threads = std::max(1, std::min<int>(options.threads, docs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (std::thread &t : pool) t.join();
  for (const std::exception_ptr &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace corefpipe
