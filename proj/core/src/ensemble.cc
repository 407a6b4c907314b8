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

#include <algorithm>

#include "corefpipe/errors.h"

namespace corefpipe {

nn::Matrix AverageProbabilities(std::span<const nn::Matrix> members) {
  if (members.empty()) throw ModelError("cannot average an empty ensemble");
  const nn::Matrix &first = members.front();
  for (const nn::Matrix &m : members) {
    if (m.rows() != first.rows() || m.cols() != first.cols()) {
      throw ModelError("ensemble members produced differently shaped outputs");
    }
  }
  if (members.size() == 1) return first;
  nn::Matrix mean(first.rows(), first.cols());
  std::vector<double> values(members.size());
  for (int i = 0; i < first.rows(); ++i) {
    for (int j = 0; j < first.cols(); ++j) {
      for (size_t k = 0; k < members.size(); ++k) values[k] = members[k](i, j);
      std::sort(values.begin(), values.end());
      double running = values[0];
      for (size_t k = 1; k < values.size(); ++k) {
        running += (values[k] - running) / static_cast<double>(k + 1);
      }
      mean(i, j) = running;
    }
  }
  return mean;
}

void CheckCompatible(std::span<const CorefModel *const> models) {
  if (models.empty()) throw ModelError("no models given");
  const CorefModelConfig &a = models.front()->config();
  for (const CorefModel *model : models) {
    const CorefModelConfig &b = model->config();
    if (b.variant != a.variant || b.tokenizer != a.tokenizer ||
        b.tag_cap != a.tag_cap || b.deprels != a.deprels) {
      throw ModelError(
          "ensemble members differ in variant, tokenizer or label vocabularies");
    }
  }
}

namespace {

int RowArgmax(const nn::Matrix &m, int row) {
  int best = 0;
  for (int j = 1; j < m.cols(); ++j) {
    if (m(row, j) > m(row, best)) best = j;
  }
  return best;
}

}  // namespace

std::vector<LinkMention> DecodeMentions(const TagVocabulary &tags,
                                        const std::vector<std::string> &deprels,
                                        const std::vector<int> &words,
                                        const nn::Matrix &tag_probs,
                                        const std::array<nn::Matrix, 2> &candidate_probs,
                                        bool force_none) {
  const int n = words.size();
  std::vector<SpanTag> decoded;
  for (int w = 0; w < n; ++w) decoded.push_back(tags.Tag(RowArgmax(tag_probs, w)));
  std::vector<LinkMention> mentions;
  for (const Span &span : DecodeTags(decoded)) {
    LinkMention m;
    m.start = words[span.first - 1];
    m.end = words[span.second - 1];
    mentions.push_back(m);
  }
  if (!force_none) {
    for (int slot = 0; slot < 2; ++slot) {
      const nn::Matrix &probs = candidate_probs[slot];
      if (probs.rows() != n || probs.cols() == 0) continue;
      for (int w = 0; w < n; ++w) {
        int label = RowArgmax(probs, w);
        if (label == 0 || label > static_cast<int>(deprels.size())) continue;
        LinkMention m;
        m.start = m.end = words[w];
        m.slot = slot;
        m.deprel = deprels[label - 1];
        mentions.push_back(m);
      }
    }
  }
  std::stable_sort(mentions.begin(), mentions.end(), LinkOrderLess);
  return mentions;
}

std::optional<MentionSource> SourceIn(const LinkMention &mention,
                                      const WindowPositions &window) {
  auto first = window.ToSubword(mention.start);
  auto last = window.ToSubword(mention.zero() ? mention.start : mention.end);
  if (!first || !last) return std::nullopt;
  return MentionSource{*first, *last, mention.zero() ? mention.slot : -1};
}

SegmentPrediction EnsemblePredict(std::span<const CorefModel *const> models,
                                  const Segment &segment, bool force_none) {
  CheckCompatible(models);
  const CorefModel &lead = *models.front();
  WindowPositions window(segment);
  std::vector<int> words = segment.CurrentWords();
  std::vector<int> word_subwords;
  for (int p : words) word_subwords.push_back(*window.ToSubword(p));

  std::vector<SegmentOutputs> outputs;
  for (const CorefModel *model : models) {
    outputs.push_back(model->Run(segment, word_subwords));
  }
  auto average = [&](auto get) {
    std::vector<nn::Matrix> list;
    for (const SegmentOutputs &o : outputs) list.push_back(get(o));
    return AverageProbabilities(list);
  };
  SegmentPrediction result;
  result.tag_probs = average([](const SegmentOutputs &o) { return o.tag_probs; });
  if (lead.one_stage()) {
    for (int slot = 0; slot < 2; ++slot) {
      result.candidate_probs[slot] = average(
          [slot](const SegmentOutputs &o) { return o.candidate_probs[slot]; });
    }
  }
  result.mentions = DecodeMentions(lead.tags(), lead.config().deprels, words,
                                   result.tag_probs, result.candidate_probs,
                                   force_none);
  std::vector<MentionSource> sources;
  std::vector<int> queries;
  for (const LinkMention &m : result.mentions) {
    queries.push_back(sources.size());
    sources.push_back(*SourceIn(m, window));
  }
  std::vector<nn::Matrix> links;
  for (size_t i = 0; i < models.size(); ++i) {
    nn::Matrix reps = models[i]->Represent(outputs[i], sources);
    links.push_back(models[i]->AntecedentProbabilities(reps, queries));
  }
  result.link_probs = AverageProbabilities(links);
  for (int q = 0; q < result.link_probs.rows(); ++q) {
    int best = 0;
    for (int j = 1; j <= q; ++j) {
      if (result.link_probs(q, j) > result.link_probs(q, best)) best = j;
    }
    result.antecedents.push_back(best);
  }
  return result;
}

}  // namespace corefpipe
