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

#include "corefpipe/one_stage.h"

#include <algorithm>
#include <charconv>
#include <deque>
#include <map>

#include "corefpipe/clusters.h"
#include "corefpipe/errors.h"

namespace corefpipe {

namespace {

int ParseWordId(const std::string &id) {
  int value = -1;
  auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), value);
  if (ec != std::errc() || ptr != id.data() + id.size()) return -1;
  return value;
}

}  // namespace

LinkDocument OneStageView(const Document &gold, OneStageStats *stats) {
  OneStageStats local;
  StrippedDocument stripped = StripEmptyNodes(gold);
  LinkDocument view;
  view.doc = std::move(stripped.doc);

  // Old position -> surface position, and (sentence, word) -> position.
  std::vector<int> surface(gold.TokenCount(), -1);
  std::map<std::pair<int, int>, int> word_position;
  int old_pos = 0, new_pos = 0;
  for (size_t s = 0; s < gold.sentences.size(); ++s) {
    for (const Token &token : gold.sentences[s].tokens) {
      if (!token.is_empty) {
        word_position[{s, token.WordIndex()}] = new_pos;
        surface[old_pos] = new_pos++;
      }
      ++old_pos;
    }
  }

  struct Zero {
    int node;  // position of the empty node in `gold`
    int anchor;
    int entity;
    std::string deprel;
  };
  std::map<int, std::vector<Zero>> by_anchor;
  for (size_t e = 0; e < gold.entities.size(); ++e) {
    for (const Mention &m : gold.entities[e].mentions) {
      const Token &head = gold.TokenAt(m.head);
      if (!head.is_empty) {
        int start = -1, end = -1;
        for (int p = m.start; p <= m.end; ++p) {
          if (surface[p] < 0) continue;
          if (start < 0) start = surface[p];
          end = surface[p];
        }
        LinkMention lm;
        lm.start = start;
        lm.end = end;
        lm.entity = e;
        view.mentions.push_back(lm);
        continue;
      }
      int sentence = gold.Locate(m.head).first;
      auto it = word_position.find({sentence, ParseWordId(head.DependencyHead())});
      if (it == word_position.end()) {
        ++local.dropped;
        continue;
      }
      by_anchor[it->second].push_back(
          {m.head, it->second, static_cast<int>(e), head.DependencyRelation()});
    }
  }
  for (auto &[anchor, zeros] : by_anchor) {
    std::stable_sort(zeros.begin(), zeros.end(),
                     [](const Zero &a, const Zero &b) { return a.node < b.node; });
    // Several mentions may share one empty node; slots follow the nodes.
    int slot = -1, last_node = -1;
    for (const Zero &z : zeros) {
      if (z.node != last_node) {
        ++slot;
        last_node = z.node;
      }
      if (slot > 1) {
        ++local.dropped;
        continue;
      }
      LinkMention lm;
      lm.start = lm.end = anchor;
      lm.slot = slot;
      lm.entity = z.entity;
      lm.deprel = z.deprel;
      view.mentions.push_back(lm);
      ++local.zero_mentions;
    }
  }
  std::stable_sort(view.mentions.begin(), view.mentions.end(), LinkOrderLess);
  view.doc.entities.clear();
  if (stats != nullptr) *stats = local;
  return view;
}

Document EmitPrediction(const Document &input,
                        const std::vector<LinkMention> &mentions,
                        std::span<const int> clusters) {
  if (mentions.size() != clusters.size()) {
    throw ModelError("cluster assignment does not match mention count");
  }
  Document base = input;
  base.entities.clear();

  // Zero mentions sorted by (anchor, slot) become insertion targets.
  std::vector<int> zeros;
  for (size_t i = 0; i < mentions.size(); ++i) {
    if (mentions[i].zero()) zeros.push_back(i);
  }
  std::stable_sort(zeros.begin(), zeros.end(), [&](int a, int b) {
    if (mentions[a].start != mentions[b].start) {
      return mentions[a].start < mentions[b].start;
    }
    return mentions[a].slot < mentions[b].slot;
  });
  std::vector<EmptyNodeTarget> targets;
  std::map<std::pair<int, int>, std::deque<int>> pending;  // (sentence, k)
  for (int i : zeros) {
    const LinkMention &m = mentions[i];
    auto [sentence, index] = input.Locate(m.start);
    const Token &anchor = input.sentences[sentence].tokens[index];
    if (anchor.is_empty) throw ModelError("zero mention anchored at an empty node");
    EmptyNodeTarget target;
    target.sentence = sentence;
    target.anchor = anchor.WordIndex();
    target.slot = m.slot;
    target.token.is_empty = true;
    target.token.deps = anchor.id + ":" + (m.deprel.empty() ? "dep" : m.deprel);
    targets.push_back(target);
    pending[{sentence, target.anchor}].push_back(i);
  }
  Document out = InsertEmptyNodes(base, targets);

  // Map input positions and inserted nodes to output positions.
  std::vector<int> position(input.TokenCount(), -1);
  std::vector<int> zero_position(mentions.size(), -1);
  int in_pos = 0, out_pos = 0;
  for (size_t s = 0; s < out.sentences.size(); ++s) {
    const auto &in_tokens = input.sentences[s].tokens;
    size_t i = 0;
    int anchor = 0;
    for (const Token &token : out.sentences[s].tokens) {
      if (i < in_tokens.size() && in_tokens[i].id == token.id) {
        if (!token.is_empty) anchor = token.WordIndex();
        position[in_pos++] = out_pos++;
        ++i;
        continue;
      }
      std::deque<int> &queue = pending[{static_cast<int>(s), anchor}];
      zero_position[queue.front()] = out_pos++;
      queue.pop_front();
    }
  }

  std::vector<Mention> result;
  for (size_t i = 0; i < mentions.size(); ++i) {
    const LinkMention &m = mentions[i];
    Mention mention;
    if (m.zero()) {
      mention.start = mention.end = mention.head = zero_position[i];
    } else {
      mention.start = position[m.start];
      mention.end = position[m.end];
      mention.head = DefaultMentionHead(out, mention.start, mention.end);
    }
    result.push_back(mention);
  }
  out.entities = BuildEntities(result, clusters);
  return out;
}

}  // namespace corefpipe
