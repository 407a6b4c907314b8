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

// Small documents shared by the unit tests and the acceptance suite.

#ifndef COREFPIPE_TESTS_FIXTURES_H_
#define COREFPIPE_TESTS_FIXTURES_H_

#include <algorithm>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "corefpipe/conllu.h"

namespace corefpipe::testing {

// A one-sentence document "w1 .. wn" whose words all attach to word 1.
inline Document FlatDocument(const std::string &id, int words) {
  Document doc;
  doc.doc_id = id;
  Sentence s;
  for (int i = 1; i <= words; ++i) {
    Token t;
    t.id = std::to_string(i);
    t.form = "w" + std::to_string(i);
    t.head = i == 1 ? "0" : "1";
    t.deprel = i == 1 ? "root" : "dep";
    s.tokens.push_back(t);
  }
  doc.sentences.push_back(s);
  return doc;
}

// An empty node target with head `head` inserted after word `anchor`.
inline EmptyNodeTarget NodeTarget(int anchor, int head, const std::string &deprel,
                                  const std::string &form = "#PersPron") {
  EmptyNodeTarget target;
  target.anchor = anchor;
  target.token.form = form;
  target.token.lemma = form;
  target.token.upos = "PRON";
  target.token.deps = std::to_string(head) + ":" + deprel;
  return target;
}

// Changes the empty nodes of `gold` at random: a node may lose or change
// its head, relation, word order or a morphology column, disappear, or get
// a spurious sibling. Surface tokens are kept.
inline Document PerturbEmptyNodes(const Document &gold, std::mt19937_64 &rng) {
  StrippedDocument stripped = StripEmptyNodes(gold);
  std::bernoulli_distribution coin(0.3);
  std::vector<EmptyNodeTarget> targets;
  for (EmptyNodeTarget target : stripped.targets) {
    const int words = stripped.doc.sentences[target.sentence].tokens.size();
    std::uniform_int_distribution<int> word(0, words);
    if (coin(rng)) continue;
    Token &t = target.token;
    if (coin(rng)) t.deps = std::to_string(word(rng)) + ":" + t.DependencyRelation();
    if (coin(rng)) t.deps = t.DependencyHead() + ":obl";
    if (coin(rng)) target.anchor = word(rng);
    if (coin(rng)) t.form = "#Other";
    if (coin(rng)) t.lemma = "other";
    if (coin(rng)) t.upos = "NOUN";
    if (coin(rng)) t.xpos = t.xpos == "_" ? "X" : "_";
    if (coin(rng)) t.feats = "Case=Nom";
    targets.push_back(target);
    if (coin(rng)) {
      EmptyNodeTarget extra = target;
      extra.token.deps = std::to_string(word(rng)) + ":nsubj";
      targets.push_back(extra);
    }
  }
  std::stable_sort(targets.begin(), targets.end(),
                   [](const EmptyNodeTarget &a, const EmptyNodeTarget &b) {
                     return std::tie(a.sentence, a.anchor) < std::tie(b.sentence, b.anchor);
                   });
  return InsertEmptyNodes(stripped.doc, targets);
}

}  // namespace corefpipe::testing

#endif  // COREFPIPE_TESTS_FIXTURES_H_
