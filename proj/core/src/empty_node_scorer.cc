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

#include "corefpipe/empty_node_scorer.h"

#include <cstdio>
#include <map>
#include <sstream>

#include "corefpipe/errors.h"

namespace corefpipe {

const char *EnodeMetricName(int metric) {
  static const char *kNames[] = {"ARC",   "DEP",  "WO",   "DEP_WO", "FORM",
                                 "LEMMA", "UPOS", "XPOS", "FEATS",  "ALL"};
  return kNames[metric];
}

namespace {

const std::string &Column(const Token &t, int metric) {
  switch (metric) {
    case kFormMetric: return t.form;
    case kLemmaMetric: return t.lemma;
    case kUposMetric: return t.upos;
    case kXposMetric: return t.xpos;
    default: return t.feats;
  }
}

}  // namespace

EnodeScores ScoreEmptyNodes(const std::vector<Document> &gold,
                            const std::vector<Document> &pred) {
  std::map<std::string, const Document *> by_id;
  for (const Document &doc : pred) by_id[doc.doc_id] = &doc;
  if (by_id.size() != gold.size()) {
    throw DataError("gold and predicted document sets differ");
  }
  EnodeScores result;
  for (int m = 0; m < kMetricCount; ++m) {
    result.present[m] = m < kFormMetric || m == kAll;
  }
  for (const Document &g : gold) {
    for (const Sentence &s : g.sentences) {
      for (const Token &t : s.tokens) {
        if (!t.is_empty) continue;
        for (int m = kFormMetric; m <= kFeatsMetric; ++m) {
          if (Column(t, m) != "_") result.present[m] = true;
        }
      }
    }
  }

  for (const Document &g : gold) {
    auto it = by_id.find(g.doc_id);
    if (it == by_id.end()) throw DataError("document " + g.doc_id + " not predicted");
    const Document &p = *it->second;
    if (g.sentences.size() != p.sentences.size()) {
      throw DataError("surface mismatch in document " + g.doc_id);
    }
    for (size_t s = 0; s < g.sentences.size(); ++s) {
      const Sentence &gs = g.sentences[s], &ps = p.sentences[s];
      std::vector<std::string> gold_words, pred_words;
      for (const Token &t : gs.tokens) {
        if (t.is_empty) {
          ++result.gold;
        } else {
          gold_words.push_back(t.form);
        }
      }
      for (const Token &t : ps.tokens) {
        if (t.is_empty) {
          ++result.predicted;
        } else {
          pred_words.push_back(t.form);
        }
      }
      if (gold_words != pred_words) {
        throw DataError("surface mismatch in document " + g.doc_id + " sentence " +
                        std::to_string(s + 1));
      }
      for (auto [gi, pi] : MatchEmptyNodes(gs, ps)) {
        const Token &a = gs.tokens[gi], &b = ps.tokens[pi];
        bool dep = a.DependencyRelation() == b.DependencyRelation();
        bool wo = a.WordIndex() == b.WordIndex();
        std::array<bool, kMetricCount> ok{};
        ok[kArc] = true;
        ok[kDep] = dep;
        ok[kWo] = wo;
        ok[kDepWo] = dep && wo;
        bool all = dep && wo;
        for (int m = kFormMetric; m <= kFeatsMetric; ++m) {
          ok[m] = Column(a, m) == Column(b, m);
          if (result.present[m]) all = all && ok[m];
        }
        ok[kAll] = all;
        for (int m = 0; m < kMetricCount; ++m) result.correct[m] += ok[m];
      }
    }
  }
  for (int m = 0; m < kMetricCount; ++m) {
    MetricCounts counts;
    counts.recall_num = counts.precision_num = result.correct[m];
    counts.recall_den = result.gold;
    counts.precision_den = result.predicted;
    result.scores[m] = ToPrf(counts);
  }
  return result;
}

std::string EnodeTable(const EnodeScores &scores) {
  std::ostringstream out;
  for (int m = 0; m < kMetricCount; ++m) {
    out << (m ? "\t" : "") << EnodeMetricName(m);
  }
  out << '\n';
  for (int m = 0; m < kMetricCount; ++m) {
    if (m) out << '\t';
    if (!scores.present[m]) {
      out << '-';
      continue;
    }
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", scores.scores[m].f1);
    out << buffer;
  }
  out << '\n';
  return out.str();
}

}  // namespace corefpipe
