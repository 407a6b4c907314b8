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

#include "corefpipe/scorer.h"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "corefpipe/datasets.h"
#include "corefpipe/errors.h"

namespace corefpipe {

std::string MatchModeName(MatchMode mode) {
  switch (mode) {
    case MatchMode::kExact: return "exact";
    case MatchMode::kHead: return "head";
    default: return "partial";
  }
}

MatchMode ParseMatchMode(std::string_view name) {
  if (name == "exact") return MatchMode::kExact;
  if (name == "head") return MatchMode::kHead;
  if (name == "partial") return MatchMode::kPartial;
  throw DataError("unknown match mode '" + std::string(name) +
                  "', expected exact, head or partial");
}

bool Compatible(const ScoredMention &gold, const ScoredMention &pred,
                MatchMode mode) {
  switch (mode) {
    case MatchMode::kExact:
      return gold.start == pred.start && gold.end == pred.end;
    case MatchMode::kHead:
      return gold.head == pred.head;
    default:
      return pred.start <= gold.head && gold.head <= pred.end &&
             gold.start <= pred.start && pred.end <= gold.end;
  }
}

std::vector<int> AlignMentions(const std::vector<ScoredMention> &gold,
                               const std::vector<ScoredMention> &pred,
                               MatchMode mode) {
  const int g = gold.size(), p = pred.size();
  auto by_position = [](const std::vector<ScoredMention> &list) {
    std::vector<int> order(list.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      if (list[a].start != list[b].start) return list[a].start < list[b].start;
      return list[a].end < list[b].end;
    });
    return order;
  };
  std::vector<int> gold_order = by_position(gold), pred_order = by_position(pred);

  std::vector<std::vector<int>> adjacent(g);
  for (int i : gold_order) {
    for (int j : pred_order) {
      if (Compatible(gold[i], pred[j], mode)) adjacent[i].push_back(j);
    }
  }
  std::vector<int> gold_match(g, -1), pred_match(p, -1);
  for (int i : gold_order) {
    for (int j : adjacent[i]) {
      if (pred_match[j] < 0 && gold[i].start == pred[j].start &&
          gold[i].end == pred[j].end) {
        gold_match[i] = j;
        pred_match[j] = i;
        break;
      }
    }
  }
  std::vector<char> visited(p);
  std::function<bool(int)> augment = [&](int i) {
    for (int j : adjacent[i]) {
      if (visited[j]) continue;
      visited[j] = 1;
      if (pred_match[j] < 0 || augment(pred_match[j])) {
        gold_match[i] = j;
        pred_match[j] = i;
        return true;
      }
    }
    return false;
  };
  for (int i : gold_order) {
    if (gold_match[i] >= 0) continue;
    std::fill(visited.begin(), visited.end(), 0);
    augment(i);
  }
  return gold_match;
}

std::vector<int> MaxWeightAssignment(const nn::Matrix &weights) {
  const int rows = weights.rows(), cols = weights.cols();
  const int n = std::max(rows, cols);
  if (n == 0) return {};
  double top = rows > 0 && cols > 0 ? weights.maxCoeff() : 0.0;
  // Minimum-cost assignment on the padded square matrix top - w.
  auto cost = [&](int i, int j) {
    double w = i < rows && j < cols ? weights(i, j) : 0.0;
    return top - w;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1), v(n + 1);
  std::vector<int> match(n + 1), way(n + 1);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> result(rows, -1);
  for (int j = 1; j <= n; ++j) {
    int i = match[j] - 1;
    if (i < rows && j - 1 < cols) result[i] = j - 1;
  }
  return result;
}

MetricCounts &MetricCounts::operator+=(const MetricCounts &other) {
  recall_num += other.recall_num;
  recall_den += other.recall_den;
  precision_num += other.precision_num;
  precision_den += other.precision_den;
  return *this;
}

namespace {

std::map<int, int> ClusterOf(const Clustering &clustering) {
  std::map<int, int> cluster;
  for (size_t c = 0; c < clustering.size(); ++c) {
    for (int m : clustering[c]) cluster[m] = c;
  }
  return cluster;
}

// Returns (numerator, denominator) of MUC recall of `key` against `response`.
std::pair<double, double> MucSide(const Clustering &key, const Clustering &response) {
  std::map<int, int> cluster = ClusterOf(response);
  double num = 0, den = 0;
  for (const auto &entity : key) {
    std::set<int> parts;
    int unmapped = 0;
    for (int m : entity) {
      auto it = cluster.find(m);
      if (it == cluster.end()) {
        ++unmapped;
      } else {
        parts.insert(it->second);
      }
    }
    num += static_cast<double>(entity.size()) - (parts.size() + unmapped);
    den += entity.size() - 1.0;
  }
  return {num, den};
}

std::pair<double, double> BcubSide(const Clustering &key, const Clustering &response) {
  std::map<int, int> cluster = ClusterOf(response);
  double num = 0, den = 0;
  for (const auto &entity : key) {
    std::map<int, int> overlap;
    for (int m : entity) {
      auto it = cluster.find(m);
      if (it != cluster.end()) ++overlap[it->second];
    }
    for (const auto &[c, count] : overlap) {
      num += static_cast<double>(count) * count / entity.size();
    }
    den += entity.size();
  }
  return {num, den};
}

}  // namespace

MetricCounts MucCounts(const Clustering &key, const Clustering &response) {
  MetricCounts counts;
  std::tie(counts.recall_num, counts.recall_den) = MucSide(key, response);
  std::tie(counts.precision_num, counts.precision_den) = MucSide(response, key);
  return counts;
}

MetricCounts BcubCounts(const Clustering &key, const Clustering &response) {
  MetricCounts counts;
  std::tie(counts.recall_num, counts.recall_den) = BcubSide(key, response);
  std::tie(counts.precision_num, counts.precision_den) = BcubSide(response, key);
  return counts;
}

MetricCounts CeafeCounts(const Clustering &key, const Clustering &response) {
  nn::Matrix similarity = nn::Matrix::Zero(key.size(), response.size());
  std::map<int, int> cluster = ClusterOf(response);
  for (size_t i = 0; i < key.size(); ++i) {
    std::map<int, int> overlap;
    for (int m : key[i]) {
      auto it = cluster.find(m);
      if (it != cluster.end()) ++overlap[it->second];
    }
    for (const auto &[j, count] : overlap) {
      similarity(i, j) = 2.0 * count / (key[i].size() + response[j].size());
    }
  }
  double best = 0;
  std::vector<int> assignment = MaxWeightAssignment(similarity);
  for (size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= 0) best += similarity(i, assignment[i]);
  }
  MetricCounts counts;
  counts.recall_num = counts.precision_num = best;
  counts.recall_den = key.size();
  counts.precision_den = response.size();
  return counts;
}

Prf ToPrf(const MetricCounts &counts) {
  Prf prf;
  if (counts.precision_den > 0) {
    prf.precision = 100.0 * counts.precision_num / counts.precision_den;
  }
  if (counts.recall_den > 0) prf.recall = 100.0 * counts.recall_num / counts.recall_den;
  if (prf.precision + prf.recall > 0) {
    prf.f1 = 2 * prf.precision * prf.recall / (prf.precision + prf.recall);
  }
  return prf;
}

std::vector<std::pair<int, int>> MatchEmptyNodes(const Sentence &gold,
                                                 const Sentence &pred) {
  struct Node {
    int index;
    std::string head;
    int order;
  };
  auto collect = [](const Sentence &sentence) {
    std::vector<Node> nodes;
    for (size_t i = 0; i < sentence.tokens.size(); ++i) {
      const Token &t = sentence.tokens[i];
      if (t.is_empty) nodes.push_back({static_cast<int>(i), t.DependencyHead(), t.WordIndex()});
    }
    return nodes;
  };
  std::vector<Node> g = collect(gold), p = collect(pred);
  std::vector<char> gold_used(g.size()), pred_used(p.size());
  std::vector<std::pair<int, int>> pairs;
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t i = 0; i < g.size(); ++i) {
      if (gold_used[i]) continue;
      for (size_t j = 0; j < p.size(); ++j) {
        if (pred_used[j] || g[i].head != p[j].head) continue;
        if (pass == 0 && g[i].order != p[j].order) continue;
        gold_used[i] = pred_used[j] = 1;
        pairs.emplace_back(g[i].index, p[j].index);
        break;
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

namespace {

// Coordinates of predicted token positions in the gold document: twice the
// gold position for shared tokens, odd values for unmatched empty nodes.
std::vector<int> PredictedCoordinates(const Document &gold, const Document &pred) {
  if (gold.sentences.size() != pred.sentences.size()) {
    throw DataError("document " + gold.doc_id + ": " +
                    std::to_string(gold.sentences.size()) + " gold sentences but " +
                    std::to_string(pred.sentences.size()) + " predicted");
  }
  std::vector<int> coords;
  int gold_offset = 0;
  for (size_t s = 0; s < gold.sentences.size(); ++s) {
    const Sentence &gs = gold.sentences[s];
    const Sentence &ps = pred.sentences[s];
    std::vector<int> gold_word;  // word k -> gold position
    gold_word.push_back(2 * gold_offset - 1);
    for (size_t i = 0; i < gs.tokens.size(); ++i) {
      if (!gs.tokens[i].is_empty) gold_word.push_back(2 * (gold_offset + i));
    }
    std::vector<const std::string *> gold_forms, pred_forms;
    for (const Token &t : gs.tokens) {
      if (!t.is_empty) gold_forms.push_back(&t.form);
    }
    for (const Token &t : ps.tokens) {
      if (!t.is_empty) pred_forms.push_back(&t.form);
    }
    if (!std::equal(gold_forms.begin(), gold_forms.end(), pred_forms.begin(),
                    pred_forms.end(),
                    [](const std::string *a, const std::string *b) { return *a == *b; })) {
      throw DataError("surface mismatch in document " + gold.doc_id +
                      " sentence " + std::to_string(s + 1));
    }
    std::map<int, int> matched;
    for (auto [gi, pi] : MatchEmptyNodes(gs, ps)) matched[pi] = gi;
    for (size_t i = 0; i < ps.tokens.size(); ++i) {
      const Token &t = ps.tokens[i];
      if (!t.is_empty) {
        coords.push_back(gold_word[t.WordIndex()]);
      } else if (matched.count(i)) {
        coords.push_back(2 * (gold_offset + matched[i]));
      } else {
        int k = std::min<int>(t.WordIndex(), gold_word.size() - 1);
        coords.push_back(k == 0 ? gold_word[0] : gold_word[k] + 1);
      }
    }
    gold_offset += gs.tokens.size();
  }
  return coords;
}

std::vector<const Entity *> Kept(const Document &doc, bool with_singletons) {
  std::vector<const Entity *> kept;
  for (const Entity &e : doc.entities) {
    if (with_singletons || e.mentions.size() > 1) kept.push_back(&e);
  }
  return kept;
}

}  // namespace

AlignedClusterings AlignDocuments(const Document &gold, const Document &pred,
                                  MatchMode mode, bool with_singletons) {
  std::vector<int> coords = PredictedCoordinates(gold, pred);
  std::vector<ScoredMention> gold_mentions, pred_mentions;
  AlignedClusterings result;
  for (const Entity *e : Kept(gold, with_singletons)) {
    std::vector<int> keys;
    for (const Mention &m : e->mentions) {
      keys.push_back(gold_mentions.size());
      gold_mentions.push_back({2 * m.start, 2 * m.end, 2 * m.head});
    }
    result.key.push_back(keys);
  }
  std::vector<std::vector<int>> pred_index;
  for (const Entity *e : Kept(pred, with_singletons)) {
    std::vector<int> indices;
    for (const Mention &m : e->mentions) {
      indices.push_back(pred_mentions.size());
      pred_mentions.push_back({coords.at(m.start), coords.at(m.end), coords.at(m.head)});
    }
    pred_index.push_back(indices);
  }
  std::vector<int> partner = AlignMentions(gold_mentions, pred_mentions, mode);
  std::vector<int> key_of(pred_mentions.size(), -1);
  for (size_t g = 0; g < partner.size(); ++g) {
    if (partner[g] >= 0) key_of[partner[g]] = g;
  }
  for (size_t p = 0; p < key_of.size(); ++p) {
    if (key_of[p] < 0) key_of[p] = gold_mentions.size() + p;
  }
  for (const auto &indices : pred_index) {
    std::vector<int> keys;
    for (int p : indices) keys.push_back(key_of[p]);
    result.response.push_back(keys);
  }
  return result;
}

ScoreReport Score(const std::vector<Document> &gold,
                  const std::vector<Document> &pred, MatchMode mode,
                  bool with_singletons) {
  std::map<std::string, const Document *> by_id;
  for (const Document &doc : pred) {
    if (!by_id.emplace(doc.doc_id, &doc).second) {
      throw DataError("duplicate predicted document " + doc.doc_id);
    }
  }
  if (by_id.size() != gold.size()) {
    throw DataError("gold has " + std::to_string(gold.size()) +
                    " documents but prediction has " + std::to_string(by_id.size()));
  }
  MetricCounts muc, bcub, ceafe;
  ScoreReport report;
  for (const Document &doc : gold) {
    auto it = by_id.find(doc.doc_id);
    if (it == by_id.end()) {
      throw DataError("document id mismatch: " + doc.doc_id + " not predicted");
    }
    AlignedClusterings aligned = AlignDocuments(doc, *it->second, mode, with_singletons);
    muc += MucCounts(aligned.key, aligned.response);
    bcub += BcubCounts(aligned.key, aligned.response);
    ceafe += CeafeCounts(aligned.key, aligned.response);
    if (report.dataset.empty()) report.dataset = doc.dataset_id;
    ++report.documents;
  }
  report.muc = ToPrf(muc);
  report.bcub = ToPrf(bcub);
  report.ceafe = ToPrf(ceafe);
  report.conll = (report.muc.f1 + report.bcub.f1 + report.ceafe.f1) / 3.0;
  return report;
}

namespace {

bool TableLess(const std::string &a, const std::string &b) {
  int oa = TableOrder(a), ob = TableOrder(b);
  if (oa < 0) oa = std::numeric_limits<int>::max();
  if (ob < 0) ob = std::numeric_limits<int>::max();
  if (oa != ob) return oa < ob;
  return a < b;
}

std::string OneDecimal(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.1f", value);
  return buffer;
}

}  // namespace

std::vector<ScoreReport> ScoreByDataset(const std::vector<Document> &gold,
                                        const std::vector<Document> &pred,
                                        MatchMode mode, bool with_singletons) {
  std::map<std::string, std::vector<Document>> gold_sets;
  std::map<std::string, std::string> dataset_of;
  for (const Document &doc : gold) {
    gold_sets[doc.dataset_id].push_back(doc);
    dataset_of[doc.doc_id] = doc.dataset_id;
  }
  std::map<std::string, std::vector<Document>> pred_sets;
  for (const Document &doc : pred) {
    auto it = dataset_of.find(doc.doc_id);
    if (it == dataset_of.end()) {
      throw DataError("document id mismatch: " + doc.doc_id + " not in gold");
    }
    pred_sets[it->second].push_back(doc);
  }
  std::vector<std::string> names;
  for (const auto &[name, docs] : gold_sets) names.push_back(name);
  std::sort(names.begin(), names.end(), TableLess);
  std::vector<ScoreReport> reports;
  for (const std::string &name : names) {
    ScoreReport report = Score(gold_sets[name], pred_sets[name], mode, with_singletons);
    report.dataset = name;
    reports.push_back(report);
  }
  return reports;
}

std::string ReportTable(const std::vector<ScoreReport> &input) {
  if (input.empty()) throw DataError("no scores to report");
  std::vector<ScoreReport> reports = input;
  std::stable_sort(reports.begin(), reports.end(),
                   [](const ScoreReport &a, const ScoreReport &b) {
                     return TableLess(a.dataset, b.dataset);
                   });
  std::ostringstream out;
  out << "metric";
  for (const ScoreReport &r : reports) out << '\t' << r.dataset;
  out << "\tAvg\n";
  using Getter = double (*)(const ScoreReport &);
  const std::pair<const char *, Getter> rows[] = {
      {"CoNLL", [](const ScoreReport &r) { return r.conll; }},
      {"MUC", [](const ScoreReport &r) { return r.muc.f1; }},
      {"B3", [](const ScoreReport &r) { return r.bcub.f1; }},
      {"CEAF-e", [](const ScoreReport &r) { return r.ceafe.f1; }},
  };
  for (const auto &[name, get] : rows) {
    out << name;
    double sum = 0;
    for (const ScoreReport &r : reports) {
      out << '\t' << OneDecimal(get(r));
      sum += get(r);
    }
    out << '\t' << OneDecimal(sum / reports.size()) << '\n';
  }
  return out.str();
}

}  // namespace corefpipe
