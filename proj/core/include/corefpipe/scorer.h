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

// Coreference metrics: MUC, B-cubed and entity-based CEAF (phi4) with
// their average, the CoNLL score.
//
// Predicted mentions are first aligned one-to-one with gold mentions under
// one of three regimes: exact (equal spans), head (equal heads), or partial
// (the predicted span contains the gold head and lies inside the gold
// span). Aligned predicted mentions take the identity of their gold
// partner; the metrics then compare the two clusterings. Statistics are
// summed over documents before precision and recall are computed.

#ifndef COREFPIPE_SCORER_H_
#define COREFPIPE_SCORER_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corefpipe/conllu.h"
#include "corefpipe/nn.h"

namespace corefpipe {

enum class MatchMode { kExact, kHead, kPartial };

std::string MatchModeName(MatchMode mode);
// "exact", "head" or "partial". Throws DataError otherwise.
MatchMode ParseMatchMode(std::string_view name);

// Mention coordinates shared by gold and prediction.
struct ScoredMention {
  int start = 0;
  int end = 0;
  int head = 0;
};

bool Compatible(const ScoredMention &gold, const ScoredMention &pred,
                MatchMode mode);

// Maximum-cardinality one-to-one matching of compatible pairs. Identical
// spans are paired first, then augmenting paths are searched from the
// leftmost gold mention. Returns the partner of every gold mention or -1.
std::vector<int> AlignMentions(const std::vector<ScoredMention> &gold,
                               const std::vector<ScoredMention> &pred,
                               MatchMode mode);

// Maximum-weight assignment of rows to columns of a non-negative matrix.
// Returns the column of every row or -1.
std::vector<int> MaxWeightAssignment(const nn::Matrix &weights);

// A clustering lists the mention keys of every entity.
using Clustering = std::vector<std::vector<int>>;

// Sufficient statistics of one metric.
struct MetricCounts {
  double recall_num = 0, recall_den = 0;
  double precision_num = 0, precision_den = 0;

  MetricCounts &operator+=(const MetricCounts &other);
};

MetricCounts MucCounts(const Clustering &key, const Clustering &response);
MetricCounts BcubCounts(const Clustering &key, const Clustering &response);
MetricCounts CeafeCounts(const Clustering &key, const Clustering &response);

// Precision, recall and F1 in percent.
struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

Prf ToPrf(const MetricCounts &counts);

struct ScoreReport {
  std::string dataset;
  int documents = 0;
  Prf muc, bcub, ceafe;
  double conll = 0;  // mean of the three F1 scores
};

// Matches empty nodes of two versions of a sentence by dependency head,
// pairs with equal word order first. Returns (gold, pred) token indices.
std::vector<std::pair<int, int>> MatchEmptyNodes(const Sentence &gold,
                                                 const Sentence &pred);

// Scores predicted documents against gold ones, pairing documents by id.
// Throws DataError when the document sets or surface tokens differ.
ScoreReport Score(const std::vector<Document> &gold,
                  const std::vector<Document> &pred, MatchMode mode,
                  bool with_singletons);

// One report per dataset id, in results-table order.
std::vector<ScoreReport> ScoreByDataset(const std::vector<Document> &gold,
                                        const std::vector<Document> &pred,
                                        MatchMode mode, bool with_singletons);

// Datasets in results-table order with an unweighted Avg column; scores
// with one decimal. Rows: CoNLL, MUC, B3 and CEAF-e F1.
std::string ReportTable(const std::vector<ScoreReport> &reports);

// Clusterings of one document pair after alignment, exposed for tests.
struct AlignedClusterings {
  Clustering key;
  Clustering response;
};
AlignedClusterings AlignDocuments(const Document &gold, const Document &pred,
                                  MatchMode mode, bool with_singletons);

}  // namespace corefpipe

#endif  // COREFPIPE_SCORER_H_
