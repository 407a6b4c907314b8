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

// Synthetic CorefUD-style corpora in three invented languages.
//
// Every document talks about one masculine and one feminine person and a
// few objects. Persons are referred to by name, by a gendered pronoun, or,
// in the pro-drop languages xa and xb, by a dropped subject: the sentence
// starts with a verb agreeing in gender and a "#PersPron" empty node
// (deprel nsubj) follows the verb as a zero mention. Language xa also has
// passive clauses with a non-referring "#Gen" agent empty node. Objects are
// "det noun" phrases, optionally with a nested "of NAME" modifier, and
// corefer when the noun repeats.

#ifndef COREFPIPE_SYNTHETIC_H_
#define COREFPIPE_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "corefpipe/conllu.h"

namespace corefpipe {

// "xa_syn", "xb_syn", "xc_syn".
const std::vector<std::string> &SyntheticDatasets();

// Documents of one synthetic dataset. `split` only names the documents.
std::vector<Document> GenerateSynthetic(const std::string &dataset_id,
                                        int documents, uint64_t seed,
                                        const std::string &split = "train");

struct SyntheticCorpusOptions {
  uint64_t seed = 1;
  // Training documents of xa, xb and xc; the sizes differ on purpose.
  std::vector<int> train_documents = {240, 160, 120};
  int dev_documents = 16;
};

// Writes <root>/<id>/<id>-corefud-{train,dev}.conllu for every synthetic
// dataset.
void WriteSyntheticCorpus(const std::filesystem::path &root,
                          const SyntheticCorpusOptions &options = {});

// Path of a dataset split under a data root.
std::filesystem::path DatasetFile(const std::filesystem::path &root,
                                  const std::string &dataset_id,
                                  const std::string &split);

}  // namespace corefpipe

#endif  // COREFPIPE_SYNTHETIC_H_
