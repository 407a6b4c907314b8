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

#ifndef COREFPIPE_DATASETS_H_
#define COREFPIPE_DATASETS_H_

#include <string>
#include <string_view>
#include <vector>

namespace corefpipe {

struct DatasetInfo {
  std::string id;        // e.g. "cs_pdt"
  std::string language;  // e.g. "cs"
  bool synthetic = false;
};

// The 27 shared-task datasets in results-table order, followed by the
// synthetic datasets produced by the bundled generator.
const std::vector<DatasetInfo> &KnownDatasets();

// The shared-task datasets only.
std::vector<DatasetInfo> SharedTaskDatasets();

// Inference segment length for a dataset: 2560 tokens, except 512 for the
// two PROIEL treebanks (cu, grc).
int InferenceMaxLength(std::string_view dataset_id, int default_length = 2560);

// Position of a dataset in the results table, or -1 if unknown.
int TableOrder(std::string_view dataset_id);

}  // namespace corefpipe

#endif  // COREFPIPE_DATASETS_H_
