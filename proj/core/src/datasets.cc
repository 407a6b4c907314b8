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

#include "corefpipe/datasets.h"

#include <algorithm>

#include "corefpipe/conllu.h"

namespace corefpipe {

const std::vector<DatasetInfo> &KnownDatasets() {
  static const std::vector<DatasetInfo> *datasets = [] {
    auto *list = new std::vector<DatasetInfo>;
    for (const char *id :
         {"ca", "cs_pcedt", "cs_pdt", "cs_pdtsc", "cu", "de", "en_fant",
          "en_gum", "en_litb", "es", "fr_anco", "fr_demo", "fr_litb", "grc",
          "hbo", "hi", "hu_korkor", "hu_szegedkoref", "ko", "la", "lt", "nl",
          "no_bokm", "no_nyno", "pl", "ru", "tr"}) {
      list->push_back({id, LanguageOf(id), false});
    }
    for (const char *id : {"xa_syn", "xb_syn", "xc_syn"}) {
      list->push_back({id, LanguageOf(id), true});
    }
    return list;
  }();
  return *datasets;
}

std::vector<DatasetInfo> SharedTaskDatasets() {
  std::vector<DatasetInfo> result;
  for (const DatasetInfo &info : KnownDatasets()) {
    if (!info.synthetic) result.push_back(info);
  }
  return result;
}

int InferenceMaxLength(std::string_view dataset_id, int default_length) {
  std::string language = LanguageOf(dataset_id);
  if (language == "cu" || language == "grc") return 512;
  return default_length;
}

int TableOrder(std::string_view dataset_id) {
  const auto &known = KnownDatasets();
  auto it = std::find_if(known.begin(), known.end(), [&](const DatasetInfo &d) {
    return d.id == dataset_id;
  });
  return it == known.end() ? -1 : static_cast<int>(it - known.begin());
}

}  // namespace corefpipe
