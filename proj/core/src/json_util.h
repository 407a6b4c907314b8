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

// JSON helpers shared by the configuration readers. Not installed.

#ifndef COREFPIPE_SRC_JSON_UTIL_H_
#define COREFPIPE_SRC_JSON_UTIL_H_

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "corefpipe/encoder.h"
#include "corefpipe/errors.h"

namespace corefpipe::internal {

nlohmann::json EncoderToJson(const EncoderConfig &config);
EncoderConfig EncoderFromJson(const nlohmann::json &json);

// Parses a JSON object from `text`. Syntax errors and other top-level
// values become ModelError mentioning `what`.
nlohmann::json ParseJson(std::string_view text, const std::string &what);

// Reads `json[key]` into `out` when present.
template <typename T>
void Read(const nlohmann::json &json, const char *key, T &out) {
  auto it = json.find(key);
  if (it == json.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw ModelError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace corefpipe::internal

#endif  // COREFPIPE_SRC_JSON_UTIL_H_
