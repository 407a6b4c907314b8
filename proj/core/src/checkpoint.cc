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

#include "corefpipe/checkpoint.h"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "corefpipe/errors.h"

namespace corefpipe {

namespace fs = std::filesystem;
using nlohmann::json;

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const fs::path &path, const std::string &content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw DataError("cannot write " + path.string());
}

void SaveTensors(const fs::path &path, const nn::ParameterStore &params) {
  json header = json::object();
  header["__metadata__"] = {{"format", "corefpipe"}};
  std::string data;
  for (const nn::Parameter *p : params.All()) {
    size_t begin = data.size();
    size_t bytes = sizeof(double) * p->value.size();
    data.resize(begin + bytes);
    std::memcpy(data.data() + begin, p->value.data(), bytes);
    header[p->name] = {{"dtype", "F64"},
                       {"shape", {p->value.rows(), p->value.cols()}},
                       {"data_offsets", {begin, begin + bytes}}};
  }
  std::string text = header.dump();
  while (text.size() % 8 != 0) text.push_back(' ');
  uint64_t length = text.size();
  std::string out(8, '\0');
  for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((length >> (8 * i)) & 0xff);
  WriteFile(path, out + text + data);
}

void LoadTensors(const fs::path &path, nn::ParameterStore &params) {
  std::string bytes;
  try {
    bytes = ReadFile(path);
  } catch (const DataError &e) {
    throw ModelError(e.what());
  }
  if (bytes.size() < 8) throw ModelError(path.string() + " is truncated");
  uint64_t length = 0;
  for (int i = 7; i >= 0; --i) {
    length = (length << 8) | static_cast<unsigned char>(bytes[i]);
  }
  if (8 + length > bytes.size()) throw ModelError(path.string() + " is truncated");
  json header;
  try {
    header = json::parse(bytes.substr(8, length));
  } catch (const json::exception &e) {
    throw ModelError("invalid tensor header in " + path.string() + ": " + e.what());
  }
  const char *data = bytes.data() + 8 + length;
  const size_t data_size = bytes.size() - 8 - length;

  std::set<std::string> seen;
  for (nn::Parameter *p : params.All()) {
    auto it = header.find(p->name);
    if (it == header.end()) throw ModelError("checkpoint lacks tensor " + p->name);
    const json &entry = *it;
    if (entry.value("dtype", "") != "F64") {
      throw ModelError("tensor " + p->name + " is not F64");
    }
    auto shape = entry.at("shape").get<std::vector<int64_t>>();
    if (shape.size() != 2 || shape[0] != p->value.rows() ||
        shape[1] != p->value.cols()) {
      throw ModelError("dimension mismatch for tensor " + p->name + ": model " +
                       std::to_string(p->value.rows()) + "x" +
                       std::to_string(p->value.cols()) + ", checkpoint " +
                       entry.at("shape").dump());
    }
    auto offsets = entry.at("data_offsets").get<std::vector<size_t>>();
    size_t expected = sizeof(double) * p->value.size();
    if (offsets.size() != 2 || offsets[1] - offsets[0] != expected ||
        offsets[1] > data_size) {
      throw ModelError("bad data offsets for tensor " + p->name);
    }
    std::memcpy(p->value.data(), data + offsets[0], expected);
    seen.insert(p->name);
  }
  for (auto &[name, entry] : header.items()) {
    if (name != "__metadata__" && !seen.count(name)) {
      throw ModelError("checkpoint has unexpected tensor " + name);
    }
  }
}

void SaveCheckpoint(const fs::path &dir, const std::string &config,
                    const std::string &tokenizer_reference,
                    const nn::ParameterStore &params) {
  fs::create_directories(dir);
  WriteFile(dir / kConfigFile, config);
  WriteFile(dir / kTokenizerFile,
            json{{"tokenizer", tokenizer_reference}}.dump(2) + "\n");
  SaveTensors(dir / kWeightsFile, params);
}

CheckpointFiles ReadCheckpoint(const fs::path &dir) {
  for (const char *name : {kConfigFile, kTokenizerFile, kWeightsFile}) {
    if (!fs::exists(dir / name)) {
      throw ModelError("checkpoint " + dir.string() + " lacks " + name);
    }
  }
  CheckpointFiles files;
  files.config = ReadFile(dir / kConfigFile);
  try {
    files.tokenizer =
        json::parse(ReadFile(dir / kTokenizerFile)).at("tokenizer").get<std::string>();
  } catch (const json::exception &e) {
    throw ModelError("invalid tokenizer.json in " + dir.string() + ": " + e.what());
  }
  return files;
}

}  // namespace corefpipe
