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

// Model checkpoints.
//
// A checkpoint is a directory holding
//
//   weights.safetensors   named F64 tensors, one per parameter
//   config.json           model configuration and label vocabularies
//   tokenizer.json        tokenizer reference
//
// The weights file follows the safetensors layout: an 8-byte little-endian
// header length, a JSON header mapping names to dtype, shape and byte
// offsets, then the raw data.

#ifndef COREFPIPE_CHECKPOINT_H_
#define COREFPIPE_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "corefpipe/nn.h"

namespace corefpipe {

inline constexpr char kWeightsFile[] = "weights.safetensors";
inline constexpr char kConfigFile[] = "config.json";
inline constexpr char kTokenizerFile[] = "tokenizer.json";

void SaveTensors(const std::filesystem::path &path,
                 const nn::ParameterStore &params);

// Loads values into an already constructed store. Every parameter must be
// present with the same shape and no extra tensors may exist; otherwise
// ModelError names the offending tensor.
void LoadTensors(const std::filesystem::path &path, nn::ParameterStore &params);

// Writes config.json, tokenizer.json and the weights into `dir`.
void SaveCheckpoint(const std::filesystem::path &dir, const std::string &config,
                    const std::string &tokenizer_reference,
                    const nn::ParameterStore &params);

struct CheckpointFiles {
  std::string config;     // contents of config.json
  std::string tokenizer;  // tokenizer reference
};

// Reads config.json and tokenizer.json. Throws ModelError when missing.
CheckpointFiles ReadCheckpoint(const std::filesystem::path &dir);

std::string ReadFile(const std::filesystem::path &path);
void WriteFile(const std::filesystem::path &path, const std::string &content);

}  // namespace corefpipe

#endif  // COREFPIPE_CHECKPOINT_H_
