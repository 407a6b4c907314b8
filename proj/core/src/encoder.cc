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

#include "corefpipe/encoder.h"

#include <cmath>

#include "corefpipe/errors.h"
#include "json_util.h"

namespace corefpipe {

// Initial relative bias: even heads decay leftward, odd heads rightward, with
// slopes halving every two heads. A token's attention mass on itself then
// depends on its distance to the window edges, which gives the heads a
// recency signal from the first step.
nn::Matrix DirectionalBias(int heads, int max_distance) {
  nn::Matrix bias = nn::Matrix::Zero(heads, 2 * max_distance + 1);
  for (int h = 0; h < heads; ++h) {
    const double slope = std::ldexp(1.0, -(1 + h / 2));
    for (int r = -max_distance; r <= max_distance; ++r) {
      if ((h % 2 == 0) == (r < 0)) bias(h, r + max_distance) = -slope * std::abs(r);
    }
  }
  return bias;
}

ToyEncoder::ToyEncoder(nn::ParameterStore &store, const std::string &prefix,
                       const EncoderConfig &config, std::mt19937_64 &rng)
    : config_(config) {
  if (config.hidden % config.heads != 0) {
    throw ModelError("encoder hidden size must be divisible by heads");
  }
  const int d = config.hidden;
  embedding_ = &store.Add(prefix + "/embedding",
                          nn::Normal(config.vocab_size, d, 1.0, rng));
  for (int l = 0; l < config.layers; ++l) {
    std::string name = prefix + "/layer" + std::to_string(l);
    Layer layer;
    layer.attention_norm = nn::LayerNormalization(store, name + "/attention_norm", d);
    layer.qkv = nn::Linear(store, name + "/qkv", d, 3 * d, rng);
    layer.output = nn::Linear(store, name + "/attention_output", d, d, rng);
    layer.relative_bias = &store.Add(name + "/relative_bias",
                                     DirectionalBias(config.heads, config.max_distance));
    layer.ffn_norm = nn::LayerNormalization(store, name + "/ffn_norm", d);
    layer.ffn_in = nn::Linear(store, name + "/ffn_in", d, config.ffn, rng);
    layer.ffn_out = nn::Linear(store, name + "/ffn_out", config.ffn, d, rng);
    layers_.push_back(layer);
  }
  final_norm_ = nn::LayerNormalization(store, prefix + "/final_norm", d);
}

nn::Var ToyEncoder::Forward(nn::Tape &tape, std::span<const int> ids) const {
  if (ids.empty()) throw ModelError("encoder input is empty");
  const int d = config_.hidden;
  const int head_dim = d / config_.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  nn::Var x = nn::Lookup(tape, *embedding_, ids);
  for (const Layer &layer : layers_) {
    nn::Var qkv = layer.qkv(layer.attention_norm(x));
    nn::Var bias = tape.Param(*layer.relative_bias);
    std::vector<nn::Var> heads;
    for (int h = 0; h < config_.heads; ++h) {
      nn::Var q = nn::SliceCols(qkv, h * head_dim, head_dim);
      nn::Var k = nn::SliceCols(qkv, d + h * head_dim, head_dim);
      nn::Var v = nn::SliceCols(qkv, 2 * d + h * head_dim, head_dim);
      nn::Var scores = nn::Scale(nn::MatMulTransposed(q, k), scale);
      scores = nn::AddRelativeBias(scores, nn::SliceRows(bias, h, 1));
      heads.push_back(nn::MatMul(nn::Softmax(scores), v));
    }
    nn::Var attended = layer.output(nn::ConcatCols(heads));
    x = nn::Add(x, nn::Dropout(attended, config_.dropout));
    nn::Var hidden = nn::Relu(layer.ffn_in(layer.ffn_norm(x)));
    x = nn::Add(x, nn::Dropout(layer.ffn_out(hidden), config_.dropout));
  }
  return final_norm_(x);
}

}  // namespace corefpipe

namespace corefpipe::internal {

nlohmann::json EncoderToJson(const EncoderConfig &config) {
  return {{"vocab_size", config.vocab_size}, {"hidden", config.hidden},
          {"layers", config.layers},         {"heads", config.heads},
          {"ffn", config.ffn},               {"max_distance", config.max_distance},
          {"dropout", config.dropout}};
}

EncoderConfig EncoderFromJson(const nlohmann::json &json) {
  EncoderConfig config;
  Read(json, "vocab_size", config.vocab_size);
  Read(json, "hidden", config.hidden);
  Read(json, "layers", config.layers);
  Read(json, "heads", config.heads);
  Read(json, "ffn", config.ffn);
  Read(json, "max_distance", config.max_distance);
  Read(json, "dropout", config.dropout);
  if (config.vocab_size < 2 || config.hidden < 1 || config.layers < 0 ||
      config.heads < 1 || config.ffn < 1 || config.max_distance < 0) {
    throw ModelError("invalid encoder configuration " + json.dump());
  }
  return config;
}

nlohmann::json ParseJson(std::string_view text, const std::string &what) {
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ModelError("invalid JSON in " + what + ": " + e.what());
  }
  if (!json.is_object()) throw ModelError(what + " must be a JSON object");
  return json;
}

}  // namespace corefpipe::internal
