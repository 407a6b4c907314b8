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

#ifndef COREFPIPE_ENCODER_H_
#define COREFPIPE_ENCODER_H_

#include <random>
#include <span>
#include <string>
#include <vector>

#include "corefpipe/nn.h"

namespace corefpipe {

// Contextual encoder contract: subword ids in, one D-dimensional vector per
// subword out. Positions must be relative so that inference windows may be
// longer than training windows.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual int hidden_size() const = 0;
  virtual std::string id() const = 0;
  virtual nn::Var Forward(nn::Tape &tape, std::span<const int> ids) const = 0;
};

struct EncoderConfig {
  int vocab_size = 4096;
  int hidden = 32;
  int layers = 2;
  int heads = 4;
  int ffn = 64;
  int max_distance = 32;  // relative positions are clipped to +-max_distance
  double dropout = 0.0;

  bool operator==(const EncoderConfig &) const = default;
};

// Relative bias used to initialize every layer, heads x (2 * max_distance + 1).
nn::Matrix DirectionalBias(int heads, int max_distance);

// Small pre-norm transformer trained from scratch. Attention scores carry a
// learned bias per head and clipped relative distance; there are no
// absolute position embeddings.
class ToyEncoder : public Encoder {
 public:
  ToyEncoder(nn::ParameterStore &store, const std::string &prefix,
             const EncoderConfig &config, std::mt19937_64 &rng);

  int hidden_size() const override { return config_.hidden; }
  std::string id() const override { return "toy-transformer"; }
  nn::Var Forward(nn::Tape &tape, std::span<const int> ids) const override;

  const EncoderConfig &config() const { return config_; }

 private:
  struct Layer {
    nn::LayerNormalization attention_norm;
    nn::Linear qkv;
    nn::Linear output;
    nn::Parameter *relative_bias;  // heads x (2R+1)
    nn::LayerNormalization ffn_norm;
    nn::Linear ffn_in;
    nn::Linear ffn_out;
  };

  EncoderConfig config_;
  nn::Parameter *embedding_;
  std::vector<Layer> layers_;
  nn::LayerNormalization final_norm_;
};

}  // namespace corefpipe

#endif  // COREFPIPE_ENCODER_H_
