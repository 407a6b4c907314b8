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

#ifndef COREFPIPE_OPTIMIZER_H_
#define COREFPIPE_OPTIMIZER_H_

#include <map>
#include <memory>
#include <string>

#include "corefpipe/nn.h"

namespace corefpipe {

// Updates parameters from their accumulated gradients. The learning rate is
// supplied per step by the schedule.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void Step(nn::ParameterStore &params, double lr) = 0;
  virtual std::string name() const = 0;
};

class SgdOptimizer : public Optimizer {
 public:
  void Step(nn::ParameterStore &params, double lr) override;
  std::string name() const override { return "sgd"; }
};

class AdamOptimizer : public Optimizer {
 public:
  AdamOptimizer(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void Step(nn::ParameterStore &params, double lr) override;
  std::string name() const override { return "adam"; }

 private:
  struct Moments {
    nn::Matrix m, v;
  };
  double beta1_, beta2_, eps_;
  long step_ = 0;
  std::map<std::string, Moments> state_;
};

// Adafactor with factored second moments for matrices, no first moment,
// update clipping and an externally supplied learning rate.
class AdafactorOptimizer : public Optimizer {
 public:
  AdafactorOptimizer(double decay_exponent = -0.8, double clip_threshold = 1.0,
                     double eps = 1e-30)
      : decay_exponent_(decay_exponent),
        clip_threshold_(clip_threshold),
        eps_(eps) {}

  void Step(nn::ParameterStore &params, double lr) override;
  std::string name() const override { return "adafactor"; }

 private:
  struct Factors {
    Eigen::VectorXd row, col;  // factored (matrices)
    nn::Matrix full;           // unfactored (vectors)
  };
  double decay_exponent_, clip_threshold_, eps_;
  long step_ = 0;
  std::map<std::string, Factors> state_;
};

// "sgd", "adam" or "adafactor". Throws DataError otherwise.
std::unique_ptr<Optimizer> MakeOptimizer(const std::string &name);

}  // namespace corefpipe

#endif  // COREFPIPE_OPTIMIZER_H_
