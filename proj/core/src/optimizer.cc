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

#include "corefpipe/optimizer.h"

#include <cmath>

#include "corefpipe/errors.h"

namespace corefpipe {

void SgdOptimizer::Step(nn::ParameterStore &params, double lr) {
  for (nn::Parameter *p : params.All()) p->value -= lr * p->grad;
}

void AdamOptimizer::Step(nn::ParameterStore &params, double lr) {
  ++step_;
  const double correction1 = 1.0 - std::pow(beta1_, step_);
  const double correction2 = 1.0 - std::pow(beta2_, step_);
  for (nn::Parameter *p : params.All()) {
    Moments &s = state_[p->name];
    if (s.m.size() == 0) {
      s.m = nn::Matrix::Zero(p->value.rows(), p->value.cols());
      s.v = nn::Matrix::Zero(p->value.rows(), p->value.cols());
    }
    s.m = beta1_ * s.m + (1.0 - beta1_) * p->grad;
    s.v = beta2_ * s.v + (1.0 - beta2_) * p->grad.cwiseAbs2();
    p->value.array() -= lr * (s.m.array() / correction1) /
                        ((s.v.array() / correction2).sqrt() + eps_);
  }
}

void AdafactorOptimizer::Step(nn::ParameterStore &params, double lr) {
  ++step_;
  const double decay = 1.0 - std::pow(static_cast<double>(step_), decay_exponent_);
  for (nn::Parameter *p : params.All()) {
    Factors &s = state_[p->name];
    nn::Matrix squared = p->grad.cwiseAbs2().array() + eps_;
    nn::Matrix update;
    const bool factored = p->value.rows() > 1 && p->value.cols() > 1;
    if (factored) {
      if (s.row.size() == 0) {
        s.row = Eigen::VectorXd::Zero(p->value.rows());
        s.col = Eigen::VectorXd::Zero(p->value.cols());
      }
      s.row = decay * s.row + (1.0 - decay) * squared.rowwise().mean();
      s.col = decay * s.col + (1.0 - decay) * squared.colwise().mean().transpose();
      // V = R C^T / mean(R).
      double row_mean = s.row.mean();
      nn::Matrix estimate = (s.row * s.col.transpose()) / row_mean;
      update = p->grad.array() / estimate.array().sqrt();
    } else {
      if (s.full.size() == 0) {
        s.full = nn::Matrix::Zero(p->value.rows(), p->value.cols());
      }
      s.full = decay * s.full + (1.0 - decay) * squared;
      update = p->grad.array() / s.full.array().sqrt();
    }
    double rms = std::sqrt(update.squaredNorm() / update.size());
    update /= std::max(1.0, rms / clip_threshold_);
    p->value -= lr * update;
  }
}

std::unique_ptr<Optimizer> MakeOptimizer(const std::string &name) {
  if (name == "sgd") return std::make_unique<SgdOptimizer>();
  if (name == "adam") return std::make_unique<AdamOptimizer>();
  if (name == "adafactor") return std::make_unique<AdafactorOptimizer>();
  throw DataError("unknown optimizer '" + name + "'");
}

}  // namespace corefpipe
