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

// Minimal reverse-mode automatic differentiation over dense matrices.
//
// A Tape records the operations of one forward pass. Every value is a
// row-major matrix of doubles; Var is a handle to a value on a tape.
// Parameters live in a ParameterStore outside the tape, and Backward()
// accumulates into their `grad` matrices. A tape created without gradients
// records no backward closures and may run concurrently with other tapes
// over the same parameters.

#ifndef COREFPIPE_NN_H_
#define COREFPIPE_NN_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace corefpipe::nn {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore &) = delete;
  ParameterStore &operator=(const ParameterStore &) = delete;

  // Registers a parameter; names must be unique.
  Parameter &Add(const std::string &name, Matrix value);
  Parameter *Find(const std::string &name);
  const Parameter *Find(const std::string &name) const;

  std::vector<Parameter *> All();
  std::vector<const Parameter *> All() const;
  size_t size() const { return params_.size(); }
  int64_t ScalarCount() const;

  void ZeroGrad();

  // Copies values from another store with the same names and shapes.
  void CopyValuesFrom(const ParameterStore &other);

 private:
  std::deque<Parameter> params_;
  std::map<std::string, Parameter *> by_name_;
};

class Tape;

struct Var {
  Tape *tape = nullptr;
  int id = -1;

  const Matrix &value() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }
};

class Tape {
 public:
  // `rng` drives dropout and is only used when `training` is set.
  explicit Tape(bool with_gradients = false, bool training = false,
                std::mt19937_64 *rng = nullptr);
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  bool with_gradients() const { return with_gradients_; }
  bool training() const { return training_; }
  std::mt19937_64 *rng() const { return rng_; }

  Var Constant(Matrix value);
  // Leaf referencing a parameter without copying it.
  Var Param(Parameter &param);
  // Leaf holding a copy of the value with no gradient path.
  Var Detach(Var v);

  const Matrix &value(int id) const;
  const Matrix &grad(int id) const { return nodes_[id].grad; }
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }

  // Runs backpropagation from a 1x1 value.
  void Backward(Var loss);

  // Records a node. `inputs` decide whether the result needs a gradient;
  // `backward` is dropped when it does not.
  Var Push(Matrix value, std::initializer_list<Var> inputs,
           std::function<void()> backward);
  Var Push(Matrix value, std::span<const Var> inputs,
           std::function<void()> backward);

  // Adds `g` to the gradient of node `id` when it needs one.
  template <typename Expr>
  void Accumulate(int id, const Expr &g) {
    Node &node = nodes_[id];
    if (!node.needs_grad) return;
    if (node.grad.size() == 0) {
      node.grad = g;
    } else {
      node.grad += g;
    }
  }
  void AccumulateRow(int id, int row, const Eigen::Ref<const Matrix> &g);
  // Adds `g` to parameter gradients directly (embedding lookups).
  void AccumulateParamRows(Parameter &param, std::span<const int> rows,
                           const Matrix &g);

  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    const Matrix *ref = nullptr;
    Matrix grad;
    Parameter *param = nullptr;
    bool needs_grad = false;
    std::function<void()> backward;
  };

  std::vector<Node> nodes_;
  bool with_gradients_;
  bool training_;
  std::mt19937_64 *rng_;
};

// Operations. All inputs must live on the same tape.
Var MatMul(Var a, Var b);            // a b
Var MatMulTransposed(Var a, Var b);  // a b^T
Var Add(Var a, Var b);
Var AddRowVector(Var x, Var row);  // adds a 1xC row to every row of x
Var Mul(Var a, Var b);             // elementwise
Var Scale(Var x, double factor);
Var Relu(Var x);
Var Tanh(Var x);
Var Dropout(Var x, double rate);
Var LayerNorm(Var x, Var gain, Var bias, double eps = 1e-5);
Var ConcatCols(std::span<const Var> parts);
Var ConcatRows(std::span<const Var> parts);
Var SliceCols(Var x, int begin, int count);
Var SliceRows(Var x, int begin, int count);
Var GatherRows(Var x, std::span<const int> rows);
// Rows of a parameter matrix (embedding lookup).
Var Lookup(Tape &tape, Parameter &table, std::span<const int> rows);
Var Sum(Var x);
// Row-wise softmax; entries with mask(i, j) == 0 get probability 0. An
// empty mask means no masking. Every row needs at least one open entry.
Var Softmax(Var x, const Matrix &mask = Matrix());
// Adds b[clip(j - i, -R, R) + R] to entry (i, j); `bias` is 1 x (2R+1).
Var AddRelativeBias(Var scores, Var bias);

// Sum over rows of -log softmax(logits)[row, target]. Rows with target < 0
// are skipped; `mask` as in Softmax.
Var CrossEntropy(Var logits, std::span<const int> targets,
                 const Matrix &mask = Matrix());
// Sum of binary cross-entropies of a column of logits against 0/1 targets.
Var BinaryCrossEntropy(Var logits, std::span<const int> targets);

// Plain value helpers.
Matrix SoftmaxRows(const Matrix &x, const Matrix &mask = Matrix());
double Sigmoid(double x);

// Parameter initializers.
Matrix GlorotUniform(int rows, int cols, std::mt19937_64 &rng);
Matrix Normal(int rows, int cols, double stddev, std::mt19937_64 &rng);

// y = x W + b.
class Linear {
 public:
  Linear() = default;
  Linear(ParameterStore &store, const std::string &name, int in, int out,
         std::mt19937_64 &rng);

  Var operator()(Var x) const;
  int in() const { return in_; }
  int out() const { return out_; }
  Parameter *weight() const { return weight_; }
  Parameter *bias() const { return bias_; }

 private:
  Parameter *weight_ = nullptr;
  Parameter *bias_ = nullptr;
  int in_ = 0;
  int out_ = 0;
};

// Dense -> ReLU -> dropout -> dense.
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParameterStore &store, const std::string &name, int in,
              int hidden, int out, double dropout, std::mt19937_64 &rng);

  Var operator()(Var x) const;
  const Linear &first() const { return first_; }
  const Linear &second() const { return second_; }

 private:
  Linear first_;
  Linear second_;
  double dropout_ = 0.0;
};

class LayerNormalization {
 public:
  LayerNormalization() = default;
  LayerNormalization(ParameterStore &store, const std::string &name, int dim);

  Var operator()(Var x) const;

 private:
  Parameter *gain_ = nullptr;
  Parameter *bias_ = nullptr;
};

}  // namespace corefpipe::nn

#endif  // COREFPIPE_NN_H_
