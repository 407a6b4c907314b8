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

#include "corefpipe/nn.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "corefpipe/errors.h"

namespace corefpipe::nn {

namespace {

bool Open(const Matrix &mask, int i, int j) {
  return mask.size() == 0 || mask(i, j) != 0.0;
}

void CheckSameShape(const Matrix &a, const Matrix &b, const char *op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ModelError(std::string(op) + ": shape mismatch " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

}  // namespace

// ParameterStore.

Parameter &ParameterStore::Add(const std::string &name, Matrix value) {
  if (by_name_.count(name)) {
    throw ModelError("duplicate parameter " + name);
  }
  Parameter &param = params_.emplace_back();
  param.name = name;
  param.grad = Matrix::Zero(value.rows(), value.cols());
  param.value = std::move(value);
  by_name_[name] = &param;
  return param;
}

Parameter *ParameterStore::Find(const std::string &name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

const Parameter *ParameterStore::Find(const std::string &name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

std::vector<Parameter *> ParameterStore::All() {
  std::vector<Parameter *> all;
  for (Parameter &p : params_) all.push_back(&p);
  return all;
}

std::vector<const Parameter *> ParameterStore::All() const {
  std::vector<const Parameter *> all;
  for (const Parameter &p : params_) all.push_back(&p);
  return all;
}

int64_t ParameterStore::ScalarCount() const {
  int64_t count = 0;
  for (const Parameter &p : params_) count += p.value.size();
  return count;
}

void ParameterStore::ZeroGrad() {
  for (Parameter &p : params_) p.grad.setZero();
}

void ParameterStore::CopyValuesFrom(const ParameterStore &other) {
  for (Parameter &p : params_) {
    const Parameter *source = other.Find(p.name);
    if (source == nullptr) throw ModelError("missing parameter " + p.name);
    CheckSameShape(p.value, source->value, p.name.c_str());
    p.value = source->value;
  }
}

// Tape.

const Matrix &Var::value() const { return tape->value(id); }

Tape::Tape(bool with_gradients, bool training, std::mt19937_64 *rng)
    : with_gradients_(with_gradients), training_(training), rng_(rng) {
  if (training_ && rng_ == nullptr) {
    throw ModelError("training tape needs a random generator");
  }
  nodes_.reserve(256);
}

const Matrix &Tape::value(int id) const {
  const Node &node = nodes_[id];
  return node.ref != nullptr ? *node.ref : node.value;
}

Var Tape::Constant(Matrix value) {
  Node &node = nodes_.emplace_back();
  node.value = std::move(value);
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::Param(Parameter &param) {
  Node &node = nodes_.emplace_back();
  node.ref = &param.value;
  node.param = &param;
  node.needs_grad = with_gradients_;
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::Detach(Var v) { return Constant(v.value()); }

Var Tape::Push(Matrix value, std::initializer_list<Var> inputs,
               std::function<void()> backward) {
  return Push(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
              std::move(backward));
}

Var Tape::Push(Matrix value, std::span<const Var> inputs,
               std::function<void()> backward) {
  bool needs = false;
  if (with_gradients_) {
    for (const Var &v : inputs) {
      if (v.tape != this) throw ModelError("operands on different tapes");
      needs = needs || nodes_[v.id].needs_grad;
    }
  }
  Node &node = nodes_.emplace_back();
  node.value = std::move(value);
  node.needs_grad = needs;
  if (needs) node.backward = std::move(backward);
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::AccumulateRow(int id, int row, const Eigen::Ref<const Matrix> &g) {
  Node &node = nodes_[id];
  if (!node.needs_grad) return;
  if (node.grad.size() == 0) {
    const Matrix &v = value(id);
    node.grad = Matrix::Zero(v.rows(), v.cols());
  }
  node.grad.row(row) += g;
}

void Tape::AccumulateParamRows(Parameter &param, std::span<const int> rows,
                               const Matrix &g) {
  for (size_t k = 0; k < rows.size(); ++k) {
    param.grad.row(rows[k]) += g.row(k);
  }
}

void Tape::Backward(Var loss) {
  if (!with_gradients_) throw ModelError("tape records no gradients");
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw ModelError("backward needs a scalar");
  }
  if (!nodes_[loss.id].needs_grad) return;
  nodes_[loss.id].grad = Matrix::Ones(1, 1);
  for (int id = loss.id; id >= 0; --id) {
    Node &node = nodes_[id];
    if (node.grad.size() == 0) continue;
    if (node.backward) node.backward();
    if (node.param != nullptr) node.param->grad += node.grad;
  }
}

// Operations.

Var MatMul(Var a, Var b) {
  Tape &t = *a.tape;
  if (a.cols() != b.rows()) {
    throw ModelError("MatMul: inner dimensions " + std::to_string(a.cols()) +
                     " and " + std::to_string(b.rows()));
  }
  int ia = a.id, ib = b.id, self = t.size();
  return t.Push(a.value() * b.value(), {a, b}, [&t, ia, ib, self] {
    const Matrix &g = t.grad(self);
    if (t.needs_grad(ia)) t.Accumulate(ia, g * t.value(ib).transpose());
    if (t.needs_grad(ib)) t.Accumulate(ib, t.value(ia).transpose() * g);
  });
}

Var MatMulTransposed(Var a, Var b) {
  Tape &t = *a.tape;
  if (a.cols() != b.cols()) {
    throw ModelError("MatMulTransposed: widths " + std::to_string(a.cols()) +
                     " and " + std::to_string(b.cols()));
  }
  int ia = a.id, ib = b.id, self = t.size();
  return t.Push(a.value() * b.value().transpose(), {a, b}, [&t, ia, ib, self] {
    const Matrix &g = t.grad(self);
    if (t.needs_grad(ia)) t.Accumulate(ia, g * t.value(ib));
    if (t.needs_grad(ib)) t.Accumulate(ib, g.transpose() * t.value(ia));
  });
}

Var Add(Var a, Var b) {
  Tape &t = *a.tape;
  CheckSameShape(a.value(), b.value(), "Add");
  int ia = a.id, ib = b.id, self = t.size();
  return t.Push(a.value() + b.value(), {a, b}, [&t, ia, ib, self] {
    t.Accumulate(ia, t.grad(self));
    t.Accumulate(ib, t.grad(self));
  });
}

Var AddRowVector(Var x, Var row) {
  Tape &t = *x.tape;
  if (row.rows() != 1 || row.cols() != x.cols()) {
    throw ModelError("AddRowVector: shape mismatch");
  }
  Matrix out = x.value();
  out.rowwise() += row.value().row(0);
  int ix = x.id, ir = row.id, self = t.size();
  return t.Push(std::move(out), {x, row}, [&t, ix, ir, self] {
    const Matrix &g = t.grad(self);
    t.Accumulate(ix, g);
    if (t.needs_grad(ir)) t.Accumulate(ir, g.colwise().sum());
  });
}

Var Mul(Var a, Var b) {
  Tape &t = *a.tape;
  CheckSameShape(a.value(), b.value(), "Mul");
  int ia = a.id, ib = b.id, self = t.size();
  return t.Push(a.value().cwiseProduct(b.value()), {a, b}, [&t, ia, ib, self] {
    const Matrix &g = t.grad(self);
    if (t.needs_grad(ia)) t.Accumulate(ia, g.cwiseProduct(t.value(ib)));
    if (t.needs_grad(ib)) t.Accumulate(ib, g.cwiseProduct(t.value(ia)));
  });
}

Var Scale(Var x, double factor) {
  Tape &t = *x.tape;
  int ix = x.id, self = t.size();
  return t.Push(x.value() * factor, {x}, [&t, ix, self, factor] {
    t.Accumulate(ix, t.grad(self) * factor);
  });
}

Var Relu(Var x) {
  Tape &t = *x.tape;
  int ix = x.id, self = t.size();
  return t.Push(x.value().cwiseMax(0.0), {x}, [&t, ix, self] {
    const Matrix &v = t.value(ix);
    t.Accumulate(ix, t.grad(self).cwiseProduct(
                         (v.array() > 0.0).cast<double>().matrix()));
  });
}

Var Tanh(Var x) {
  Tape &t = *x.tape;
  int ix = x.id, self = t.size();
  return t.Push(x.value().array().tanh().matrix(), {x}, [&t, ix, self] {
    const Matrix &y = t.value(self);
    t.Accumulate(ix, t.grad(self).cwiseProduct(
                         (1.0 - y.array().square()).matrix()));
  });
}

Var Dropout(Var x, double rate) {
  Tape &t = *x.tape;
  if (!t.training() || rate <= 0.0) return x;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double keep = 1.0 - rate;
  auto mask = std::make_shared<Matrix>(x.rows(), x.cols());
  for (int i = 0; i < mask->size(); ++i) {
    mask->data()[i] = uniform(*t.rng()) < keep ? 1.0 / keep : 0.0;
  }
  int ix = x.id, self = t.size();
  return t.Push(x.value().cwiseProduct(*mask), {x}, [&t, ix, self, mask] {
    t.Accumulate(ix, t.grad(self).cwiseProduct(*mask));
  });
}

Var LayerNorm(Var x, Var gain, Var bias, double eps) {
  Tape &t = *x.tape;
  const Matrix &v = x.value();
  const int n = v.cols();
  auto normalized = std::make_shared<Matrix>(v.rows(), n);
  auto inv_std = std::make_shared<Eigen::VectorXd>(v.rows());
  for (int i = 0; i < v.rows(); ++i) {
    double mean = v.row(i).mean();
    double var = (v.row(i).array() - mean).square().mean();
    double inv = 1.0 / std::sqrt(var + eps);
    (*inv_std)(i) = inv;
    normalized->row(i) = (v.row(i).array() - mean) * inv;
  }
  Matrix out = normalized->array().rowwise() * gain.value().row(0).array();
  out.rowwise() += bias.value().row(0);
  int ix = x.id, ig = gain.id, ib = bias.id, self = t.size();
  return t.Push(std::move(out), {x, gain, bias},
                [&t, ix, ig, ib, self, normalized, inv_std, n] {
                  const Matrix &g = t.grad(self);
                  if (t.needs_grad(ig)) {
                    t.Accumulate(ig, g.cwiseProduct(*normalized).colwise().sum());
                  }
                  if (t.needs_grad(ib)) t.Accumulate(ib, g.colwise().sum());
                  if (!t.needs_grad(ix)) return;
                  Matrix dxhat = g.array().rowwise() * t.value(ig).row(0).array();
                  Matrix dx(g.rows(), n);
                  for (int i = 0; i < g.rows(); ++i) {
                    double mean_d = dxhat.row(i).mean();
                    double mean_dx =
                        dxhat.row(i).cwiseProduct(normalized->row(i)).mean();
                    dx.row(i) = (*inv_std)(i) *
                                (dxhat.row(i).array() - mean_d -
                                 normalized->row(i).array() * mean_dx);
                  }
                  t.Accumulate(ix, dx);
                });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw ModelError("ConcatCols: no parts");
  Tape &t = *parts[0].tape;
  int rows = parts[0].rows(), cols = 0;
  for (const Var &p : parts) {
    if (p.rows() != rows) throw ModelError("ConcatCols: row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<std::pair<int, int>> layout;  // (id, column offset)
  int offset = 0;
  for (const Var &p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    layout.emplace_back(p.id, offset);
    offset += p.cols();
  }
  int self = t.size();
  return t.Push(std::move(out), parts, [&t, self, layout] {
    const Matrix &g = t.grad(self);
    for (auto [id, off] : layout) {
      if (t.needs_grad(id)) {
        t.Accumulate(id, g.middleCols(off, t.value(id).cols()));
      }
    }
  });
}

Var ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) throw ModelError("ConcatRows: no parts");
  Tape &t = *parts[0].tape;
  int cols = parts[0].cols(), rows = 0;
  for (const Var &p : parts) {
    if (p.cols() != cols) throw ModelError("ConcatRows: column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<std::pair<int, int>> layout;
  int offset = 0;
  for (const Var &p : parts) {
    out.middleRows(offset, p.rows()) = p.value();
    layout.emplace_back(p.id, offset);
    offset += p.rows();
  }
  int self = t.size();
  return t.Push(std::move(out), parts, [&t, self, layout] {
    const Matrix &g = t.grad(self);
    for (auto [id, off] : layout) {
      if (t.needs_grad(id)) {
        t.Accumulate(id, g.middleRows(off, t.value(id).rows()));
      }
    }
  });
}

Var SliceCols(Var x, int begin, int count) {
  Tape &t = *x.tape;
  if (begin < 0 || count < 0 || begin + count > x.cols()) {
    throw ModelError("SliceCols: out of range");
  }
  int ix = x.id, self = t.size();
  return t.Push(x.value().middleCols(begin, count), {x},
                [&t, ix, self, begin, count] {
                  const Matrix &v = t.value(ix);
                  Matrix g = Matrix::Zero(v.rows(), v.cols());
                  g.middleCols(begin, count) = t.grad(self);
                  t.Accumulate(ix, g);
                });
}

Var SliceRows(Var x, int begin, int count) {
  Tape &t = *x.tape;
  if (begin < 0 || count < 0 || begin + count > x.rows()) {
    throw ModelError("SliceRows: out of range");
  }
  int ix = x.id, self = t.size();
  return t.Push(x.value().middleRows(begin, count), {x},
                [&t, ix, self, begin, count] {
                  const Matrix &v = t.value(ix);
                  Matrix g = Matrix::Zero(v.rows(), v.cols());
                  g.middleRows(begin, count) = t.grad(self);
                  t.Accumulate(ix, g);
                });
}

Var GatherRows(Var x, std::span<const int> rows) {
  Tape &t = *x.tape;
  const Matrix &v = x.value();
  Matrix out(rows.size(), v.cols());
  for (size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= v.rows()) {
      throw ModelError("GatherRows: row " + std::to_string(rows[k]) +
                       " out of range");
    }
    out.row(k) = v.row(rows[k]);
  }
  std::vector<int> index(rows.begin(), rows.end());
  int ix = x.id, self = t.size();
  return t.Push(std::move(out), {x}, [&t, ix, self, index] {
    const Matrix &g = t.grad(self);
    for (size_t k = 0; k < index.size(); ++k) {
      t.AccumulateRow(ix, index[k], g.row(k));
    }
  });
}

Var Lookup(Tape &tape, Parameter &table, std::span<const int> rows) {
  Matrix out(rows.size(), table.value.cols());
  for (size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= table.value.rows()) {
      throw ModelError("Lookup: id " + std::to_string(rows[k]) +
                       " outside table " + table.name);
    }
    out.row(k) = table.value.row(rows[k]);
  }
  if (!tape.with_gradients()) return tape.Constant(std::move(out));
  // Route the gradient through a parameter leaf so that the node is marked
  // as needing one, but scatter rows instead of materializing the table.
  Var leaf = tape.Param(table);
  std::vector<int> index(rows.begin(), rows.end());
  Tape *t = &tape;
  Parameter *p = &table;
  int self = tape.size();
  Var result = tape.Push(std::move(out), {leaf}, [t, p, self, index] {
    t->AccumulateParamRows(*p, index, t->grad(self));
  });
  return result;
}

Var Sum(Var x) {
  Tape &t = *x.tape;
  Matrix out(1, 1);
  out(0, 0) = x.value().sum();
  int ix = x.id, self = t.size();
  return t.Push(std::move(out), {x}, [&t, ix, self] {
    const Matrix &v = t.value(ix);
    t.Accumulate(ix, Matrix::Constant(v.rows(), v.cols(), t.grad(self)(0, 0)));
  });
}

Matrix SoftmaxRows(const Matrix &x, const Matrix &mask) {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    double max = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < x.cols(); ++j) {
      if (Open(mask, i, j)) max = std::max(max, x(i, j));
    }
    if (max == -std::numeric_limits<double>::infinity()) {
      throw ModelError("softmax row without open entries");
    }
    double total = 0.0;
    for (int j = 0; j < x.cols(); ++j) {
      if (Open(mask, i, j)) {
        out(i, j) = std::exp(x(i, j) - max);
        total += out(i, j);
      }
    }
    out.row(i) /= total;
  }
  return out;
}

Var Softmax(Var x, const Matrix &mask) {
  Tape &t = *x.tape;
  if (mask.size() != 0) CheckSameShape(x.value(), mask, "Softmax");
  int ix = x.id, self = t.size();
  return t.Push(SoftmaxRows(x.value(), mask), {x}, [&t, ix, self] {
    const Matrix &p = t.value(self);
    const Matrix &g = t.grad(self);
    Eigen::VectorXd dot = g.cwiseProduct(p).rowwise().sum();
    Matrix dx = p.cwiseProduct(g);
    dx -= p.cwiseProduct(dot.replicate(1, p.cols()));
    t.Accumulate(ix, dx);
  });
}

Var AddRelativeBias(Var scores, Var bias) {
  Tape &t = *scores.tape;
  const int buckets = bias.cols();
  if (bias.rows() != 1 || buckets % 2 != 1) {
    throw ModelError("AddRelativeBias: bias must be 1 x (2R+1)");
  }
  const int radius = buckets / 2;
  const Matrix &b = bias.value();
  Matrix out = scores.value();
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) {
      out(i, j) += b(0, std::clamp(j - i, -radius, radius) + radius);
    }
  }
  int is = scores.id, ib = bias.id, self = t.size();
  return t.Push(std::move(out), {scores, bias},
                [&t, is, ib, self, radius, buckets] {
                  const Matrix &g = t.grad(self);
                  t.Accumulate(is, g);
                  if (!t.needs_grad(ib)) return;
                  Matrix gb = Matrix::Zero(1, buckets);
                  for (int i = 0; i < g.rows(); ++i) {
                    for (int j = 0; j < g.cols(); ++j) {
                      gb(0, std::clamp(j - i, -radius, radius) + radius) +=
                          g(i, j);
                    }
                  }
                  t.Accumulate(ib, gb);
                });
}

Var CrossEntropy(Var logits, std::span<const int> targets, const Matrix &mask) {
  Tape &t = *logits.tape;
  const Matrix &x = logits.value();
  if (static_cast<int>(targets.size()) != x.rows()) {
    throw ModelError("CrossEntropy: " + std::to_string(targets.size()) +
                     " targets for " + std::to_string(x.rows()) + " rows");
  }
  if (mask.size() != 0) CheckSameShape(x, mask, "CrossEntropy");
  auto probs = std::make_shared<Matrix>(SoftmaxRows(x, mask));
  double loss = 0.0;
  for (int i = 0; i < x.rows(); ++i) {
    int target = targets[i];
    if (target < 0) continue;
    if (target >= x.cols() || !Open(mask, i, target)) {
      throw ModelError("CrossEntropy: target " + std::to_string(target) +
                       " not available in row " + std::to_string(i));
    }
    loss -= std::log((*probs)(i, target));
  }
  Matrix out(1, 1);
  out(0, 0) = loss;
  std::vector<int> tgt(targets.begin(), targets.end());
  int il = logits.id, self = t.size();
  return t.Push(std::move(out), {logits}, [&t, il, self, probs, tgt] {
    double g = t.grad(self)(0, 0);
    Matrix dx = Matrix::Zero(probs->rows(), probs->cols());
    for (int i = 0; i < probs->rows(); ++i) {
      if (tgt[i] < 0) continue;
      dx.row(i) = probs->row(i) * g;
      dx(i, tgt[i]) -= g;
    }
    t.Accumulate(il, dx);
  });
}

Var BinaryCrossEntropy(Var logits, std::span<const int> targets) {
  Tape &t = *logits.tape;
  const Matrix &z = logits.value();
  if (z.cols() != 1 || static_cast<int>(targets.size()) != z.rows()) {
    throw ModelError("BinaryCrossEntropy: expects one logit per target");
  }
  double loss = 0.0;
  for (int i = 0; i < z.rows(); ++i) {
    double v = z(i, 0);
    loss += std::max(v, 0.0) - v * targets[i] + std::log1p(std::exp(-std::abs(v)));
  }
  Matrix out(1, 1);
  out(0, 0) = loss;
  std::vector<int> tgt(targets.begin(), targets.end());
  int il = logits.id, self = t.size();
  return t.Push(std::move(out), {logits}, [&t, il, self, tgt] {
    double g = t.grad(self)(0, 0);
    const Matrix &z = t.value(il);
    Matrix dx(z.rows(), 1);
    for (int i = 0; i < z.rows(); ++i) {
      dx(i, 0) = (Sigmoid(z(i, 0)) - tgt[i]) * g;
    }
    t.Accumulate(il, dx);
  });
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix GlorotUniform(int rows, int cols, std::mt19937_64 &rng) {
  double limit = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Matrix Normal(int rows, int cols, double stddev, std::mt19937_64 &rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

// Layers.

Linear::Linear(ParameterStore &store, const std::string &name, int in, int out,
               std::mt19937_64 &rng)
    : in_(in), out_(out) {
  weight_ = &store.Add(name + "/w", GlorotUniform(in, out, rng));
  bias_ = &store.Add(name + "/b", Matrix::Zero(1, out));
}

Var Linear::operator()(Var x) const {
  Tape &t = *x.tape;
  return AddRowVector(MatMul(x, t.Param(*weight_)), t.Param(*bias_));
}

FeedForward::FeedForward(ParameterStore &store, const std::string &name,
                         int in, int hidden, int out, double dropout,
                         std::mt19937_64 &rng)
    : first_(store, name + "/hidden", in, hidden, rng),
      second_(store, name + "/output", hidden, out, rng),
      dropout_(dropout) {}

Var FeedForward::operator()(Var x) const {
  return second_(Dropout(Relu(first_(x)), dropout_));
}

LayerNormalization::LayerNormalization(ParameterStore &store,
                                       const std::string &name, int dim) {
  gain_ = &store.Add(name + "/gain", Matrix::Ones(1, dim));
  bias_ = &store.Add(name + "/bias", Matrix::Zero(1, dim));
}

Var LayerNormalization::operator()(Var x) const {
  Tape &t = *x.tape;
  return LayerNorm(x, t.Param(*gain_), t.Param(*bias_));
}

}  // namespace corefpipe::nn
