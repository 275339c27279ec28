// Copyright 2026 The guivec Authors.
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

#pragma once

// Minimal differentiable layers. Every layer keeps its parameters and their
// gradient accumulators side by side; backward() adds into the accumulators
// and callers zero them between optimizer steps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "guivec/error.hpp"

namespace guivec::nn {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using RowVector = Eigen::Matrix<T, 1, Eigen::Dynamic>;

using Rng = std::mt19937_64;

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }
// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

template <typename It>
void shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1),
                   first + static_cast<std::ptrdiff_t>(uniform_index(rng, i)));
  }
}

// A named trainable tensor with its gradient accumulator. Vectors are stored
// as 1 x n rows and reported with rank 1.
template <typename T>
struct Parameter {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;
  bool is_vector = false;

  Parameter() = default;
  Parameter(std::string n, Eigen::Index rows, Eigen::Index cols, bool vec = false)
      : name(std::move(n)), value(Matrix<T>::Zero(rows, cols)), grad(Matrix<T>::Zero(rows, cols)),
        is_vector(vec) {}

  void zero_grad() { grad.setZero(); }
  std::vector<std::size_t> shape() const {
    if (is_vector) return {static_cast<std::size_t>(value.cols())};
    return {static_cast<std::size_t>(value.rows()), static_cast<std::size_t>(value.cols())};
  }
  Eigen::Index size() const { return value.size(); }
};

template <typename T>
void init_uniform(Matrix<T>& m, double bound, Rng& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(uniform(rng, -bound, bound));
}

inline double glorot_bound(Eigen::Index fan_in, Eigen::Index fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

// y = x W + b, with x given as a batch of rows.
template <typename T>
class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(Eigen::Index in, Eigen::Index out, const std::string& name)
      : weight(name + ".w", in, out), bias(name + ".b", 1, out, true) {}

  Eigen::Index in_dim() const { return weight.value.rows(); }
  Eigen::Index out_dim() const { return weight.value.cols(); }

  void init_glorot(Rng& rng) {
    init_uniform(weight.value, glorot_bound(in_dim(), out_dim()), rng);
    bias.value.setZero();
  }

  Matrix<T> forward(const Matrix<T>& x) const {
    check_input(x);
    Matrix<T> y = x * weight.value;
    y.rowwise() += bias.value.row(0);
    return y;
  }

  // Accumulates dL/dW and dL/db; returns dL/dx (empty when not requested).
  Matrix<T> backward(const Matrix<T>& x, const Matrix<T>& grad_y, bool need_input_grad = true) {
    check_input(x);
    if (grad_y.rows() != x.rows() || grad_y.cols() != out_dim()) {
      throw ShapeMismatch("dense backward: gradient shape does not match output");
    }
    weight.grad.noalias() += x.transpose() * grad_y;
    bias.grad.row(0) += grad_y.colwise().sum();
    if (!need_input_grad) return {};
    return grad_y * weight.value.transpose();
  }

  void zero_grad() {
    weight.zero_grad();
    bias.zero_grad();
  }
  std::vector<Parameter<T>*> parameters() { return {&weight, &bias}; }

  Parameter<T> weight;
  Parameter<T> bias;

 private:
  void check_input(const Matrix<T>& x) const {
    if (x.cols() != in_dim()) {
      throw ShapeMismatch("dense layer " + weight.name + " expects " + std::to_string(in_dim()) +
                          " inputs, got " + std::to_string(x.cols()));
    }
  }
};

template <typename T>
Matrix<T> relu(const Matrix<T>& x) {
  return x.cwiseMax(T(0));
}

// Gradient of relu at pre-activation `x`; zero where x <= 0.
template <typename T>
Matrix<T> relu_backward(const Matrix<T>& x, const Matrix<T>& grad_y) {
  return (x.array() > T(0)).select(grad_y, Matrix<T>::Zero(grad_y.rows(), grad_y.cols()));
}

enum class RecurrentActivation { kTanh, kRelu };

template <typename T>
struct RnnCache {
  std::vector<std::size_t> order;        // sorted slot -> sequence index
  std::vector<Eigen::Index> lengths;     // per sorted slot, descending
  std::vector<Eigen::Index> active;      // per step: number of running sequences
  std::vector<Matrix<T>> inputs;         // per step: active x in
  std::vector<Matrix<T>> hidden;         // per step: active x hidden (post-activation)
  Matrix<T> outputs;                     // sequences x hidden, caller order
};

// Vanilla recurrent layer: h_t = act(x_t W_ih + h_{t-1} W_hh + b), h_0 = 0.
// The output of a sequence is its final hidden state; an empty sequence
// yields zeros in batch mode.
template <typename T>
class RecurrentLayer {
 public:
  RecurrentLayer() = default;
  RecurrentLayer(Eigen::Index in, Eigen::Index hidden, const std::string& name,
                 RecurrentActivation act = RecurrentActivation::kTanh)
      : w_ih(name + ".w_ih", in, hidden),
        w_hh(name + ".w_hh", hidden, hidden),
        b(name + ".b", 1, hidden, true),
        activation(act) {}

  Eigen::Index in_dim() const { return w_ih.value.rows(); }
  Eigen::Index hidden_dim() const { return w_hh.value.rows(); }

  void init_glorot(Rng& rng) {
    init_uniform(w_ih.value, glorot_bound(in_dim(), hidden_dim()), rng);
    init_uniform(w_hh.value, glorot_bound(hidden_dim(), hidden_dim()), rng);
    b.value.setZero();
  }

  RowVector<T> forward(const Matrix<T>& sequence) const {
    if (sequence.rows() == 0) throw EmptySequence("recurrent layer needs at least one input");
    return forward_batch({&sequence}).outputs.row(0);
  }

  RnnCache<T> forward_batch(const std::vector<const Matrix<T>*>& sequences) const {
    RnnCache<T> cache;
    const std::size_t n = sequences.size();
    cache.order.resize(n);
    std::iota(cache.order.begin(), cache.order.end(), std::size_t{0});
    for (const Matrix<T>* s : sequences) {
      if (s->rows() > 0 && s->cols() != in_dim()) {
        throw ShapeMismatch("recurrent layer expects inputs of width " + std::to_string(in_dim()));
      }
    }
    std::stable_sort(cache.order.begin(), cache.order.end(), [&](std::size_t a, std::size_t c) {
      return sequences[a]->rows() > sequences[c]->rows();
    });
    cache.lengths.resize(n);
    for (std::size_t j = 0; j < n; ++j) cache.lengths[j] = sequences[cache.order[j]]->rows();
    const Eigen::Index steps = n ? cache.lengths[0] : 0;
    cache.outputs = Matrix<T>::Zero(static_cast<Eigen::Index>(n), hidden_dim());

    for (Eigen::Index t = 0; t < steps; ++t) {
      Eigen::Index active = 0;
      while (active < static_cast<Eigen::Index>(n) && cache.lengths[static_cast<std::size_t>(active)] > t) ++active;
      Matrix<T> x(active, in_dim());
      for (Eigen::Index j = 0; j < active; ++j) x.row(j) = sequences[cache.order[static_cast<std::size_t>(j)]]->row(t);
      Matrix<T> pre = x * w_ih.value;
      if (t > 0) pre.noalias() += cache.hidden.back().topRows(active) * w_hh.value;
      pre.rowwise() += b.value.row(0);
      Matrix<T> h = apply(pre);
      for (Eigen::Index j = 0; j < active; ++j) {
        if (cache.lengths[static_cast<std::size_t>(j)] == t + 1) {
          cache.outputs.row(static_cast<Eigen::Index>(cache.order[static_cast<std::size_t>(j)])) = h.row(j);
        }
      }
      cache.active.push_back(active);
      cache.inputs.push_back(std::move(x));
      cache.hidden.push_back(std::move(h));
    }
    return cache;
  }

  // Back-propagation through time. `grad_outputs` is sequences x hidden in
  // caller order. Returns per-sequence input gradients when requested.
  std::vector<Matrix<T>> backward_batch(const RnnCache<T>& cache, const Matrix<T>& grad_outputs,
                                        bool need_input_grads = false) {
    const std::size_t n = cache.order.size();
    if (grad_outputs.rows() != static_cast<Eigen::Index>(n) || grad_outputs.cols() != hidden_dim()) {
      throw ShapeMismatch("recurrent backward: gradient shape does not match outputs");
    }
    std::vector<Matrix<T>> input_grads;
    if (need_input_grads) {
      input_grads.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        input_grads[cache.order[j]] = Matrix<T>::Zero(cache.lengths[j], in_dim());
      }
    }
    const auto steps = static_cast<Eigen::Index>(cache.hidden.size());
    Matrix<T> carry = Matrix<T>::Zero(static_cast<Eigen::Index>(n), hidden_dim());
    for (Eigen::Index t = steps - 1; t >= 0; --t) {
      const Eigen::Index active = cache.active[static_cast<std::size_t>(t)];
      for (Eigen::Index j = 0; j < active; ++j) {
        if (cache.lengths[static_cast<std::size_t>(j)] == t + 1) {
          carry.row(j) += grad_outputs.row(static_cast<Eigen::Index>(cache.order[static_cast<std::size_t>(j)]));
        }
      }
      const Matrix<T>& h = cache.hidden[static_cast<std::size_t>(t)];
      Matrix<T> grad_pre = derivative(h, carry.topRows(active));
      w_ih.grad.noalias() += cache.inputs[static_cast<std::size_t>(t)].transpose() * grad_pre;
      b.grad.row(0) += grad_pre.colwise().sum();
      if (need_input_grads) {
        Matrix<T> gx = grad_pre * w_ih.value.transpose();
        for (Eigen::Index j = 0; j < active; ++j) {
          input_grads[cache.order[static_cast<std::size_t>(j)]].row(t) = gx.row(j);
        }
      }
      if (t > 0) {
        const Matrix<T>& prev = cache.hidden[static_cast<std::size_t>(t - 1)];
        w_hh.grad.noalias() += prev.topRows(active).transpose() * grad_pre;
        carry.topRows(active) = grad_pre * w_hh.value.transpose();
      }
    }
    return input_grads;
  }

  void zero_grad() {
    w_ih.zero_grad();
    w_hh.zero_grad();
    b.zero_grad();
  }
  std::vector<Parameter<T>*> parameters() { return {&w_ih, &w_hh, &b}; }

  Parameter<T> w_ih;
  Parameter<T> w_hh;
  Parameter<T> b;
  RecurrentActivation activation = RecurrentActivation::kTanh;

 private:
  Matrix<T> apply(const Matrix<T>& pre) const {
    if (activation == RecurrentActivation::kRelu) return pre.cwiseMax(T(0));
    return pre.array().tanh().matrix();
  }
  // Derivative expressed through the post-activation value.
  Matrix<T> derivative(const Matrix<T>& h, const Matrix<T>& grad_h) const {
    if (activation == RecurrentActivation::kRelu) {
      return (h.array() > T(0)).select(grad_h, Matrix<T>::Zero(grad_h.rows(), grad_h.cols()));
    }
    return (grad_h.array() * (T(1) - h.array().square())).matrix();
  }
};

template <typename T>
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(Eigen::Index rows, Eigen::Index dim, const std::string& name)
      : table(name, rows, dim) {}

  Eigen::Index rows() const { return table.value.rows(); }
  Eigen::Index dim() const { return table.value.cols(); }

  void init_uniform(Rng& rng, double bound = 0.1) { nn::init_uniform(table.value, bound, rng); }

  RowVector<T> lookup(Eigen::Index index) const {
    check(index);
    return table.value.row(index);
  }

  // Scatter-add: repeated indices accumulate.
  void accumulate_grad(Eigen::Index index, const RowVector<T>& grad) {
    check(index);
    if (grad.size() != dim()) throw ShapeMismatch("embedding gradient width mismatch");
    table.grad.row(index) += grad;
  }

  void zero_grad() { table.zero_grad(); }
  std::vector<Parameter<T>*> parameters() { return {&table}; }

  Parameter<T> table;

 private:
  void check(Eigen::Index index) const {
    if (index < 0 || index >= rows()) {
      throw IndexOutOfRange("embedding index " + std::to_string(index) + " outside table of " +
                            std::to_string(rows()));
    }
  }
};

struct CrossEntropyResult {
  double loss = 0.0;
  Eigen::RowVectorXd grad;  // softmax(x) - onehot(class)
};

// -x[class] + log sum_c exp(x[c]), evaluated with max subtraction.
template <typename Derived>
CrossEntropyResult cross_entropy(const Eigen::MatrixBase<Derived>& logits, Eigen::Index cls) {
  if (cls < 0 || cls >= logits.size()) {
    throw IndexOutOfRange("class " + std::to_string(cls) + " outside " + std::to_string(logits.size()) +
                          " logits");
  }
  const Eigen::RowVectorXd x = logits.template cast<double>().reshaped().transpose();
  const double max = x.maxCoeff();
  const Eigen::RowVectorXd e = (x.array() - max).exp().matrix();
  const double sum = e.sum();
  CrossEntropyResult r;
  r.loss = -(x[cls] - max) + std::log(sum);
  r.grad = e / sum;
  r.grad[cls] -= 1.0;
  return r;
}

// Mean squared error over every element, with gradient w.r.t. `prediction`.
template <typename T>
double mse(const Matrix<T>& prediction, const Matrix<T>& target, Matrix<T>* grad = nullptr) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols()) {
    throw ShapeMismatch("mse: prediction and target shapes differ");
  }
  const Matrix<T> diff = prediction - target;
  const double n = static_cast<double>(diff.size());
  if (grad) *grad = diff * static_cast<T>(2.0 / n);
  return diff.template cast<double>().squaredNorm() / n;
}

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam. Moments are allocated on the first step and bound to
// the parameter list by position.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  void step(const std::vector<Parameter<T>*>& params) {
    if (first_.empty()) {
      for (const Parameter<T>* p : params) {
        first_.push_back(Matrix<T>::Zero(p->value.rows(), p->value.cols()));
        second_.push_back(Matrix<T>::Zero(p->value.rows(), p->value.cols()));
      }
    }
    if (params.size() != first_.size()) throw ShapeMismatch("adam: parameter list changed size");
    ++steps_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
    const T b1 = static_cast<T>(config_.beta1);
    const T b2 = static_cast<T>(config_.beta2);
    const T step_size = static_cast<T>(config_.learning_rate / c1);
    const T inv_sqrt_c2 = static_cast<T>(1.0 / std::sqrt(c2));
    const T eps = static_cast<T>(config_.epsilon);
    for (std::size_t i = 0; i < params.size(); ++i) {
      Parameter<T>& p = *params[i];
      if (p.value.rows() != first_[i].rows() || p.value.cols() != first_[i].cols() ||
          p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols()) {
        throw ShapeMismatch("adam: shape of " + p.name + " changed");
      }
      auto m = first_[i].array();
      auto v = second_[i].array();
      const auto g = p.grad.array();
      m = b1 * m + (T(1) - b1) * g;
      v = b2 * v + (T(1) - b2) * g.square();
      p.value.array() -= step_size * m / (v.sqrt() * inv_sqrt_c2 + eps);
    }
  }

  std::int64_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }
  const Matrix<T>& first_moment(std::size_t i) const { return first_.at(i); }
  const Matrix<T>& second_moment(std::size_t i) const { return second_.at(i); }

 private:
  AdamConfig config_;
  std::int64_t steps_ = 0;
  std::vector<Matrix<T>> first_;
  std::vector<Matrix<T>> second_;
};

template <typename T>
void zero_grads(const std::vector<Parameter<T>*>& params) {
  for (Parameter<T>* p : params) p->zero_grad();
}

}  // namespace guivec::nn
