// Copyright 2026 The itemvoice Authors
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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "itemvoice/rng.hpp"
#include "itemvoice/tensor.hpp"

namespace itemvoice::nn {

/// Named weight tensor with an accumulated gradient buffer. Gradients are
/// summed across backward passes until the optimizer consumes them, which
/// is what makes micro-batch accumulation work.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  Parameter() = default;
  Parameter(std::string name_in, Tensor value_in);
  void zero_grad();
};

/// Running statistics for batch normalization, updated during training
/// forward passes and used verbatim in eval mode.
struct BatchNormState {
  Tensor running_mean;
  Tensor running_var;
};

struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

/// Reverse-mode autodiff tape over dense double tensors.
///
/// Nodes are appended in execution order, so creation order is a valid
/// topological order and backward() is a single reverse sweep. A graph is
/// built per (micro-)batch and thrown away; parameters outlive graphs and
/// receive gradient contributions when the sweep reaches their leaf nodes.
/// One graph instance must only ever be touched by one thread.
class Graph {
 public:
  explicit Graph(bool training = true) : training_(training) {}

  bool training() const { return training_; }

  /// Constant leaf. Set requires_grad to read d(loss)/d(input) after
  /// backward (used by the finite-difference harness).
  Var input(Tensor value, bool requires_grad = false);

  /// Leaf bound to a parameter; p.grad accumulates during backward().
  Var param(Parameter& p);

  // -- operators ----------------------------------------------------------
  // x: [N,C,H,W], w: [O,C,kH,kW], b: [O]; stride/padding apply to both
  // spatial axes independently.
  Var conv2d(Var x, Var w, Var b, std::int64_t stride_h, std::int64_t stride_w,
             std::int64_t pad_h, std::int64_t pad_w);
  Var relu(Var x);
  /// x: [N,I], w: [O,I], b: [O] -> [N,O]
  Var linear(Var x, Var w, Var b);
  /// Concatenate 2-D tensors along the last axis.
  Var concat(const std::vector<Var>& xs);
  /// [N,C,H,W] -> [N, C*H*W]
  Var flatten(Var x);
  /// [N,C,H,W] -> [N,C], mean over the spatial axes.
  Var global_avg_pool(Var x);
  /// Inverted dropout: keeps with probability 1-rate and scales kept units
  /// by 1/(1-rate) in training; identity in eval. rate == 0 never consumes
  /// randomness, so disabling dropout leaves the rng stream untouched.
  Var dropout(Var x, double rate, Rng& rng);
  /// Per-channel normalization. x is [N,F] (channel = feature) or
  /// [N,C,H,W] (channel = C). Training uses biased batch statistics and
  /// folds them into `state` with the given momentum; eval normalizes with
  /// the running statistics.
  Var batch_norm(Var x, Var gamma, Var beta, BatchNormState& state,
                 double momentum = 0.1, double eps = 1e-5);
  Var softmax(Var x);
  Var log_softmax(Var x);
  /// One LSTM cell update. x: [B,I], h/c: [B,H], w_x: [4H,I], w_h: [4H,H],
  /// b: [4H] with gate blocks ordered input|forget|cell|output. The result
  /// is [B,2H] holding h' in the first H columns and c' in the last H;
  /// split it with cols(). Chaining steps gives full backprop through time.
  Var lstm_step(Var x, Var h, Var c, Var w_x, Var w_h, Var b);
  /// Contiguous row slice of a 2-D tensor.
  Var rows(Var x, std::int64_t offset, std::int64_t count);
  /// Contiguous column slice of a 2-D tensor.
  Var cols(Var x, std::int64_t offset, std::int64_t count);
  Var add(Var a, Var b);
  Var scale(Var x, double factor);
  /// -mean(log_probs[i, target_i]); log_probs: [B,K], targets in [0,K).
  /// With class_weights (length K) the mean is weighted: each term scales by
  /// w[target_i] and the sum divides by sum of the applied weights.
  Var nll_loss(Var log_probs, std::vector<std::int64_t> targets,
               std::vector<double> class_weights = {});
  Var mse_loss(Var pred, Tensor target);

  const Tensor& value(Var v) const;
  /// Gradient of the last backward() w.r.t. node v (zeros if untouched).
  const Tensor& grad(Var v);

  /// Reverse sweep from a scalar loss. Accumulates into bound parameters.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool grad_alloc = false;
    Parameter* bound = nullptr;
    std::function<void(Graph&)> backprop;
  };

  std::vector<Node> nodes_;
  bool training_;

  Var push(Tensor value, bool requires_grad);
  Node& node(Var v) { return nodes_[static_cast<std::size_t>(v.id)]; }
  const Node& node(Var v) const { return nodes_[static_cast<std::size_t>(v.id)]; }
  bool needs_grad(Var v) const { return node(v).requires_grad; }
  /// Gradient buffer of v, allocated as zeros on first use; nullptr when v
  /// does not require grad (callers then skip the accumulation).
  double* grad_sink(Var v);
  const double* grad_src(Var v) const { return node(v).grad.data.data(); }

  void check_2d(Var v, const char* op) const;
};

}  // namespace itemvoice::nn
