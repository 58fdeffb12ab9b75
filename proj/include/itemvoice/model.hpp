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

#ifndef ITEMVOICE_MODEL_HPP_
#define ITEMVOICE_MODEL_HPP_

#include <deque>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "itemvoice/checkpoint.hpp"
#include "itemvoice/graph.hpp"
#include "itemvoice/rng.hpp"

namespace itemvoice::nn {

enum class ModelKind { spec_cnn, spec_cnn_lstm, egemaps_cnn, egemaps_cnn_lstm };
enum class TaskKind { classify, regress };

ModelKind model_kind_by_name(const std::string& name);
std::string model_kind_name(ModelKind kind);
TaskKind task_by_name(const std::string& name);
std::string task_name(TaskKind task);

struct BranchConfig {
  std::int64_t kernel = 3;
  std::int64_t mid_channels = 8;
  std::int64_t out_channels = 52;
  std::int64_t padding = 0;
  std::int64_t depth = 2;  // number of strided convs in the branch
};

struct CnnTrunkConfig {
  std::vector<BranchConfig> branches;

  // Three parallel branches with kernels 3/5/7, two strided convs each,
  // 52 output channels per branch: a 156-wide embedding after pooling.
  static CnnTrunkConfig defaults();
  std::int64_t embedding_dim() const;
  void validate() const;
};

struct ModelSpec {
  ModelKind kind = ModelKind::spec_cnn_lstm;
  TaskKind task = TaskKind::classify;
  int heads = 1;  // n_items for multi-task, 1 otherwise
  bool use_batchnorm = false;
  double dropout_rate = 0.0;
  CnnTrunkConfig trunk = CnnTrunkConfig::defaults();
  std::int64_t input_frames = 200;
  std::int64_t input_mels = 64;
  std::int64_t egemaps_dim = 88;
  std::int64_t egemaps_hidden = 128;
  std::int64_t lstm_hidden = 64;

  bool uses_lstm() const {
    return kind == ModelKind::spec_cnn_lstm || kind == ModelKind::egemaps_cnn_lstm;
  }
  bool uses_spectrograms() const {
    return kind == ModelKind::spec_cnn || kind == ModelKind::spec_cnn_lstm;
  }
  std::int64_t embedding_dim() const { return trunk.embedding_dim(); }
  std::int64_t head_inputs() const { return uses_lstm() ? lstm_hidden : embedding_dim(); }
  std::int64_t head_outputs() const { return task == TaskKind::classify ? 2 : 1; }

  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
};

// One trainable network. Parameters live in a deque so Graph can bind them by
// reference across many per-batch graphs.
class Model {
 public:
  Model(ModelSpec spec, Rng& rng);

  const ModelSpec& spec() const { return spec_; }
  std::vector<Parameter*> parameters();
  Parameter& parameter(const std::string& name);

  // Input layout: spec_cnn [B,1,F,M]; egemaps_cnn [B,D]. Sequence kinds take
  // step-major stacks, row t*B+s holds step t of sample s: spec_cnn_lstm
  // [10B,1,F,M], egemaps_cnn_lstm [10B,D]. Returns one output per head:
  // log-probabilities [B,2] for classify, raw values [B,1] for regress.
  std::vector<Var> forward(Graph& g, Var input, std::int64_t batch, Rng& rng);

  // Eval-mode forward over a ready-made batch; classify only. Rows of the
  // result sum to 1. head selects the multi-task head.
  Tensor predict_probs(const Tensor& batch, std::int64_t batch_size, int head = 0);
  Tensor predict_values(const Tensor& batch, std::int64_t batch_size, int head = 0);

  Checkpoint to_checkpoint() const;
  static Model from_checkpoint(const Checkpoint& ckpt);

  // Weights and running stats squeezed through float32: exactly the model a
  // reader of the stored checkpoint would reconstruct.
  Model rounded_f32() const;

 private:
  friend class ForwardBuilder;
  Parameter& add_param(const std::string& name, Tensor value);
  void init_weights(Rng& rng);

  ModelSpec spec_;
  std::deque<Parameter> storage_;
  std::vector<Parameter*> ordered_;
  std::map<std::string, Parameter*> by_name_;
  std::deque<BatchNormState> bn_storage_;
  std::vector<std::string> bn_names_;
};

}  // namespace itemvoice::nn

#endif  // ITEMVOICE_MODEL_HPP_
