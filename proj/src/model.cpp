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

#include "itemvoice/model.hpp"

#include <cmath>
#include <utility>

#include "itemvoice/error.hpp"

namespace itemvoice::nn {

ModelKind model_kind_by_name(const std::string& name) {
  if (name == "spec_cnn") return ModelKind::spec_cnn;
  if (name == "spec_cnn_lstm") return ModelKind::spec_cnn_lstm;
  if (name == "egemaps_cnn") return ModelKind::egemaps_cnn;
  if (name == "egemaps_cnn_lstm") return ModelKind::egemaps_cnn_lstm;
  raise(ErrorKind::BadConfig, "unknown model kind '" + name + "'");
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::spec_cnn: return "spec_cnn";
    case ModelKind::spec_cnn_lstm: return "spec_cnn_lstm";
    case ModelKind::egemaps_cnn: return "egemaps_cnn";
    case ModelKind::egemaps_cnn_lstm: return "egemaps_cnn_lstm";
  }
  raise(ErrorKind::BadConfig, "bad model kind value");
}

TaskKind task_by_name(const std::string& name) {
  if (name == "classify") return TaskKind::classify;
  if (name == "regress") return TaskKind::regress;
  raise(ErrorKind::BadConfig, "unknown task '" + name + "' (use classify or regress)");
}

std::string task_name(TaskKind task) {
  return task == TaskKind::classify ? "classify" : "regress";
}

CnnTrunkConfig CnnTrunkConfig::defaults() {
  CnnTrunkConfig cfg;
  cfg.branches = {{3, 8, 52, 0, 2}, {5, 8, 52, 0, 2}, {7, 8, 52, 0, 2}};
  return cfg;
}

std::int64_t CnnTrunkConfig::embedding_dim() const {
  std::int64_t dim = 0;
  for (const BranchConfig& b : branches) dim += b.out_channels;
  return dim;
}

void CnnTrunkConfig::validate() const {
  if (branches.size() != 3) {
    raise(ErrorKind::BadConfig, "trunk needs exactly 3 parallel branches");
  }
  for (const BranchConfig& b : branches) {
    if (b.kernel < 1 || b.depth < 1 || b.mid_channels < 1 || b.out_channels < 1 ||
        b.padding < 0) {
      raise(ErrorKind::BadConfig, "invalid branch configuration");
    }
  }
}

nlohmann::json ModelSpec::to_json() const {
  nlohmann::json branches = nlohmann::json::array();
  for (const BranchConfig& b : trunk.branches) {
    branches.push_back({{"kernel", b.kernel},
                        {"mid_channels", b.mid_channels},
                        {"out_channels", b.out_channels},
                        {"padding", b.padding},
                        {"depth", b.depth}});
  }
  return {{"kind", model_kind_name(kind)},
          {"task", task_name(task)},
          {"heads", heads},
          {"use_batchnorm", use_batchnorm},
          {"dropout_rate", dropout_rate},
          {"input_frames", input_frames},
          {"input_mels", input_mels},
          {"egemaps_dim", egemaps_dim},
          {"egemaps_hidden", egemaps_hidden},
          {"lstm_hidden", lstm_hidden},
          {"trunk", {{"branches", branches}}}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  ModelSpec s;
  s.kind = model_kind_by_name(j.at("kind").get<std::string>());
  s.task = task_by_name(j.at("task").get<std::string>());
  s.heads = j.at("heads").get<int>();
  s.use_batchnorm = j.at("use_batchnorm").get<bool>();
  s.dropout_rate = j.at("dropout_rate").get<double>();
  s.input_frames = j.at("input_frames").get<std::int64_t>();
  s.input_mels = j.at("input_mels").get<std::int64_t>();
  s.egemaps_dim = j.at("egemaps_dim").get<std::int64_t>();
  s.egemaps_hidden = j.at("egemaps_hidden").get<std::int64_t>();
  s.lstm_hidden = j.at("lstm_hidden").get<std::int64_t>();
  s.trunk.branches.clear();
  for (const auto& bj : j.at("trunk").at("branches")) {
    BranchConfig b;
    b.kernel = bj.at("kernel").get<std::int64_t>();
    b.mid_channels = bj.at("mid_channels").get<std::int64_t>();
    b.out_channels = bj.at("out_channels").get<std::int64_t>();
    b.padding = bj.at("padding").get<std::int64_t>();
    b.depth = bj.at("depth").get<std::int64_t>();
    s.trunk.branches.push_back(b);
  }
  return s;
}

namespace {

std::int64_t branch_in_channels(const BranchConfig& b, std::int64_t layer) {
  if (layer == 0) return 1;
  return b.mid_channels;
}

std::int64_t branch_out_channels(const BranchConfig& b, std::int64_t layer) {
  if (layer == b.depth - 1) return b.out_channels;
  return b.mid_channels;
}

void xavier_uniform(Tensor& t, std::int64_t fan_in, std::int64_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.data) v = rng.uniform(-a, a);
}

}  // namespace

Parameter& Model::add_param(const std::string& name, Tensor value) {
  storage_.emplace_back(name, std::move(value));
  Parameter& p = storage_.back();
  ordered_.push_back(&p);
  by_name_[name] = &p;
  return p;
}

Model::Model(ModelSpec spec, Rng& rng) : spec_(std::move(spec)) {
  spec_.trunk.validate();
  if (spec_.heads < 1) raise(ErrorKind::BadConfig, "model needs at least one head");

  if (spec_.uses_spectrograms()) {
    for (std::size_t b = 0; b < spec_.trunk.branches.size(); ++b) {
      const BranchConfig& br = spec_.trunk.branches[b];
      for (std::int64_t l = 0; l < br.depth; ++l) {
        const std::int64_t cin = branch_in_channels(br, l);
        const std::int64_t cout = branch_out_channels(br, l);
        const std::string stem = "conv" + std::to_string(b) + "_" + std::to_string(l);
        add_param(stem + "_w", Tensor::zeros({cout, cin, br.kernel, br.kernel}));
        add_param(stem + "_b", Tensor::zeros({cout}));
        if (spec_.use_batchnorm) {
          add_param(stem + "_gamma", Tensor::full({cout}, 1.0));
          add_param(stem + "_beta", Tensor::zeros({cout}));
          bn_storage_.push_back(
              {Tensor::zeros({cout}), Tensor::full({cout}, 1.0)});
          bn_names_.push_back(stem);
        }
      }
    }
  } else {
    const std::int64_t dims[3] = {spec_.egemaps_dim, spec_.egemaps_hidden,
                                  spec_.embedding_dim()};
    for (int l = 0; l < 2; ++l) {
      const std::string stem = "enc" + std::to_string(l);
      add_param(stem + "_w", Tensor::zeros({dims[l + 1], dims[l]}));
      add_param(stem + "_b", Tensor::zeros({dims[l + 1]}));
      if (spec_.use_batchnorm) {
        add_param(stem + "_gamma", Tensor::full({dims[l + 1]}, 1.0));
        add_param(stem + "_beta", Tensor::zeros({dims[l + 1]}));
        bn_storage_.push_back(
            {Tensor::zeros({dims[l + 1]}), Tensor::full({dims[l + 1]}, 1.0)});
        bn_names_.push_back(stem);
      }
    }
  }

  if (spec_.uses_lstm()) {
    const std::int64_t h = spec_.lstm_hidden, e = spec_.embedding_dim();
    add_param("lstm_wx", Tensor::zeros({4 * h, e}));
    add_param("lstm_wh", Tensor::zeros({4 * h, h}));
    add_param("lstm_b", Tensor::zeros({4 * h}));
  }

  for (int hd = 0; hd < spec_.heads; ++hd) {
    const std::string stem = "head" + std::to_string(hd);
    add_param(stem + "_w", Tensor::zeros({spec_.head_outputs(), spec_.head_inputs()}));
    add_param(stem + "_b", Tensor::zeros({spec_.head_outputs()}));
  }

  init_weights(rng);
}

void Model::init_weights(Rng& rng) {
  for (Parameter* p : ordered_) {
    const std::string& n = p->name;
    const bool is_weight = n.size() > 2 && n.compare(n.size() - 2, 2, "_w") == 0;
    if (n.rfind("conv", 0) == 0 && is_weight) {
      const std::int64_t o = p->value.dim(0), c = p->value.dim(1), k = p->value.dim(2);
      xavier_uniform(p->value, c * k * k, o * k * k, rng);
    } else if ((n.rfind("enc", 0) == 0 || n.rfind("head", 0) == 0) && is_weight) {
      xavier_uniform(p->value, p->value.dim(1), p->value.dim(0), rng);
    } else if (n == "lstm_wx" || n == "lstm_wh") {
      xavier_uniform(p->value, p->value.dim(1), p->value.dim(0), rng);
    } else if (n == "lstm_b") {
      // forget-gate block gets bias 1 so early training keeps cell memory
      const std::int64_t h = spec_.lstm_hidden;
      for (std::int64_t i = h; i < 2 * h; ++i) p->value(i) = 1.0;
    }
  }
}

std::vector<Parameter*> Model::parameters() { return ordered_; }

Parameter& Model::parameter(const std::string& name) {
  const auto it = by_name_.find(name);
  if (it == by_name_.end()) {
    raise(ErrorKind::BadConfig, "model has no parameter '" + name + "'");
  }
  return *it->second;
}

std::vector<Var> Model::forward(Graph& g, Var input, std::int64_t batch, Rng& rng) {
  const Tensor& in = g.value(input);
  const std::int64_t steps = spec_.uses_lstm() ? 10 : 1;
  const std::int64_t rows = steps * batch;

  Var emb;
  if (spec_.uses_spectrograms()) {
    if (in.ndim() != 4 || in.dim(1) != 1 || in.dim(2) != spec_.input_frames ||
        in.dim(3) != spec_.input_mels) {
      raise(ErrorKind::ShapeMismatch, "spectrogram batch must be [N,1," +
                                          std::to_string(spec_.input_frames) + "," +
                                          std::to_string(spec_.input_mels) + "], got " +
                                          in.shape_str());
    }
    if (in.dim(0) != rows) {
      raise(spec_.uses_lstm() ? ErrorKind::BadSequenceLength : ErrorKind::ShapeMismatch,
            "batch rows " + std::to_string(in.dim(0)) + ", want " + std::to_string(rows));
    }
    std::vector<Var> branch_outputs;
    std::size_t bn_index = 0;
    for (std::size_t b = 0; b < spec_.trunk.branches.size(); ++b) {
      const BranchConfig& br = spec_.trunk.branches[b];
      Var x = input;
      for (std::int64_t l = 0; l < br.depth; ++l) {
        const std::string stem = "conv" + std::to_string(b) + "_" + std::to_string(l);
        x = g.conv2d(x, g.param(parameter(stem + "_w")), g.param(parameter(stem + "_b")), 2, 2,
                     br.padding, br.padding);
        if (spec_.use_batchnorm) {
          x = g.batch_norm(x, g.param(parameter(stem + "_gamma")),
                           g.param(parameter(stem + "_beta")), bn_storage_[bn_index]);
          ++bn_index;
        }
        x = g.relu(x);
      }
      branch_outputs.push_back(g.global_avg_pool(x));
    }
    emb = g.concat(branch_outputs);
  } else {
    if (in.ndim() != 2 || in.dim(1) != spec_.egemaps_dim) {
      raise(ErrorKind::DimensionMismatch, "functional batch must be [N," +
                                              std::to_string(spec_.egemaps_dim) + "], got " +
                                              in.shape_str());
    }
    if (in.dim(0) != rows) {
      raise(spec_.uses_lstm() ? ErrorKind::BadSequenceLength : ErrorKind::DimensionMismatch,
            "batch rows " + std::to_string(in.dim(0)) + ", want " + std::to_string(rows));
    }
    Var x = input;
    std::size_t bn_index = 0;
    for (int l = 0; l < 2; ++l) {
      const std::string stem = "enc" + std::to_string(l);
      x = g.linear(x, g.param(parameter(stem + "_w")), g.param(parameter(stem + "_b")));
      if (spec_.use_batchnorm) {
        x = g.batch_norm(x, g.param(parameter(stem + "_gamma")),
                         g.param(parameter(stem + "_beta")), bn_storage_[bn_index]);
        ++bn_index;
      }
      x = g.relu(x);
    }
    emb = x;
  }

  Var feat;
  if (spec_.uses_lstm()) {
    const std::int64_t h = spec_.lstm_hidden;
    Var hv = g.input(Tensor::zeros({batch, h}));
    Var cv = g.input(Tensor::zeros({batch, h}));
    Var wx = g.param(parameter("lstm_wx"));
    Var wh = g.param(parameter("lstm_wh"));
    Var bb = g.param(parameter("lstm_b"));
    for (std::int64_t t = 0; t < steps; ++t) {
      const Var xt = g.rows(emb, t * batch, batch);
      const Var hc = g.lstm_step(xt, hv, cv, wx, wh, bb);
      hv = g.cols(hc, 0, h);
      cv = g.cols(hc, h, h);
    }
    feat = hv;
  } else {
    feat = emb;
  }

  feat = g.dropout(feat, spec_.dropout_rate, rng);

  std::vector<Var> outs;
  for (int hd = 0; hd < spec_.heads; ++hd) {
    const std::string stem = "head" + std::to_string(hd);
    Var logits = g.linear(feat, g.param(parameter(stem + "_w")), g.param(parameter(stem + "_b")));
    outs.push_back(spec_.task == TaskKind::classify ? g.log_softmax(logits) : logits);
  }
  return outs;
}

Tensor Model::predict_probs(const Tensor& batch, std::int64_t batch_size, int head) {
  if (spec_.task != TaskKind::classify) {
    raise(ErrorKind::BadConfig, "predict_probs requires a classify model");
  }
  if (head < 0 || head >= spec_.heads) {
    raise(ErrorKind::BadConfig, "head " + std::to_string(head) + " out of range");
  }
  Graph g(false);
  Rng rng(0);  // dropout is identity in eval mode and draws nothing
  const Var in = g.input(batch);
  const std::vector<Var> outs = forward(g, in, batch_size, rng);
  Tensor probs = g.value(outs[static_cast<std::size_t>(head)]);
  for (double& v : probs.data) v = std::exp(v);
  return probs;
}

Tensor Model::predict_values(const Tensor& batch, std::int64_t batch_size, int head) {
  if (head < 0 || head >= spec_.heads) {
    raise(ErrorKind::BadConfig, "head " + std::to_string(head) + " out of range");
  }
  Graph g(false);
  Rng rng(0);
  const Var in = g.input(batch);
  const std::vector<Var> outs = forward(g, in, batch_size, rng);
  return g.value(outs[static_cast<std::size_t>(head)]);
}

Checkpoint Model::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.meta["format"] = "itemvoice-model";
  ckpt.meta["model"] = spec_.to_json();
  for (const Parameter* p : ordered_) ckpt.tensors.emplace_back(p->name, p->value);
  for (std::size_t i = 0; i < bn_names_.size(); ++i) {
    ckpt.tensors.emplace_back(bn_names_[i] + "_running_mean", bn_storage_[i].running_mean);
    ckpt.tensors.emplace_back(bn_names_[i] + "_running_var", bn_storage_[i].running_var);
  }
  return ckpt;
}

Model Model::from_checkpoint(const Checkpoint& ckpt) {
  if (!ckpt.meta.contains("model")) {
    raise(ErrorKind::CorruptFile, "checkpoint lacks a model spec");
  }
  Rng rng(0);
  Model m(ModelSpec::from_json(ckpt.meta["model"]), rng);
  for (Parameter* p : m.ordered_) {
    const Tensor& t = ckpt.tensor(p->name);
    if (!t.same_shape(p->value)) {
      raise(ErrorKind::ShapeMismatch, "checkpoint tensor '" + p->name + "' has shape " +
                                          t.shape_str() + ", model wants " +
                                          p->value.shape_str());
    }
    p->value = t;
  }
  for (std::size_t i = 0; i < m.bn_names_.size(); ++i) {
    m.bn_storage_[i].running_mean = ckpt.tensor(m.bn_names_[i] + "_running_mean");
    m.bn_storage_[i].running_var = ckpt.tensor(m.bn_names_[i] + "_running_var");
  }
  return m;
}

Model Model::rounded_f32() const {
  Checkpoint ckpt = to_checkpoint();
  for (auto& [name, t] : ckpt.tensors) t = round_to_f32(t);
  return from_checkpoint(ckpt);
}

}  // namespace itemvoice::nn
