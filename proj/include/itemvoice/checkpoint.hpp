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

#ifndef ITEMVOICE_CHECKPOINT_HPP_
#define ITEMVOICE_CHECKPOINT_HPP_

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "itemvoice/tensor.hpp"

namespace itemvoice::nn {

// Binary container: "IVCK" magic, u32 version, u64 JSON length, JSON header,
// then one float32 little-endian payload per tensor in header order.
struct Checkpoint {
  nlohmann::json meta;
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor& tensor(const std::string& name) const;
  bool has_tensor(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Values squeezed through float32 and widened back. Stored checkpoints hold
// float32, so metrics recorded next to a checkpoint must be computed on this.
Tensor round_to_f32(const Tensor& t);

}  // namespace itemvoice::nn

#endif  // ITEMVOICE_CHECKPOINT_HPP_
