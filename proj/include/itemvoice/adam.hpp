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

#ifndef ITEMVOICE_ADAM_HPP_
#define ITEMVOICE_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "itemvoice/graph.hpp"

namespace itemvoice::nn {

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;  // decoupled from the moments: added to the raw gradient
};

// Adam with classic L2 regularisation: the decay term joins the gradient
// before the moment updates, so it is also rescaled by the adaptive step.
class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamConfig cfg);

  // One update from the gradients currently held by the parameters.
  // Raises NonFiniteGradient if any gradient entry is NaN or infinite.
  void step();
  void zero_grad();
  std::int64_t steps_taken() const { return t_; }

 private:
  std::vector<Parameter*> params_;
  AdamConfig cfg_;
  std::int64_t t_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace itemvoice::nn

#endif  // ITEMVOICE_ADAM_HPP_
