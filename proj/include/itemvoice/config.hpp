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

#ifndef ITEMVOICE_CONFIG_HPP_
#define ITEMVOICE_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "itemvoice/dsp.hpp"
#include "itemvoice/scale.hpp"

namespace itemvoice::cli {

// The ITEMVOICE_SEED environment variable overrides any configured seed.
std::uint64_t effective_seed(std::uint64_t configured);

// "all" (or empty) selects every item; otherwise a comma-separated list of
// distinct 1-based item indices.
std::vector<int> parse_items(const std::string& items, const corpus::ScaleDefinition& scale);

dsp::StftConfig stft_with_window(const std::string& window_name);

// item_01.ivck .. item_NN.ivck; index 0 names the depression model.
std::string item_checkpoint_path(const std::string& dir, int item_index);
std::string item_log_path(const std::string& dir, int item_index);

}  // namespace itemvoice::cli

#endif  // ITEMVOICE_CONFIG_HPP_
