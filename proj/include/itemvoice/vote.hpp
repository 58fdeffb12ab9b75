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

#ifndef ITEMVOICE_VOTE_HPP_
#define ITEMVOICE_VOTE_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "itemvoice/segmentation.hpp"

namespace itemvoice::vote {

struct SegmentProbabilityGrid {
  std::string recording_id;
  int item_index = 0;  // 1-based; 0 = depression target
  std::vector<std::array<double, 2>> probs;  // per segment: {absent, present}
  seg::GridGeometry geometry;
};

enum class VoteMethod { hard, soft };

VoteMethod vote_method_by_name(const std::string& name);
std::string vote_method_name(VoteMethod m);

struct ItemDecision {
  int item_index = 0;
  VoteMethod method = VoteMethod::soft;
  bool present = false;
  double aggregate_present_prob = 0.0;  // vote fraction (hard) or mean prob (soft)
};

// Per-segment argmax votes; ties at every level go to present.
ItemDecision hard_vote(const SegmentProbabilityGrid& grid);

// Mean probability vector; present at mean_present >= 0.5.
ItemDecision soft_vote(const SegmentProbabilityGrid& grid);

ItemDecision apply_vote(const SegmentProbabilityGrid& grid, VoteMethod method);

struct CombineRule {
  enum class Kind { count_threshold, mean_prob };
  Kind kind = Kind::mean_prob;
  int k = 0;  // minimum present-count for count_threshold
};

CombineRule combine_rule_by_name(const std::string& name, int k);

// One decision per scale item required (IncompleteDecisions otherwise).
bool combine_items(const std::vector<ItemDecision>& decisions, const CombineRule& rule,
                   int n_items);

}  // namespace itemvoice::vote

#endif  // ITEMVOICE_VOTE_HPP_
