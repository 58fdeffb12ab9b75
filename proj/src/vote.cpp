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

#include "itemvoice/vote.hpp"

#include "itemvoice/error.hpp"

namespace itemvoice::vote {

VoteMethod vote_method_by_name(const std::string& name) {
  if (name == "hard") return VoteMethod::hard;
  if (name == "soft") return VoteMethod::soft;
  raise(ErrorKind::BadConfig, "unknown vote method '" + name + "' (use hard or soft)");
}

std::string vote_method_name(VoteMethod m) {
  return m == VoteMethod::hard ? "hard" : "soft";
}

namespace {

void check_grid(const SegmentProbabilityGrid& grid) {
  if (grid.probs.empty()) {
    raise(ErrorKind::EmptyGrid, "probability grid for recording '" + grid.recording_id +
                                    "' has no segments");
  }
}

}  // namespace

ItemDecision hard_vote(const SegmentProbabilityGrid& grid) {
  check_grid(grid);
  std::int64_t present_votes = 0;
  for (const auto& row : grid.probs) {
    if (row[1] >= row[0]) ++present_votes;
  }
  ItemDecision d;
  d.item_index = grid.item_index;
  d.method = VoteMethod::hard;
  d.aggregate_present_prob =
      static_cast<double>(present_votes) / static_cast<double>(grid.probs.size());
  d.present = 2 * present_votes >= static_cast<std::int64_t>(grid.probs.size());
  return d;
}

ItemDecision soft_vote(const SegmentProbabilityGrid& grid) {
  check_grid(grid);
  double mean_present = 0.0;
  for (const auto& row : grid.probs) mean_present += row[1];
  mean_present /= static_cast<double>(grid.probs.size());
  ItemDecision d;
  d.item_index = grid.item_index;
  d.method = VoteMethod::soft;
  d.aggregate_present_prob = mean_present;
  d.present = mean_present >= 0.5;
  return d;
}

ItemDecision apply_vote(const SegmentProbabilityGrid& grid, VoteMethod method) {
  return method == VoteMethod::hard ? hard_vote(grid) : soft_vote(grid);
}

CombineRule combine_rule_by_name(const std::string& name, int k) {
  CombineRule rule;
  if (name == "mean_prob") {
    rule.kind = CombineRule::Kind::mean_prob;
  } else if (name == "count_threshold") {
    rule.kind = CombineRule::Kind::count_threshold;
    if (k < 1) raise(ErrorKind::BadConfig, "count_threshold needs k >= 1");
    rule.k = k;
  } else {
    raise(ErrorKind::BadConfig,
          "unknown combine rule '" + name + "' (use mean_prob or count_threshold)");
  }
  return rule;
}

bool combine_items(const std::vector<ItemDecision>& decisions, const CombineRule& rule,
                   int n_items) {
  if (static_cast<int>(decisions.size()) != n_items) {
    raise(ErrorKind::IncompleteDecisions, "have " + std::to_string(decisions.size()) +
                                              " item decisions, scale has " +
                                              std::to_string(n_items));
  }
  if (rule.kind == CombineRule::Kind::count_threshold) {
    int present = 0;
    for (const ItemDecision& d : decisions) present += d.present ? 1 : 0;
    return present >= rule.k;
  }
  double mean = 0.0;
  for (const ItemDecision& d : decisions) mean += d.aggregate_present_prob;
  mean /= static_cast<double>(decisions.size());
  return mean >= 0.5;
}

}  // namespace itemvoice::vote
