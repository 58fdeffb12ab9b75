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

#ifndef ITEMVOICE_SCALE_HPP_
#define ITEMVOICE_SCALE_HPP_

#include <string>
#include <vector>

namespace itemvoice::corpus {

struct ScaleItem {
  int index;  // 1-based, as conventionally printed: "(10) Suicidal thoughts"
  std::string name;
};

struct ScaleDefinition {
  std::string name;  // "MADRS" or "PHQ8"
  std::vector<ScaleItem> items;
  int score_min = 0;
  int score_max = 0;
  int depression_threshold = 0;  // total score at or above which = depressed

  int n_items() const { return static_cast<int>(items.size()); }
  const std::string& item_name(int index_1_based) const;
};

// MADRS: 10 items scored 0..6, depression at total >= 10.
ScaleDefinition madrs();
// PHQ-8: 8 items scored 0..3, depression at total >= 10.
ScaleDefinition phq8();

// Accepts "MADRS" or "PHQ8" (case-insensitive); BadConfig otherwise.
ScaleDefinition scale_by_name(const std::string& name);

}  // namespace itemvoice::corpus

#endif  // ITEMVOICE_SCALE_HPP_
