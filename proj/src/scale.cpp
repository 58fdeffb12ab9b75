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

#include "itemvoice/scale.hpp"

#include <algorithm>
#include <cctype>

#include "itemvoice/error.hpp"

namespace itemvoice::corpus {

const std::string& ScaleDefinition::item_name(int index_1_based) const {
  for (const ScaleItem& it : items) {
    if (it.index == index_1_based) return it.name;
  }
  raise(ErrorKind::BadConfig, "scale " + name + " has no item " + std::to_string(index_1_based));
}

ScaleDefinition madrs() {
  ScaleDefinition s;
  s.name = "MADRS";
  s.items = {{1, "Apparent sadness"},    {2, "Reported sadness"},
             {3, "Inner tension"},       {4, "Reduced sleep"},
             {5, "Reduced appetite"},    {6, "Conc. difficulties"},
             {7, "Lassitude"},           {8, "Inability to feel"},
             {9, "Pessimistic thoughts"}, {10, "Suicidal thoughts"}};
  s.score_min = 0;
  s.score_max = 6;
  s.depression_threshold = 10;
  return s;
}

ScaleDefinition phq8() {
  ScaleDefinition s;
  s.name = "PHQ8";
  s.items = {{1, "Little interest"},  {2, "Feeling down"},
             {3, "Trouble sleeping"}, {4, "Feeling tired"},
             {5, "Poor appetite"},    {6, "Self-disappointment"},
             {7, "Conc. difficulties"}, {8, "Restlessness"}};
  s.score_min = 0;
  s.score_max = 3;
  s.depression_threshold = 10;
  return s;
}

ScaleDefinition scale_by_name(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "MADRS") return madrs();
  if (up == "PHQ8" || up == "PHQ-8") return phq8();
  raise(ErrorKind::BadConfig, "unknown scale '" + name + "' (use MADRS or PHQ8)");
}

}  // namespace itemvoice::corpus
