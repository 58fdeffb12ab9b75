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

#ifndef ITEMVOICE_METRICS_HPP_
#define ITEMVOICE_METRICS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace itemvoice::eval {

struct FScores {
  double weighted_f = 0.0;
  double f_absent = 0.0;
  double f_present = 0.0;
  std::int64_t support_absent = 0;
  std::int64_t support_present = 0;
};

// Binary F-scores per class plus the support-weighted mean. A class with zero
// support contributes F = 0 with weight 0.
FScores f_scores(const std::vector<bool>& predictions, const std::vector<bool>& labels);

// "0.70/0.74/0.53": weighted / absent / present, each rounded to 2 decimals.
std::string wap_cell(const FScores& f);

struct ReportRow {
  int item_index = 0;        // 1-based; 0 for the depression row
  std::string item_name;
  FScores hard;
  FScores soft;
};

struct EvalReport {
  std::string scale_name;
  std::string split;
  std::vector<ReportRow> rows;
};

// CSV: one row per item, W/A/P cells for hard and soft voting plus the raw
// score columns and supports.
void write_report_csv(const std::string& path, const EvalReport& report);
std::string report_csv_string(const EvalReport& report);

}  // namespace itemvoice::eval

#endif  // ITEMVOICE_METRICS_HPP_
