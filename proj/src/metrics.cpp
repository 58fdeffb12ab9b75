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

#include "itemvoice/metrics.hpp"

#include <cstdio>
#include <fstream>

#include "itemvoice/error.hpp"

namespace itemvoice::eval {

namespace {

double f1_for_class(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  const double precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

FScores f_scores(const std::vector<bool>& predictions, const std::vector<bool>& labels) {
  if (predictions.size() != labels.size()) {
    raise(ErrorKind::LengthMismatch, "predictions " + std::to_string(predictions.size()) +
                                         " vs labels " + std::to_string(labels.size()));
  }
  if (predictions.empty()) {
    raise(ErrorKind::LengthMismatch, "f_scores needs at least one sample");
  }
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i], l = labels[i];
    if (p && l) ++tp;
    else if (p && !l) ++fp;
    else if (!p && l) ++fn;
    else ++tn;
  }
  FScores f;
  f.support_present = tp + fn;
  f.support_absent = tn + fp;
  f.f_present = f.support_present > 0 ? f1_for_class(tp, fp, fn) : 0.0;
  // absent is the positive class here, so the confusion roles swap
  f.f_absent = f.support_absent > 0 ? f1_for_class(tn, fn, fp) : 0.0;
  const std::int64_t total = f.support_absent + f.support_present;
  f.weighted_f = (static_cast<double>(f.support_absent) * f.f_absent +
                  static_cast<double>(f.support_present) * f.f_present) /
                 static_cast<double>(total);
  return f;
}

std::string wap_cell(const FScores& f) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f/%.2f/%.2f", f.weighted_f, f.f_absent, f.f_present);
  return buf;
}

std::string report_csv_string(const EvalReport& report) {
  std::string out =
      "item_index,item_name,hard_wap,soft_wap,"
      "hard_weighted_f,hard_f_absent,hard_f_present,"
      "soft_weighted_f,soft_f_absent,soft_f_present,"
      "support_absent,support_present\n";
  char buf[256];
  for (const ReportRow& r : report.rows) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%s,%s,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%lld,%lld\n", r.item_index,
                  r.item_name.c_str(), wap_cell(r.hard).c_str(), wap_cell(r.soft).c_str(),
                  r.hard.weighted_f, r.hard.f_absent, r.hard.f_present, r.soft.weighted_f,
                  r.soft.f_absent, r.soft.f_present,
                  static_cast<long long>(r.hard.support_absent),
                  static_cast<long long>(r.hard.support_present));
    out += buf;
  }
  return out;
}

void write_report_csv(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::IoError, "cannot open for writing: " + path);
  out << report_csv_string(report);
  if (!out) raise(ErrorKind::IoError, "write failed: " + path);
}

}  // namespace itemvoice::eval
