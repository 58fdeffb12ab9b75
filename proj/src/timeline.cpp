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

#include "itemvoice/timeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "itemvoice/error.hpp"

namespace itemvoice::vote {

namespace {

constexpr int kRamp0[3] = {0x2a, 0x0a, 0x4a};  // dark purple at p=0
constexpr int kRamp1[3] = {0xf5, 0xe6, 0x42};  // bright yellow at p=1

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::IoError, "cannot open for writing: " + path);
  out << text;
  if (!out) raise(ErrorKind::IoError, "write failed: " + path);
}

}  // namespace

std::string ramp_color(double p) {
  p = std::clamp(p, 0.0, 1.0);
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(kRamp0[0] + p * (kRamp1[0] - kRamp0[0]))),
                static_cast<int>(std::lround(kRamp0[1] + p * (kRamp1[1] - kRamp0[1]))),
                static_cast<int>(std::lround(kRamp0[2] + p * (kRamp1[2] - kRamp0[2]))));
  return buf;
}

std::string timeline_json(const SegmentProbabilityGrid& grid, const std::string& item_name) {
  const ItemDecision hard = hard_vote(grid);
  const ItemDecision soft = soft_vote(grid);
  nlohmann::ordered_json doc;
  doc["recording_id"] = grid.recording_id;
  doc["item_index"] = grid.item_index;
  doc["item_name"] = item_name;
  doc["hop_s"] = grid.geometry.hop_s;
  doc["span_s"] = grid.geometry.segment_span_s;
  doc["segments"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < grid.probs.size(); ++i) {
    doc["segments"].push_back({{"index", i},
                               {"start_s", static_cast<double>(i) * grid.geometry.hop_s},
                               {"p_absent", grid.probs[i][0]},
                               {"p_present", grid.probs[i][1]}});
  }
  doc["decision"] = {
      {"hard",
       {{"present", hard.present}, {"aggregate_present_prob", hard.aggregate_present_prob}}},
      {"soft",
       {{"present", soft.present}, {"aggregate_present_prob", soft.aggregate_present_prob}}}};
  return doc.dump(2) + "\n";
}

std::string timeline_svg(const SegmentProbabilityGrid& grid, const std::string& item_name) {
  const int cell = 24, gap = 2, label_h = 20, margin = 8;
  const int n = static_cast<int>(grid.probs.size());
  const int width = 2 * margin + n * cell + (n - 1) * gap;
  const int height = 2 * margin + label_h + 2 * cell + gap;

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                width, height, width, height);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "  <text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\">"
                "%s (recording %s)</text>\n",
                margin, margin + 12, item_name.c_str(), grid.recording_id.c_str());
  svg += buf;
  for (int row = 0; row < 2; ++row) {
    for (int i = 0; i < n; ++i) {
      // top row shows the present probability, bottom row the absent one
      const double p = row == 0 ? grid.probs[static_cast<std::size_t>(i)][1]
                                : grid.probs[static_cast<std::size_t>(i)][0];
      const int x = margin + i * (cell + gap);
      const int y = margin + label_h + row * (cell + gap);
      std::snprintf(buf, sizeof(buf),
                    "  <rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"%s\">"
                    "<title>segment %d p=%.3f</title></rect>\n",
                    x, y, cell, cell, ramp_color(p).c_str(), i, p);
      svg += buf;
    }
  }
  svg += "</svg>\n";
  return svg;
}

void write_timeline(const SegmentProbabilityGrid& grid, const std::string& item_name,
                    const std::string& json_path, const std::string& svg_path) {
  write_text(json_path, timeline_json(grid, item_name));
  write_text(svg_path, timeline_svg(grid, item_name));
}

}  // namespace itemvoice::vote
