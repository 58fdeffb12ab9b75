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

#ifndef ITEMVOICE_TIMELINE_HPP_
#define ITEMVOICE_TIMELINE_HPP_

#include <string>

#include "itemvoice/vote.hpp"

namespace itemvoice::vote {

// {recording_id, item_index, item_name, hop_s, span_s,
//  segments: [{index, start_s, p_absent, p_present}],
//  decision: {hard: {present, aggregate_present_prob}, soft: {...}}}
std::string timeline_json(const SegmentProbabilityGrid& grid, const std::string& item_name);

// Two-row cell grid (top = present, bottom = absent probability); fill colors
// interpolate linearly from #2a0a4a at p=0 to #f5e642 at p=1.
std::string timeline_svg(const SegmentProbabilityGrid& grid, const std::string& item_name);

// Linear ramp sample as "#rrggbb"; p clamped to [0,1].
std::string ramp_color(double p);

void write_timeline(const SegmentProbabilityGrid& grid, const std::string& item_name,
                    const std::string& json_path, const std::string& svg_path);

}  // namespace itemvoice::vote

#endif  // ITEMVOICE_TIMELINE_HPP_
