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

#ifndef ITEMVOICE_MANIFEST_HPP_
#define ITEMVOICE_MANIFEST_HPP_

#include <string>
#include <vector>

#include "itemvoice/scale.hpp"

namespace itemvoice::corpus {

struct ItemLabel {
  int item_index;  // 1-based
  int raw_score;
  bool present;  // raw_score > 0
};

struct ManifestRow {
  std::string recording_id;
  std::string speaker_id;
  std::string path;   // as written in the CSV; resolve against the manifest dir
  std::string split;  // "train" | "val" | "test"
  std::vector<int> scores;  // one per scale item, in item order
  int total = -1;           // -1 when the optional total column is absent
};

struct RecordingLabels {
  std::vector<ItemLabel> items;
  int total = 0;
  bool depressed = false;
};

struct Manifest {
  ScaleDefinition scale;
  std::vector<ManifestRow> rows;
  bool has_total_column = false;

  const ManifestRow& row_by_id(const std::string& recording_id) const;
  std::vector<std::size_t> split_indices(const std::string& split) const;
};

// Columns: recording_id,speaker_id,path,split,item_1..item_N[,total].
// Enforces score ranges, total consistency, speaker-disjoint splits, and
// non-emptiness. Cells must not themselves contain the delimiter.
Manifest parse_manifest(const std::string& path, const ScaleDefinition& scale);

void write_manifest(const std::string& path, const Manifest& manifest);

// present = score > 0; depressed = total >= scale threshold. The total is the
// row's column when present, otherwise the item-score sum.
RecordingLabels binarize_labels(const ManifestRow& row, const ScaleDefinition& scale);

// Joins a possibly relative audio path onto the manifest's directory.
std::string resolve_path(const std::string& manifest_path, const std::string& row_path);

}  // namespace itemvoice::corpus

#endif  // ITEMVOICE_MANIFEST_HPP_
