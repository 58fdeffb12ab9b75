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

#include "itemvoice/manifest.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "itemvoice/error.hpp"

namespace itemvoice::corpus {

namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

int parse_int(const std::string& cell, const std::string& where) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    raise(ErrorKind::MissingScore, "non-integer score '" + cell + "' at " + where);
  }
  return v;
}

}  // namespace

const ManifestRow& Manifest::row_by_id(const std::string& recording_id) const {
  for (const ManifestRow& r : rows) {
    if (r.recording_id == recording_id) return r;
  }
  raise(ErrorKind::BadConfig, "manifest has no recording '" + recording_id + "'");
}

std::vector<std::size_t> Manifest::split_indices(const std::string& split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].split == split) out.push_back(i);
  }
  return out;
}

Manifest parse_manifest(const std::string& path, const ScaleDefinition& scale) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::IoError, "cannot open manifest: " + path);

  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::EmptyManifest, "manifest has no header: " + path);
  const std::vector<std::string> header = split_line(line, ',');

  const int n = scale.n_items();
  std::vector<std::string> expected = {"recording_id", "speaker_id", "path", "split"};
  for (int i = 1; i <= n; ++i) expected.push_back("item_" + std::to_string(i));
  bool has_total = false;
  if (header.size() == expected.size() + 1 && header.back() == "total") {
    has_total = true;
  } else if (header.size() != expected.size()) {
    raise(ErrorKind::BadHeader,
          "manifest header has " + std::to_string(header.size()) + " columns, want " +
              std::to_string(expected.size()) + " (+ optional total) for scale " + scale.name);
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (header[i] != expected[i]) {
      raise(ErrorKind::BadHeader,
            "manifest column " + std::to_string(i) + " is '" + header[i] + "', want '" +
                expected[i] + "'");
    }
  }

  Manifest m;
  m.scale = scale;
  m.has_total_column = has_total;
  std::map<std::string, std::string> speaker_split;
  std::set<std::string> seen_ids;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line, ',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (cells.size() != header.size()) {
      raise(ErrorKind::MissingScore, "row has " + std::to_string(cells.size()) +
                                         " cells, want " + std::to_string(header.size()) +
                                         " at " + where);
    }
    ManifestRow row;
    row.recording_id = cells[0];
    row.speaker_id = cells[1];
    row.path = cells[2];
    row.split = cells[3];
    if (row.recording_id.empty() || row.speaker_id.empty()) {
      raise(ErrorKind::CorruptFile, "empty id cell at " + where);
    }
    if (!seen_ids.insert(row.recording_id).second) {
      raise(ErrorKind::CorruptFile, "duplicate recording_id '" + row.recording_id + "' at " + where);
    }
    if (row.split != "train" && row.split != "val" && row.split != "test") {
      raise(ErrorKind::BadConfig, "split '" + row.split + "' not in {train,val,test} at " + where);
    }
    const auto [it, inserted] = speaker_split.emplace(row.speaker_id, row.split);
    if (!inserted && it->second != row.split) {
      raise(ErrorKind::SplitLeak, "speaker '" + row.speaker_id + "' appears in splits '" +
                                      it->second + "' and '" + row.split + "'");
    }
    int sum = 0;
    for (int i = 0; i < n; ++i) {
      const std::string& cell = cells[4 + static_cast<std::size_t>(i)];
      if (cell.empty()) {
        raise(ErrorKind::MissingScore, "missing item_" + std::to_string(i + 1) + " at " + where);
      }
      const int v = parse_int(cell, where);
      if (v < scale.score_min || v > scale.score_max) {
        raise(ErrorKind::ScoreOutOfRange,
              "item_" + std::to_string(i + 1) + " score " + std::to_string(v) + " outside [" +
                  std::to_string(scale.score_min) + "," + std::to_string(scale.score_max) +
                  "] at " + where);
      }
      row.scores.push_back(v);
      sum += v;
    }
    if (has_total) {
      row.total = parse_int(cells.back(), where);
      if (row.total != sum) {
        raise(ErrorKind::CorruptFile, "total " + std::to_string(row.total) +
                                          " != item sum " + std::to_string(sum) + " at " + where);
      }
    }
    m.rows.push_back(std::move(row));
  }
  if (m.rows.empty()) raise(ErrorKind::EmptyManifest, "manifest has no rows: " + path);
  return m;
}

void write_manifest(const std::string& path, const Manifest& manifest) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::IoError, "cannot open for writing: " + path);
  out << "recording_id,speaker_id,path,split";
  for (int i = 1; i <= manifest.scale.n_items(); ++i) out << ",item_" << i;
  if (manifest.has_total_column) out << ",total";
  out << "\n";
  for (const ManifestRow& r : manifest.rows) {
    out << r.recording_id << ',' << r.speaker_id << ',' << r.path << ',' << r.split;
    int sum = 0;
    for (int v : r.scores) {
      out << ',' << v;
      sum += v;
    }
    if (manifest.has_total_column) out << ',' << (r.total >= 0 ? r.total : sum);
    out << "\n";
  }
  if (!out) raise(ErrorKind::IoError, "write failed: " + path);
}

RecordingLabels binarize_labels(const ManifestRow& row, const ScaleDefinition& scale) {
  RecordingLabels out;
  int sum = 0;
  for (int i = 0; i < scale.n_items(); ++i) {
    const int v = row.scores[static_cast<std::size_t>(i)];
    out.items.push_back({scale.items[static_cast<std::size_t>(i)].index, v, v > 0});
    sum += v;
  }
  out.total = row.total >= 0 ? row.total : sum;
  out.depressed = out.total >= scale.depression_threshold;
  return out;
}

std::string resolve_path(const std::string& manifest_path, const std::string& row_path) {
  const std::filesystem::path p(row_path);
  if (p.is_absolute()) return row_path;
  return (std::filesystem::path(manifest_path).parent_path() / p).string();
}

}  // namespace itemvoice::corpus
