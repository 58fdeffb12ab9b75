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

#include "itemvoice/functionals.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
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

char detect_delimiter(const std::string& header) {
  const auto commas = std::count(header.begin(), header.end(), ',');
  const auto semis = std::count(header.begin(), header.end(), ';');
  return semis > commas ? ';' : ',';
}

double parse_double(const std::string& cell, std::size_t row, std::size_t col) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || cell.empty()) {
    raise(ErrorKind::CorruptFile, "non-numeric cell '" + cell + "' at row " +
                                      std::to_string(row) + " column " + std::to_string(col));
  }
  if (!std::isfinite(v)) {
    raise(ErrorKind::NonFiniteValue, "non-finite value at row " + std::to_string(row) +
                                         " column " + std::to_string(col));
  }
  return v;
}

}  // namespace

std::vector<FunctionalFeatureVector> import_functionals(const std::string& path,
                                                        std::int64_t expected_dim) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::IoError, "cannot open functionals CSV: " + path);

  std::string line;
  if (!std::getline(in, line)) raise(ErrorKind::CorruptFile, "functionals CSV is empty: " + path);
  const char delim = detect_delimiter(line);
  const std::vector<std::string> header = split_line(line, delim);
  if (static_cast<std::int64_t>(header.size()) != expected_dim + 2) {
    raise(ErrorKind::DimensionMismatch,
          "functionals CSV has " + std::to_string(header.size() - 2) +
              " feature columns, want " + std::to_string(expected_dim));
  }

  std::vector<FunctionalFeatureVector> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line, delim);
    if (static_cast<std::int64_t>(cells.size()) != expected_dim + 2) {
      raise(ErrorKind::DimensionMismatch,
            "row " + std::to_string(lineno) + " has " + std::to_string(cells.size() - 2) +
                " feature cells, want " + std::to_string(expected_dim));
    }
    FunctionalFeatureVector v;
    v.recording_id = cells[0];
    std::int64_t wi = 0;
    const auto [ptr, ec] = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), wi);
    if (ec != std::errc() || ptr != cells[1].data() + cells[1].size() || wi < 0) {
      raise(ErrorKind::CorruptFile,
            "bad window_index '" + cells[1] + "' at row " + std::to_string(lineno));
    }
    v.window_index = wi;
    v.values.reserve(static_cast<std::size_t>(expected_dim));
    for (std::int64_t i = 0; i < expected_dim; ++i) {
      v.values.push_back(parse_double(cells[static_cast<std::size_t>(i + 2)], lineno,
                                      static_cast<std::size_t>(i + 2)));
    }
    out.push_back(std::move(v));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.recording_id != b.recording_id ? a.recording_id < b.recording_id
                                            : a.window_index < b.window_index;
  });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].recording_id == out[i - 1].recording_id &&
        out[i].window_index == out[i - 1].window_index) {
      raise(ErrorKind::CorruptFile, "duplicate window " + std::to_string(out[i].window_index) +
                                        " for recording '" + out[i].recording_id + "'");
    }
  }
  return out;
}

std::map<std::string, std::vector<std::vector<double>>> group_functionals(
    const std::vector<FunctionalFeatureVector>& rows) {
  std::map<std::string, std::vector<std::vector<double>>> out;
  for (const FunctionalFeatureVector& v : rows) out[v.recording_id].push_back(v.values);
  return out;
}

void write_functionals(const std::string& path,
                       const std::vector<FunctionalFeatureVector>& rows,
                       char delimiter) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::IoError, "cannot open for writing: " + path);
  out << "recording_id" << delimiter << "window_index";
  const std::size_t dim = rows.empty() ? 0 : rows.front().values.size();
  for (std::size_t i = 1; i <= dim; ++i) out << delimiter << "f" << i;
  out << "\n";
  out.precision(17);
  for (const FunctionalFeatureVector& v : rows) {
    out << v.recording_id << delimiter << v.window_index;
    for (double x : v.values) out << delimiter << x;
    out << "\n";
  }
  if (!out) raise(ErrorKind::IoError, "write failed: " + path);
}

}  // namespace itemvoice::corpus
