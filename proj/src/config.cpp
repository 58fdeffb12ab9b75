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

#include "itemvoice/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <set>

#include "itemvoice/error.hpp"

namespace itemvoice::cli {

std::uint64_t effective_seed(std::uint64_t configured) {
  const char* env = std::getenv("ITEMVOICE_SEED");
  if (env == nullptr || *env == '\0') return configured;
  std::uint64_t value = 0;
  for (const char* p = env; *p != '\0'; ++p) {
    if (!std::isdigit(static_cast<unsigned char>(*p))) {
      raise(ErrorKind::BadConfig,
            std::string("ITEMVOICE_SEED must be a non-negative integer, got '") + env + "'");
    }
    value = value * 10 + static_cast<std::uint64_t>(*p - '0');
  }
  return value;
}

std::vector<int> parse_items(const std::string& items, const corpus::ScaleDefinition& scale) {
  std::vector<int> out;
  if (items.empty() || items == "all") {
    for (int k = 1; k <= scale.n_items(); ++k) out.push_back(k);
    return out;
  }
  std::set<int> seen;
  std::size_t pos = 0;
  while (pos <= items.size()) {
    std::size_t comma = items.find(',', pos);
    if (comma == std::string::npos) comma = items.size();
    std::string cell = items.substr(pos, comma - pos);
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    while (!cell.empty() && cell.back() == ' ') cell.pop_back();
    if (cell.empty()) raise(ErrorKind::BadConfig, "empty entry in item list '" + items + "'");
    int value = 0;
    for (char ch : cell) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) {
        raise(ErrorKind::BadConfig, "item list entry '" + cell + "' is not an index");
      }
      value = value * 10 + (ch - '0');
    }
    if (value < 1 || value > scale.n_items()) {
      raise(ErrorKind::BadConfig, "item index " + cell + " outside 1.." +
                                      std::to_string(scale.n_items()));
    }
    if (!seen.insert(value).second) {
      raise(ErrorKind::BadConfig, "item index " + cell + " listed twice");
    }
    out.push_back(value);
    pos = comma + 1;
  }
  return out;
}

dsp::StftConfig stft_with_window(const std::string& window_name) {
  dsp::StftConfig cfg;
  cfg.window = dsp::window_by_name(window_name);
  return cfg;
}

std::string item_checkpoint_path(const std::string& dir, int item_index) {
  namespace fs = std::filesystem;
  if (item_index == 0) return (fs::path(dir) / "depression.ivck").string();
  char name[32];
  std::snprintf(name, sizeof(name), "item_%02d.ivck", item_index);
  return (fs::path(dir) / name).string();
}

std::string item_log_path(const std::string& dir, int item_index) {
  namespace fs = std::filesystem;
  if (item_index == 0) return (fs::path(dir) / "depression_log.csv").string();
  char name[32];
  std::snprintf(name, sizeof(name), "item_%02d_log.csv", item_index);
  return (fs::path(dir) / name).string();
}

}  // namespace itemvoice::cli
