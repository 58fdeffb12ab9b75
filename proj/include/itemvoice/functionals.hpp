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

#ifndef ITEMVOICE_FUNCTIONALS_HPP_
#define ITEMVOICE_FUNCTIONALS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace itemvoice::corpus {

struct FunctionalFeatureVector {
  std::string recording_id;
  std::int64_t window_index;
  std::vector<double> values;
};

// CSV columns: recording_id, window_index, then exactly expected_dim numeric
// cells. Delimiter auto-detected between ',' and ';' from the header line.
// Output is sorted by (recording_id, window_index).
std::vector<FunctionalFeatureVector> import_functionals(const std::string& path,
                                                        std::int64_t expected_dim);

// Grouping helper for dataset assembly; vectors ordered by window_index.
std::map<std::string, std::vector<std::vector<double>>> group_functionals(
    const std::vector<FunctionalFeatureVector>& rows);

void write_functionals(const std::string& path,
                       const std::vector<FunctionalFeatureVector>& rows,
                       char delimiter = ',');

}  // namespace itemvoice::corpus

#endif  // ITEMVOICE_FUNCTIONALS_HPP_
