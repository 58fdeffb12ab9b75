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

#ifndef ITEMVOICE_SYNTH_HPP_
#define ITEMVOICE_SYNTH_HPP_

#include <cstdint>
#include <string>

namespace itemvoice::synth {

// Two-class synthetic corpus with a fully acoustic class signature. Class 1
// speaks at a 110 Hz fundamental with slow (~2 Hz) amplitude modulation and
// carries maximal item scores; class 0 at 220 Hz with fast (~6 Hz)
// modulation and all-zero scores. One speaker per recording, speakers split
// disjointly, classes alternating so every split stays balanced.
struct SynthConfig {
  std::string out_dir;
  std::string scale_name = "madrs";
  int n_speakers = 40;
  int n_train = 24;
  int n_val = 8;
  int n_test = 8;
  double duration_s = 20.0;
  int sample_rate_hz = 16000;
  std::uint64_t seed = 0;
  bool write_functionals = false;  // 88-dim per-window stats next to the wavs
};

struct SynthSummary {
  std::string manifest_path;
  std::string functionals_path;  // empty unless requested
  int n_recordings = 0;
  int n_depressed = 0;
};

SynthSummary generate_corpus(const SynthConfig& cfg);

}  // namespace itemvoice::synth

#endif  // ITEMVOICE_SYNTH_HPP_
