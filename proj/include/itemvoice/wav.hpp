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

#ifndef ITEMVOICE_WAV_HPP_
#define ITEMVOICE_WAV_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace itemvoice::io {

struct Recording {
  std::string id;
  std::string speaker_id;
  std::string path;
  std::vector<double> samples;  // int16 / 32768, so the range is [-1, 1)
  int sample_rate_hz = 0;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// RIFF/WAVE, PCM 16-bit, mono. expected_rate_hz > 0 enforces the corpus
// contract (16 kHz); pass 0 to accept any rate.
Recording load_wav(const std::string& path, int expected_rate_hz = 16000);

// Writes mono PCM16. Samples are clamped to [-1, 1) before quantization so
// load_wav(write_wav(x)) round-trips exactly on lattice values k/32768.
void write_wav(const std::string& path, const std::vector<double>& samples,
               int sample_rate_hz);

}  // namespace itemvoice::io

#endif  // ITEMVOICE_WAV_HPP_
