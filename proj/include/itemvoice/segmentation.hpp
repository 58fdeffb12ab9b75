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

#ifndef ITEMVOICE_SEGMENTATION_HPP_
#define ITEMVOICE_SEGMENTATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "itemvoice/dsp.hpp"
#include "itemvoice/wav.hpp"

namespace itemvoice::seg {

inline constexpr double kSequenceSpanS = 13.0;
inline constexpr double kHopS = 1.0;
inline constexpr double kWindowSpanS = 4.0;
inline constexpr std::int64_t kSpectrogramsPerSequence = 10;

struct GridGeometry {
  double recording_duration_s = 0.0;
  double segment_span_s = kSequenceSpanS;
  double hop_s = kHopS;
  std::int64_t n_segments = 0;
  bool drop_last = false;
};

// n_segments = floor(d-13)+1, or floor(d-13) when drop_last. drop_last needs
// d >= 14 for the count to stay positive.
GridGeometry grid_geometry(double duration_s, bool drop_last);

// 4 s windows at a 1 s hop: floor(d-4)+1 windows.
std::int64_t cnn_window_count(double duration_s);

// Frames per second of hop (50 at 16 kHz / 20 ms). Window starts land on
// frame boundaries, so sliced windows are bit-identical to standalone ones.
std::int64_t frames_per_second(const dsp::StftConfig& cfg);

// [frames_per_window, n_mels] slice of a full-recording log-mel at an
// integer-second offset.
dsp::LogMelSpectrogram slice_window(const dsp::LogMelSpectrogram& full,
                                    const dsp::StftConfig& cfg, std::int64_t start_s);

struct SegmentSequence {
  std::string recording_id;
  std::int64_t segment_index = 0;
  double start_s = 0.0;
  std::vector<dsp::LogMelSpectrogram> spectrograms;  // exactly 10, 1 s apart
};

std::vector<dsp::LogMelSpectrogram> make_cnn_samples(const io::Recording& rec,
                                                     const dsp::StftConfig& cfg,
                                                     const dsp::MelFilterbank& bank);

std::vector<SegmentSequence> make_sequences(const io::Recording& rec,
                                            const dsp::StftConfig& cfg,
                                            const dsp::MelFilterbank& bank, bool drop_last);

}  // namespace itemvoice::seg

#endif  // ITEMVOICE_SEGMENTATION_HPP_
