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

#include "itemvoice/segmentation.hpp"

#include <cmath>
#include <cstring>

#include "itemvoice/error.hpp"

namespace itemvoice::seg {

GridGeometry grid_geometry(double duration_s, bool drop_last) {
  if (duration_s < kSequenceSpanS) {
    raise(ErrorKind::TooShort, "duration " + std::to_string(duration_s) + " s < " +
                                   std::to_string(kSequenceSpanS) + " s");
  }
  GridGeometry g;
  g.recording_duration_s = duration_s;
  g.drop_last = drop_last;
  const auto inclusive = static_cast<std::int64_t>(std::floor(duration_s - kSequenceSpanS));
  g.n_segments = drop_last ? inclusive : inclusive + 1;
  if (g.n_segments < 1) {
    raise(ErrorKind::TooShort, "duration " + std::to_string(duration_s) +
                                   " s leaves no segment with drop_last");
  }
  return g;
}

std::int64_t cnn_window_count(double duration_s) {
  if (duration_s < kWindowSpanS) {
    raise(ErrorKind::TooShort, "duration " + std::to_string(duration_s) + " s < " +
                                   std::to_string(kWindowSpanS) + " s");
  }
  return static_cast<std::int64_t>(std::floor(duration_s - kWindowSpanS)) + 1;
}

std::int64_t frames_per_second(const dsp::StftConfig& cfg) {
  const std::int64_t hop = cfg.hop_samples();
  if (cfg.sample_rate_hz % hop != 0) {
    raise(ErrorKind::BadConfig, "hop must divide one second for grid-aligned slicing");
  }
  return cfg.sample_rate_hz / hop;
}

dsp::LogMelSpectrogram slice_window(const dsp::LogMelSpectrogram& full,
                                    const dsp::StftConfig& cfg, std::int64_t start_s) {
  const std::int64_t fps = frames_per_second(cfg);
  const std::int64_t frames = static_cast<std::int64_t>(kWindowSpanS) * fps;
  const std::int64_t first = start_s * fps;
  if (start_s < 0 || first + frames > full.n_frames()) {
    raise(ErrorKind::TooShort, "window at " + std::to_string(start_s) + " s exceeds " +
                                   std::to_string(full.n_frames()) + " frames");
  }
  dsp::LogMelSpectrogram out;
  out.recording_id = full.recording_id;
  out.start_s = full.start_s + static_cast<double>(start_s);
  const std::int64_t mels = full.n_mels();
  out.values = nn::Tensor::zeros({frames, mels});
  std::memcpy(out.values.data.data(), full.values.data.data() + first * mels,
              sizeof(double) * static_cast<std::size_t>(frames * mels));
  return out;
}

std::vector<dsp::LogMelSpectrogram> make_cnn_samples(const io::Recording& rec,
                                                     const dsp::StftConfig& cfg,
                                                     const dsp::MelFilterbank& bank) {
  const std::int64_t n = cnn_window_count(rec.duration_s());
  const dsp::LogMelSpectrogram full = dsp::compute_log_mel(rec.samples, cfg, bank, rec.id);
  std::vector<dsp::LogMelSpectrogram> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t s = 0; s < n; ++s) out.push_back(slice_window(full, cfg, s));
  return out;
}

std::vector<SegmentSequence> make_sequences(const io::Recording& rec,
                                            const dsp::StftConfig& cfg,
                                            const dsp::MelFilterbank& bank, bool drop_last) {
  const GridGeometry g = grid_geometry(rec.duration_s(), drop_last);
  const dsp::LogMelSpectrogram full = dsp::compute_log_mel(rec.samples, cfg, bank, rec.id);
  std::vector<SegmentSequence> out;
  out.reserve(static_cast<std::size_t>(g.n_segments));
  for (std::int64_t j = 0; j < g.n_segments; ++j) {
    SegmentSequence seq;
    seq.recording_id = rec.id;
    seq.segment_index = j;
    seq.start_s = static_cast<double>(j);
    for (std::int64_t k = 0; k < kSpectrogramsPerSequence; ++k) {
      seq.spectrograms.push_back(slice_window(full, cfg, j + k));
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace itemvoice::seg
