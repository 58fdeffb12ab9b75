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

#ifndef ITEMVOICE_DSP_HPP_
#define ITEMVOICE_DSP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "itemvoice/tensor.hpp"

namespace itemvoice::dsp {

enum class WindowFunction { hann, rectangular };

WindowFunction window_by_name(const std::string& name);
std::string window_name(WindowFunction w);

struct StftConfig {
  int sample_rate_hz = 16000;
  double frame_length_ms = 20.0;
  double hop_ms = 20.0;  // equal to the frame length: zero overlap
  WindowFunction window = WindowFunction::hann;
  int fft_size = 512;

  std::int64_t frame_samples() const;  // 320 at 16 kHz / 20 ms
  std::int64_t hop_samples() const;
  std::int64_t n_bins() const { return fft_size / 2 + 1; }
};

struct MelFilterbank {
  int sample_rate_hz = 0;
  int fft_size = 0;
  int n_mels = 0;
  nn::Tensor weights;  // [n_mels, fft_size/2+1], triangular rows on the HTK mel scale
};

struct LogMelSpectrogram {
  std::string recording_id;
  double start_s = 0.0;
  nn::Tensor values;  // [n_frames, n_mels], natural log of floored mel power

  std::int64_t n_frames() const { return values.dim(0); }
  std::int64_t n_mels() const { return values.dim(1); }
};

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<double>& re, std::vector<double>& im);

double hz_to_mel(double hz);   // 2595 * log10(1 + hz/700)
double mel_to_hz(double mel);

// Power spectrum per frame: [n_frames, fft/2+1], cell = |DFT bin|^2.
// Frames are windowed then zero-padded to fft_size.
nn::Tensor stft_power(const std::vector<double>& samples, const StftConfig& cfg);

MelFilterbank build_mel_filterbank(int sample_rate_hz, int fft_size, int n_mels = 64);

LogMelSpectrogram log_mel(const nn::Tensor& power, const MelFilterbank& bank,
                          double floor_value = 1e-10);

// Full pipeline over a waveform; start_s records the window offset.
LogMelSpectrogram compute_log_mel(const std::vector<double>& samples, const StftConfig& cfg,
                                  const MelFilterbank& bank, const std::string& recording_id,
                                  double start_s = 0.0);

// Per-spectrogram standardization (mean 0, stddev 1; stddev floored at 1e-8).
void standardize(nn::Tensor& values);

// Cache file: "IVSC" magic, u32 version, u32 n_frames, u32 n_mels,
// f64 start_s, then n_frames*n_mels float32 little-endian values.
void save_spectrogram_cache(const std::string& path, const LogMelSpectrogram& spec);
LogMelSpectrogram load_spectrogram_cache(const std::string& path);

}  // namespace itemvoice::dsp

#endif  // ITEMVOICE_DSP_HPP_
