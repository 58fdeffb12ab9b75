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

#include "itemvoice/dsp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <utility>

#include "itemvoice/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "cache IO assumes a little-endian host");

namespace itemvoice::dsp {

namespace {

constexpr char kCacheMagic[4] = {'I', 'V', 'S', 'C'};
constexpr std::uint32_t kCacheVersion = 1;

bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

WindowFunction window_by_name(const std::string& name) {
  if (name == "hann") return WindowFunction::hann;
  if (name == "rectangular" || name == "rect") return WindowFunction::rectangular;
  raise(ErrorKind::BadConfig, "unknown window '" + name + "' (use hann or rectangular)");
}

std::string window_name(WindowFunction w) {
  return w == WindowFunction::hann ? "hann" : "rectangular";
}

std::int64_t StftConfig::frame_samples() const {
  const double exact = sample_rate_hz * frame_length_ms / 1000.0;
  const auto n = static_cast<std::int64_t>(std::llround(exact));
  if (n < 1 || std::abs(exact - static_cast<double>(n)) > 1e-9) {
    raise(ErrorKind::BadConfig, "frame length must be a whole number of samples");
  }
  return n;
}

std::int64_t StftConfig::hop_samples() const {
  const double exact = sample_rate_hz * hop_ms / 1000.0;
  const auto n = static_cast<std::int64_t>(std::llround(exact));
  if (n < 1 || std::abs(exact - static_cast<double>(n)) > 1e-9) {
    raise(ErrorKind::BadConfig, "hop must be a whole number of samples");
  }
  return n;
}

void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
  const std::size_t n = re.size();
  if (im.size() != n || !is_pow2(static_cast<std::int64_t>(n))) {
    raise(ErrorKind::BadConfig, "FFT size must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const double cr = std::cos(ang * static_cast<double>(k));
        const double ci = std::sin(ang * static_cast<double>(k));
        const std::size_t a = i + k, b = i + k + len / 2;
        const double tr = re[b] * cr - im[b] * ci;
        const double ti = re[b] * ci + im[b] * cr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
      }
    }
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

nn::Tensor stft_power(const std::vector<double>& samples, const StftConfig& cfg) {
  const std::int64_t frame = cfg.frame_samples();
  const std::int64_t hop = cfg.hop_samples();
  if (!is_pow2(cfg.fft_size) || cfg.fft_size < frame) {
    raise(ErrorKind::BadConfig, "fft_size must be a power of two >= frame length");
  }
  if (static_cast<std::int64_t>(samples.size()) < frame) {
    raise(ErrorKind::TooShort, "need at least " + std::to_string(frame) + " samples, got " +
                                   std::to_string(samples.size()));
  }
  const std::int64_t n_frames =
      (static_cast<std::int64_t>(samples.size()) - frame) / hop + 1;
  const std::int64_t bins = cfg.n_bins();

  std::vector<double> win(static_cast<std::size_t>(frame), 1.0);
  if (cfg.window == WindowFunction::hann) {
    // Periodic Hann, the STFT convention: w[n] = 0.5 - 0.5 cos(2 pi n / L).
    for (std::int64_t i = 0; i < frame; ++i) {
      win[static_cast<std::size_t>(i)] =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(frame));
    }
  }

  nn::Tensor power = nn::Tensor::zeros({n_frames, bins});
  std::vector<double> re(static_cast<std::size_t>(cfg.fft_size));
  std::vector<double> im(static_cast<std::size_t>(cfg.fft_size));
  for (std::int64_t t = 0; t < n_frames; ++t) {
    std::fill(re.begin(), re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    const double* src = samples.data() + t * hop;
    for (std::int64_t i = 0; i < frame; ++i) {
      re[static_cast<std::size_t>(i)] = src[i] * win[static_cast<std::size_t>(i)];
    }
    fft_radix2(re, im);
    double* prow = power.data.data() + t * bins;
    for (std::int64_t k = 0; k < bins; ++k) {
      prow[k] = re[static_cast<std::size_t>(k)] * re[static_cast<std::size_t>(k)] +
                im[static_cast<std::size_t>(k)] * im[static_cast<std::size_t>(k)];
    }
  }
  return power;
}

MelFilterbank build_mel_filterbank(int sample_rate_hz, int fft_size, int n_mels) {
  if (n_mels < 1) raise(ErrorKind::BadConfig, "n_mels must be >= 1");
  if (!is_pow2(fft_size)) raise(ErrorKind::BadConfig, "fft_size must be a power of two");
  const std::int64_t bins = fft_size / 2 + 1;
  const double f_max = sample_rate_hz / 2.0;
  const double mel_min = hz_to_mel(0.0);
  const double mel_max = hz_to_mel(f_max);

  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (int i = 0; i < n_mels + 2; ++i) {
    const double mel = mel_min + (mel_max - mel_min) * static_cast<double>(i) /
                                     static_cast<double>(n_mels + 1);
    edges[static_cast<std::size_t>(i)] = mel_to_hz(mel);
  }

  MelFilterbank bank;
  bank.sample_rate_hz = sample_rate_hz;
  bank.fft_size = fft_size;
  bank.n_mels = n_mels;
  bank.weights = nn::Tensor::zeros({n_mels, bins});
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[static_cast<std::size_t>(m)];
    const double mid = edges[static_cast<std::size_t>(m) + 1];
    const double hi = edges[static_cast<std::size_t>(m) + 2];
    bool any = false;
    for (std::int64_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / fft_size;
      double w = 0.0;
      if (f > lo && f < mid) {
        w = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      if (w > 0.0) {
        bank.weights(m, k) = w;
        any = true;
      }
    }
    if (!any) {
      raise(ErrorKind::DegenerateFilter,
            "mel filter " + std::to_string(m) + " covers no FFT bin; fft_size " +
                std::to_string(fft_size) + " too small for " + std::to_string(n_mels) + " mels");
    }
  }
  return bank;
}

LogMelSpectrogram log_mel(const nn::Tensor& power, const MelFilterbank& bank,
                          double floor_value) {
  if (power.ndim() != 2 || power.dim(1) != bank.weights.dim(1)) {
    raise(ErrorKind::ShapeMismatch, "power bins " + power.shape_str() +
                                        " do not match filterbank " + bank.weights.shape_str());
  }
  const std::int64_t n_frames = power.dim(0), bins = power.dim(1), mels = bank.n_mels;
  LogMelSpectrogram out;
  out.values = nn::Tensor::zeros({n_frames, mels});
  for (std::int64_t t = 0; t < n_frames; ++t) {
    const double* prow = power.data.data() + t * bins;
    double* orow = out.values.data.data() + t * mels;
    for (std::int64_t m = 0; m < mels; ++m) {
      const double* wrow = bank.weights.data.data() + m * bins;
      double acc = 0.0;
      for (std::int64_t k = 0; k < bins; ++k) acc += prow[k] * wrow[k];
      orow[m] = std::log(std::max(acc, floor_value));
    }
  }
  return out;
}

LogMelSpectrogram compute_log_mel(const std::vector<double>& samples, const StftConfig& cfg,
                                  const MelFilterbank& bank, const std::string& recording_id,
                                  double start_s) {
  LogMelSpectrogram spec = log_mel(stft_power(samples, cfg), bank);
  spec.recording_id = recording_id;
  spec.start_s = start_s;
  return spec;
}

void standardize(nn::Tensor& values) {
  const std::int64_t n = values.numel();
  if (n == 0) return;
  double mean = 0.0;
  for (double v : values.data) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values.data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double inv = 1.0 / std::max(std::sqrt(var), 1e-8);
  for (double& v : values.data) v = (v - mean) * inv;
}

void save_spectrogram_cache(const std::string& path, const LogMelSpectrogram& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::IoError, "cannot open for writing: " + path);
  const std::uint32_t version = kCacheVersion;
  const std::uint32_t n_frames = static_cast<std::uint32_t>(spec.n_frames());
  const std::uint32_t n_mels = static_cast<std::uint32_t>(spec.n_mels());
  const double start_s = spec.start_s;
  out.write(kCacheMagic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&n_frames), 4);
  out.write(reinterpret_cast<const char*>(&n_mels), 4);
  out.write(reinterpret_cast<const char*>(&start_s), 8);
  std::vector<float> buf(spec.values.data.size());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(spec.values.data[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) raise(ErrorKind::IoError, "write failed: " + path);
}

LogMelSpectrogram load_spectrogram_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::IoError, "cannot open cache: " + path);
  auto read = [&in, &path](void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      raise(ErrorKind::CorruptFile, "truncated cache: " + path);
    }
  };
  char magic[4];
  read(magic, 4);
  if (std::memcmp(magic, kCacheMagic, 4) != 0) {
    raise(ErrorKind::BadHeader, "not a spectrogram cache (bad magic): " + path);
  }
  std::uint32_t version = 0, n_frames = 0, n_mels = 0;
  double start_s = 0.0;
  read(&version, 4);
  if (version != kCacheVersion) {
    raise(ErrorKind::BadHeader, "unsupported cache version " + std::to_string(version));
  }
  read(&n_frames, 4);
  read(&n_mels, 4);
  read(&start_s, 8);
  if (n_frames == 0 || n_mels == 0) raise(ErrorKind::CorruptFile, "empty cache: " + path);

  LogMelSpectrogram spec;
  spec.recording_id = std::filesystem::path(path).stem().string();
  spec.start_s = start_s;
  std::vector<float> buf(static_cast<std::size_t>(n_frames) * n_mels);
  read(buf.data(), buf.size() * sizeof(float));
  spec.values = nn::Tensor::zeros({static_cast<std::int64_t>(n_frames),
                                   static_cast<std::int64_t>(n_mels)});
  for (std::size_t i = 0; i < buf.size(); ++i) {
    spec.values.data[i] = static_cast<double>(buf[i]);
  }
  return spec;
}

}  // namespace itemvoice::dsp
