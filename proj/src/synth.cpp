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

#include "itemvoice/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <vector>

#include "itemvoice/dsp.hpp"
#include "itemvoice/error.hpp"
#include "itemvoice/functionals.hpp"
#include "itemvoice/manifest.hpp"
#include "itemvoice/rng.hpp"
#include "itemvoice/scale.hpp"
#include "itemvoice/segmentation.hpp"
#include "itemvoice/wav.hpp"

namespace itemvoice::synth {

namespace {

constexpr int kHarmonics = 5;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> render_voice(bool depressed, double duration_s, int sample_rate_hz,
                                 Rng& rng) {
  const double f0_base = depressed ? 110.0 : 220.0;
  const double am_base = depressed ? 2.0 : 6.0;
  const double f0 = f0_base * (1.0 + 0.02 * (2.0 * rng.uniform() - 1.0));
  const double am = am_base * (1.0 + 0.10 * (2.0 * rng.uniform() - 1.0));
  double phase[kHarmonics];
  for (double& p : phase) p = rng.uniform(0.0, kTwoPi);
  const double am_phase = rng.uniform(0.0, kTwoPi);

  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate_hz;
    double s = 0.0;
    for (int k = 0; k < kHarmonics; ++k) {
      s += std::sin(kTwoPi * f0 * (k + 1) * t + phase[k]) / (k + 1);
    }
    const double env = (1.0 + 0.8 * std::sin(kTwoPi * am * t + am_phase)) / 1.8;
    x[i] = 0.2 * s * env + 0.01 * (2.0 * rng.uniform() - 1.0);
  }
  return x;
}

// 88 per-window statistics standing in for an external functional extractor:
// 64 mel-band means, 16 low-band deviations, then loudness dynamics that
// separate the two amplitude-modulation rates.
std::vector<double> window_stats(const dsp::LogMelSpectrogram& win,
                                 const std::vector<double>& samples, std::int64_t first,
                                 std::int64_t count) {
  const std::int64_t frames = win.n_frames(), mels = win.n_mels();
  std::vector<double> v;
  v.reserve(88);

  std::vector<double> col_mean(static_cast<std::size_t>(mels), 0.0);
  for (std::int64_t f = 0; f < frames; ++f) {
    for (std::int64_t m = 0; m < mels; ++m) {
      col_mean[static_cast<std::size_t>(m)] += win.values(f, m);
    }
  }
  for (double& c : col_mean) c /= static_cast<double>(frames);
  v.insert(v.end(), col_mean.begin(), col_mean.end());

  for (std::int64_t m = 0; m < 16; ++m) {
    double acc = 0.0;
    for (std::int64_t f = 0; f < frames; ++f) {
      const double d = win.values(f, m) - col_mean[static_cast<std::size_t>(m)];
      acc += d * d;
    }
    v.push_back(std::sqrt(acc / static_cast<double>(frames)));
  }

  std::vector<double> loud(static_cast<std::size_t>(frames), 0.0);
  for (std::int64_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::int64_t m = 0; m < mels; ++m) acc += win.values(f, m);
    loud[static_cast<std::size_t>(f)] = acc / static_cast<double>(mels);
  }
  double l_mean = 0.0;
  for (double l : loud) l_mean += l;
  l_mean /= static_cast<double>(frames);
  double l_var = 0.0, flux = 0.0;
  for (std::size_t f = 0; f < loud.size(); ++f) {
    l_var += (loud[f] - l_mean) * (loud[f] - l_mean);
    if (f > 0) flux += std::abs(loud[f] - loud[f - 1]);
  }
  l_var /= static_cast<double>(frames);
  v.push_back(l_mean);
  v.push_back(std::sqrt(l_var));
  v.push_back(flux / static_cast<double>(frames - 1));

  // Normalized loudness autocorrelation; lag 8 peaks for the fast AM rate,
  // lag 25 for the slow one.
  for (std::int64_t lag : {std::int64_t{8}, std::int64_t{25}}) {
    double acc = 0.0;
    for (std::int64_t f = lag; f < frames; ++f) {
      acc += (loud[static_cast<std::size_t>(f)] - l_mean) *
             (loud[static_cast<std::size_t>(f - lag)] - l_mean);
    }
    v.push_back(l_var > 1e-12 ? acc / (static_cast<double>(frames - lag) * l_var) : 0.0);
  }

  double num = 0.0, den = 0.0;
  for (std::int64_t m = 0; m < mels; ++m) {
    const double p = std::exp(col_mean[static_cast<std::size_t>(m)]);
    num += static_cast<double>(m) * p;
    den += p;
  }
  v.push_back(den > 0.0 ? num / den : 0.0);

  std::int64_t crossings = 0;
  double rms = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    const double s = samples[static_cast<std::size_t>(first + i)];
    rms += s * s;
    if (i > 0 && (s >= 0.0) != (samples[static_cast<std::size_t>(first + i - 1)] >= 0.0)) {
      ++crossings;
    }
  }
  v.push_back(static_cast<double>(crossings) / static_cast<double>(count));
  v.push_back(std::sqrt(rms / static_cast<double>(count)));
  return v;
}

}  // namespace

SynthSummary generate_corpus(const SynthConfig& cfg) {
  if (cfg.out_dir.empty()) raise(ErrorKind::BadConfig, "synth needs an output directory");
  if (cfg.n_speakers < 2) raise(ErrorKind::BadConfig, "synth needs at least 2 speakers");
  if (cfg.n_train + cfg.n_val + cfg.n_test != cfg.n_speakers) {
    raise(ErrorKind::BadConfig, "split sizes must sum to n_speakers");
  }
  if (cfg.n_train < 2 || cfg.n_val < 2 || cfg.n_test < 2) {
    raise(ErrorKind::BadConfig, "each split needs at least 2 speakers for both classes");
  }
  if (cfg.duration_s < seg::kSequenceSpanS + 1.0) {
    raise(ErrorKind::TooShort, "recordings must cover at least one 13 s segment");
  }

  const corpus::ScaleDefinition scale = corpus::scale_by_name(cfg.scale_name);
  const int present_score = std::min(2, scale.score_max);

  namespace fs = std::filesystem;
  fs::create_directories(fs::path(cfg.out_dir) / "wav");

  corpus::Manifest manifest;
  manifest.scale = scale;
  manifest.has_total_column = true;

  std::vector<corpus::FunctionalFeatureVector> functionals;
  dsp::StftConfig stft;
  stft.sample_rate_hz = cfg.sample_rate_hz;
  dsp::MelFilterbank bank;
  if (cfg.write_functionals) {
    bank = dsp::build_mel_filterbank(stft.sample_rate_hz, stft.fft_size, 64);
  }

  Rng master(cfg.seed);
  SynthSummary summary;
  char buf[64];

  for (int i = 0; i < cfg.n_speakers; ++i) {
    const bool depressed = (i % 2) == 1;
    std::snprintf(buf, sizeof(buf), "rec%03d", i);
    const std::string rec_id = buf;
    std::snprintf(buf, sizeof(buf), "spk%03d", i);
    const std::string spk_id = buf;
    const std::string rel_path = "wav/" + rec_id + ".wav";

    Rng rec_rng = master.fork(static_cast<std::uint64_t>(i));
    const std::vector<double> samples =
        render_voice(depressed, cfg.duration_s, cfg.sample_rate_hz, rec_rng);
    io::write_wav((fs::path(cfg.out_dir) / rel_path).string(), samples, cfg.sample_rate_hz);

    corpus::ManifestRow row;
    row.recording_id = rec_id;
    row.speaker_id = spk_id;
    row.path = rel_path;
    row.split = i < cfg.n_train ? "train" : (i < cfg.n_train + cfg.n_val ? "val" : "test");
    row.scores.assign(static_cast<std::size_t>(scale.n_items()),
                      depressed ? present_score : 0);
    row.total = depressed ? present_score * scale.n_items() : 0;
    manifest.rows.push_back(std::move(row));

    if (cfg.write_functionals) {
      const dsp::LogMelSpectrogram full = dsp::compute_log_mel(samples, stft, bank, rec_id);
      const std::int64_t n_windows = seg::cnn_window_count(cfg.duration_s);
      const std::int64_t window_samples =
          static_cast<std::int64_t>(seg::kWindowSpanS) * cfg.sample_rate_hz;
      for (std::int64_t w = 0; w < n_windows; ++w) {
        const dsp::LogMelSpectrogram win = seg::slice_window(full, stft, w);
        functionals.push_back(
            {rec_id, w,
             window_stats(win, samples, w * cfg.sample_rate_hz, window_samples)});
      }
    }

    ++summary.n_recordings;
    if (depressed) ++summary.n_depressed;
  }

  summary.manifest_path = (fs::path(cfg.out_dir) / "manifest.csv").string();
  corpus::write_manifest(summary.manifest_path, manifest);
  if (cfg.write_functionals) {
    summary.functionals_path = (fs::path(cfg.out_dir) / "functionals.csv").string();
    corpus::write_functionals(summary.functionals_path, functionals);
  }
  return summary;
}

}  // namespace itemvoice::synth
