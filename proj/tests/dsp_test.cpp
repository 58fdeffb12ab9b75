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

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "itemvoice/dsp.hpp"
#include "itemvoice/error.hpp"
#include "support.hpp"

using itemvoice::ErrorKind;
using itemvoice::Rng;
using testsupport::capture;
using testsupport::TempDir;
namespace dsp = itemvoice::dsp;
namespace nn = itemvoice::nn;

namespace {

std::vector<double> sine(double freq_hz, int rate_hz, std::int64_t n, double amp = 0.5) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] =
        amp * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate_hz);
  }
  return x;
}

std::vector<double> random_signal(std::int64_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = rng.uniform(-0.9, 0.9);
  return x;
}

}  // namespace

TEST_SUITE("stft") {
  TEST_CASE("framing constants at 16 kHz") {
    const dsp::StftConfig cfg;
    CHECK(cfg.frame_samples() == 320);
    CHECK(cfg.hop_samples() == 320);
    CHECK(cfg.n_bins() == 257);
    CHECK(cfg.fft_size == 512);
  }

  TEST_CASE("4 s of audio gives exactly 200 frames") {
    const dsp::StftConfig cfg;
    const nn::Tensor p = dsp::stft_power(random_signal(64000, 2), cfg);
    CHECK(p.dim(0) == 200);
    CHECK(p.dim(1) == 257);
  }

  TEST_CASE("all-zero input gives an all-zero power matrix") {
    const dsp::StftConfig cfg;
    const nn::Tensor p = dsp::stft_power(std::vector<double>(3200, 0.0), cfg);
    for (double v : p.data) CHECK(v == 0.0);
  }

  TEST_CASE("fewer samples than one frame is too short") {
    const dsp::StftConfig cfg;
    const auto r = capture([&] { dsp::stft_power(std::vector<double>(200, 0.1), cfg); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::TooShort);
  }

  TEST_CASE("bin-center sine concentrates in one bin under a rectangular window") {
    // 12.8 kHz puts the 20 ms frame at exactly the 256-point FFT size, so a
    // sine at k*50 Hz completes whole periods per frame and leaks nowhere.
    dsp::StftConfig cfg;
    cfg.sample_rate_hz = 12800;
    cfg.fft_size = 256;
    cfg.window = dsp::WindowFunction::rectangular;
    REQUIRE(cfg.frame_samples() == 256);

    const std::int64_t k = 32;
    const nn::Tensor p = dsp::stft_power(sine(k * 50.0, 12800, 1024), cfg);
    REQUIRE(p.dim(0) == 4);
    for (std::int64_t f = 0; f < p.dim(0); ++f) {
      const double peak = p(f, k);
      CHECK(peak > 0.0);
      for (std::int64_t b = 0; b < p.dim(1); ++b) {
        if (b != k) CHECK(p(f, b) < 1e-6 * peak);
      }
    }
  }

  TEST_CASE("rectangular-window power obeys Parseval per frame") {
    dsp::StftConfig cfg;
    cfg.window = dsp::WindowFunction::rectangular;
    const std::vector<double> x = random_signal(320, 3);
    const nn::Tensor p = dsp::stft_power(x, cfg);
    REQUIRE(p.dim(0) == 1);

    double time_energy = 0.0;
    for (double v : x) time_energy += v * v;
    // real-input symmetry: the dropped upper bins mirror 1..N/2-1
    double freq_energy = p(0, 0) + p(0, p.dim(1) - 1);
    for (std::int64_t b = 1; b < p.dim(1) - 1; ++b) freq_energy += 2.0 * p(0, b);
    freq_energy /= static_cast<double>(cfg.fft_size);
    CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-9));
  }

  TEST_CASE("fft base cases") {
    std::vector<double> re{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    std::vector<double> im(8, 0.0);
    dsp::fft_radix2(re, im);
    for (double v : re) CHECK(v == doctest::Approx(1.0));
    for (double v : im) CHECK(v == doctest::Approx(0.0));

    std::vector<double> re2(8, 1.0);
    std::vector<double> im2(8, 0.0);
    dsp::fft_radix2(re2, im2);
    CHECK(re2[0] == doctest::Approx(8.0));
    for (std::size_t i = 1; i < 8; ++i) {
      CHECK(re2[i] == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_SUITE("mel") {
  TEST_CASE("htk formula and its inverse") {
    CHECK(dsp::hz_to_mel(0.0) == 0.0);
    CHECK(dsp::hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
    for (double hz : {50.0, 440.0, 1000.0, 7999.0}) {
      CHECK(dsp::mel_to_hz(dsp::hz_to_mel(hz)) == doctest::Approx(hz).epsilon(1e-12));
    }
  }

  TEST_CASE("default filterbank shape and row invariants") {
    const dsp::MelFilterbank bank = dsp::build_mel_filterbank(16000, 512, 64);
    REQUIRE(bank.weights.dim(0) == 64);
    REQUIRE(bank.weights.dim(1) == 257);
    std::int64_t prev_argmax = -1;
    for (std::int64_t m = 0; m < 64; ++m) {
      double best = -1.0;
      std::int64_t argmax = 0;
      for (std::int64_t b = 0; b < 257; ++b) {
        const double w = bank.weights(m, b);
        CHECK(w >= 0.0);
        if (w > best) {
          best = w;
          argmax = b;
        }
      }
      CHECK(best > 0.0);
      CHECK(argmax >= prev_argmax);
      prev_argmax = argmax;
    }
  }

  TEST_CASE("filter centers are strictly increasing on the mel axis") {
    const double lo = dsp::hz_to_mel(0.0);
    const double hi = dsp::hz_to_mel(8000.0);
    double prev = -1.0;
    for (int m = 1; m <= 64; ++m) {
      const double center = dsp::mel_to_hz(lo + (hi - lo) * m / 65.0);
      CHECK(center > prev);
      prev = center;
    }
  }

  TEST_CASE("a single filter spans the whole band") {
    const dsp::MelFilterbank bank = dsp::build_mel_filterbank(16000, 512, 1);
    REQUIRE(bank.weights.dim(0) == 1);
    double total = 0.0;
    for (std::int64_t b = 0; b < bank.weights.dim(1); ++b) total += bank.weights(0, b);
    CHECK(total > 0.0);
  }

  TEST_CASE("too many filters for the fft grid is degenerate") {
    const auto r = capture([&] { dsp::build_mel_filterbank(16000, 64, 64); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::DegenerateFilter);
  }
}

TEST_SUITE("log_mel") {
  TEST_CASE("zero power floors every cell at ln(1e-10)") {
    const dsp::MelFilterbank bank = dsp::build_mel_filterbank(16000, 512, 64);
    const nn::Tensor power = nn::Tensor::zeros({3, 257});
    const dsp::LogMelSpectrogram s = dsp::log_mel(power, bank);
    for (double v : s.values.data) CHECK(v == std::log(1e-10));
  }

  TEST_CASE("doubling the waveform adds ln(4) to unfloored cells") {
    const dsp::StftConfig cfg;
    const dsp::MelFilterbank bank = dsp::build_mel_filterbank(16000, 512, 64);
    std::vector<double> x = random_signal(16000, 4);
    std::vector<double> x2 = x;
    for (double& v : x2) v *= 2.0;
    const nn::Tensor a = dsp::compute_log_mel(x, cfg, bank, "r").values;
    const nn::Tensor b = dsp::compute_log_mel(x2, cfg, bank, "r").values;
    const double floor_ln = std::log(1e-10);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      if (a.data[i] > floor_ln + 1e-9 && b.data[i] > floor_ln + 1e-9) {
        CHECK(b.data[i] - a.data[i] == doctest::Approx(std::log(4.0)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("4 s window maps to a 200x64 spectrogram") {
    const dsp::StftConfig cfg;
    const dsp::MelFilterbank bank = dsp::build_mel_filterbank(16000, 512, 64);
    const dsp::LogMelSpectrogram s =
        dsp::compute_log_mel(sine(220.0, 16000, 64000), cfg, bank, "r");
    CHECK(s.n_frames() == 200);
    CHECK(s.n_mels() == 64);
    for (double v : s.values.data) CHECK(std::isfinite(v));
  }

  TEST_CASE("pointwise larger power never lowers the output") {
    Rng rng(5);
    const dsp::MelFilterbank bank = dsp::build_mel_filterbank(16000, 512, 64);
    nn::Tensor p1 = testsupport::random_tensor({4, 257}, rng, 0.0, 2.0);
    nn::Tensor p2 = p1;
    for (double& v : p2.data) v += rng.uniform(0.0, 1.0);
    const nn::Tensor a = dsp::log_mel(p1, bank).values;
    const nn::Tensor b = dsp::log_mel(p2, bank).values;
    for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(b.data[i] >= a.data[i]);
  }

  TEST_CASE("mismatched bin width is a shape error") {
    const dsp::MelFilterbank bank = dsp::build_mel_filterbank(16000, 512, 64);
    const auto r = capture([&] { dsp::log_mel(nn::Tensor::zeros({3, 100}), bank); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::ShapeMismatch);
  }

  TEST_CASE("identical bytes in, identical matrices out") {
    const dsp::StftConfig cfg;
    const dsp::MelFilterbank bank = dsp::build_mel_filterbank(16000, 512, 64);
    const std::vector<double> x = random_signal(32000, 6);
    const nn::Tensor a = dsp::compute_log_mel(x, cfg, bank, "r").values;
    const nn::Tensor b = dsp::compute_log_mel(x, cfg, bank, "r").values;
    CHECK(a.data == b.data);
  }

  TEST_CASE("standardize centers and scales") {
    Rng rng(7);
    nn::Tensor t = testsupport::random_tensor({50, 64}, rng, -3.0, 9.0);
    dsp::standardize(t);
    double mean = 0.0;
    for (double v : t.data) mean += v;
    mean /= static_cast<double>(t.data.size());
    double var = 0.0;
    for (double v : t.data) var += (v - mean) * (v - mean);
    var /= static_cast<double>(t.data.size());
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_SUITE("spectrogram_cache") {
  TEST_CASE("round trip preserves float32 values exactly") {
    TempDir dir("cache");
    const dsp::StftConfig cfg;
    const dsp::MelFilterbank bank = dsp::build_mel_filterbank(16000, 512, 64);
    dsp::LogMelSpectrogram s =
        dsp::compute_log_mel(random_signal(32000, 8), cfg, bank, "r", 1.0);
    const std::string path = dir.file("r.ivsc");
    dsp::save_spectrogram_cache(path, s);
    const dsp::LogMelSpectrogram back = dsp::load_spectrogram_cache(path);
    CHECK(back.start_s == 1.0);
    REQUIRE(back.values.shape == s.values.shape);
    for (std::size_t i = 0; i < s.values.data.size(); ++i) {
      CHECK(back.values.data[i] ==
            static_cast<double>(static_cast<float>(s.values.data[i])));
    }

    // a second save of the loaded copy is byte-identical
    const std::string path2 = dir.file("r2.ivsc");
    dsp::save_spectrogram_cache(path2, back);
    CHECK(testsupport::read_file(path) == testsupport::read_file(path2));
  }

  TEST_CASE("bad magic and truncation are detected") {
    TempDir dir("cache");
    const dsp::StftConfig cfg;
    const dsp::MelFilterbank bank = dsp::build_mel_filterbank(16000, 512, 64);
    const dsp::LogMelSpectrogram s =
        dsp::compute_log_mel(random_signal(16000, 9), cfg, bank, "r");
    const std::string path = dir.file("r.ivsc");
    dsp::save_spectrogram_cache(path, s);

    std::string bytes = testsupport::read_file(path);
    std::string junk = bytes;
    junk[0] = 'X';
    testsupport::write_file(dir.file("junk.ivsc"), junk);
    auto r = capture([&] { dsp::load_spectrogram_cache(dir.file("junk.ivsc")); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::BadHeader);

    bytes.resize(bytes.size() / 2);
    testsupport::write_file(dir.file("trunc.ivsc"), bytes);
    r = capture([&] { dsp::load_spectrogram_cache(dir.file("trunc.ivsc")); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::CorruptFile);
  }

  TEST_CASE("window names parse") {
    CHECK(dsp::window_by_name("hann") == dsp::WindowFunction::hann);
    CHECK(dsp::window_by_name("rectangular") == dsp::WindowFunction::rectangular);
    CHECK(dsp::window_name(dsp::WindowFunction::hann) == "hann");
    const auto r = capture([&] { dsp::window_by_name("hamming"); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::BadConfig);
  }
}
