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

#include "itemvoice/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "itemvoice/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "WAV IO assumes a little-endian host");

namespace itemvoice::io {

namespace {

struct Reader {
  std::ifstream in;
  std::string path;

  void read(void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      raise(ErrorKind::CorruptFile, "truncated WAV file: " + path);
    }
  }
  std::uint32_t u32() {
    std::uint32_t v;
    read(&v, 4);
    return v;
  }
  std::uint16_t u16() {
    std::uint16_t v;
    read(&v, 2);
    return v;
  }
  void skip(std::uint32_t n) {
    in.seekg(n, std::ios::cur);
    if (!in) raise(ErrorKind::CorruptFile, "truncated WAV file: " + path);
  }
};

}  // namespace

Recording load_wav(const std::string& path, int expected_rate_hz) {
  Reader r{std::ifstream(path, std::ios::binary), path};
  if (!r.in) raise(ErrorKind::IoError, "cannot open WAV file: " + path);

  char tag[4];
  r.read(tag, 4);
  if (std::memcmp(tag, "RIFF", 4) != 0) {
    raise(ErrorKind::BadHeader, "missing RIFF chunk: " + path);
  }
  r.u32();  // RIFF payload size; data chunk length is authoritative
  r.read(tag, 4);
  if (std::memcmp(tag, "WAVE", 4) != 0) {
    raise(ErrorKind::BadHeader, "missing WAVE form type: " + path);
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::vector<std::int16_t> pcm;
  bool have_data = false;

  while (r.in.peek() != std::char_traits<char>::eof()) {
    r.read(tag, 4);
    const std::uint32_t size = r.u32();
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (size < 16) raise(ErrorKind::BadHeader, "fmt chunk too small: " + path);
      format = r.u16();
      channels = r.u16();
      rate = r.u32();
      r.u32();  // byte rate
      r.u16();  // block align
      bits = r.u16();
      if (size > 16) r.skip(size - 16);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) raise(ErrorKind::BadHeader, "data chunk before fmt: " + path);
      if (size % 2 != 0) raise(ErrorKind::CorruptFile, "odd PCM16 data size: " + path);
      pcm.resize(size / 2);
      r.read(pcm.data(), size);
      have_data = true;
      break;
    } else {
      r.skip(size + (size % 2));  // chunks are word-aligned
    }
  }
  if (!have_fmt || !have_data) {
    raise(ErrorKind::BadHeader, "WAV lacks fmt/data chunks: " + path);
  }
  if (format != 1) {
    raise(ErrorKind::UnsupportedFormat, "format=" + std::to_string(format) +
                                            " (want PCM=1): " + path);
  }
  if (channels != 1) {
    raise(ErrorKind::UnsupportedFormat, "channels=" + std::to_string(channels) +
                                            " (want mono): " + path);
  }
  if (bits != 16) {
    raise(ErrorKind::UnsupportedFormat, "bits=" + std::to_string(bits) +
                                            " (want 16): " + path);
  }
  if (expected_rate_hz > 0 && rate != static_cast<std::uint32_t>(expected_rate_hz)) {
    raise(ErrorKind::UnsupportedFormat, "sample_rate=" + std::to_string(rate) + " (want " +
                                            std::to_string(expected_rate_hz) + "): " + path);
  }
  if (pcm.empty()) raise(ErrorKind::CorruptFile, "empty data chunk: " + path);

  Recording rec;
  rec.path = path;
  rec.id = std::filesystem::path(path).stem().string();
  rec.sample_rate_hz = static_cast<int>(rate);
  rec.samples.resize(pcm.size());
  for (std::size_t i = 0; i < pcm.size(); ++i) {
    rec.samples[i] = static_cast<double>(pcm[i]) / 32768.0;
  }
  return rec;
}

void write_wav(const std::string& path, const std::vector<double>& samples,
               int sample_rate_hz) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::IoError, "cannot open for writing: " + path);

  std::vector<std::int16_t> pcm(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = std::round(samples[i] * 32768.0);
    pcm[i] = static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0));
  }

  const std::uint32_t data_size = static_cast<std::uint32_t>(pcm.size() * 2);
  const std::uint32_t riff_size = 36 + data_size;
  const std::uint32_t rate = static_cast<std::uint32_t>(sample_rate_hz);
  const std::uint32_t byte_rate = rate * 2;
  const std::uint16_t block_align = 2, channels = 1, bits = 16, pcm_fmt = 1;
  const std::uint32_t fmt_size = 16;

  auto w = [&out](const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  };
  w("RIFF", 4); w(&riff_size, 4); w("WAVE", 4);
  w("fmt ", 4); w(&fmt_size, 4); w(&pcm_fmt, 2); w(&channels, 2);
  w(&rate, 4); w(&byte_rate, 4); w(&block_align, 2); w(&bits, 2);
  w("data", 4); w(&data_size, 4); w(pcm.data(), data_size);
  if (!out) raise(ErrorKind::IoError, "write failed: " + path);
}

}  // namespace itemvoice::io
