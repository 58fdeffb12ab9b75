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

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "itemvoice/error.hpp"
#include "itemvoice/functionals.hpp"
#include "itemvoice/manifest.hpp"
#include "itemvoice/scale.hpp"
#include "itemvoice/wav.hpp"
#include "support.hpp"

using itemvoice::ErrorKind;
using itemvoice::Rng;
using testsupport::capture;
using testsupport::contains;
using testsupport::TempDir;
using testsupport::write_file;
namespace io = itemvoice::io;
namespace corpus = itemvoice::corpus;

namespace {

void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string int16_payload(const std::vector<std::int16_t>& xs) {
  std::string s;
  for (std::int16_t x : xs) put_u16(s, static_cast<std::uint16_t>(x));
  return s;
}

std::string wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                      std::uint16_t bits, const std::string& payload) {
  std::string sub = "WAVE";
  sub += "fmt ";
  put_u32(sub, 16);
  put_u16(sub, format);
  put_u16(sub, channels);
  put_u32(sub, rate);
  put_u32(sub, rate * channels * bits / 8);
  put_u16(sub, static_cast<std::uint16_t>(channels * bits / 8));
  put_u16(sub, bits);
  sub += "data";
  put_u32(sub, static_cast<std::uint32_t>(payload.size()));
  sub += payload;
  std::string out = "RIFF";
  put_u32(out, static_cast<std::uint32_t>(sub.size()));
  out += sub;
  return out;
}

std::string madrs_header(bool with_total) {
  std::string h = "recording_id,speaker_id,path,split";
  for (int i = 1; i <= 10; ++i) h += ",item_" + std::to_string(i);
  if (with_total) h += ",total";
  return h + "\n";
}

std::string row(const std::string& rec, const std::string& spk, const std::string& split,
                const std::vector<int>& scores, int total = -1) {
  std::string r = rec + "," + spk + ",wav/" + rec + ".wav," + split;
  for (int s : scores) r += "," + std::to_string(s);
  if (total >= 0) r += "," + std::to_string(total);
  return r + "\n";
}

const std::vector<int> kZeros(10, 0);

}  // namespace

TEST_SUITE("wav") {
  TEST_CASE("write then load round-trips lattice samples exactly") {
    TempDir dir("wav");
    Rng rng(1);
    std::vector<double> samples(1600);
    for (double& s : samples) {
      s = (static_cast<double>(rng.below(65536)) - 32768.0) / 32768.0;
    }
    const std::string path = dir.file("roundtrip.wav");
    io::write_wav(path, samples, 16000);
    const io::Recording rec = io::load_wav(path);
    REQUIRE(rec.samples.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      CHECK(rec.samples[i] == samples[i]);
    }
    CHECK(rec.sample_rate_hz == 16000);
    CHECK(rec.id == "roundtrip");
  }

  TEST_CASE("a 35 s file holds 560000 samples") {
    TempDir dir("wav");
    const std::string path = dir.file("long.wav");
    io::write_wav(path, std::vector<double>(560000, 0.0), 16000);
    const io::Recording rec = io::load_wav(path);
    CHECK(rec.samples.size() == 560000);
    CHECK(rec.duration_s() == doctest::Approx(35.0));
  }

  TEST_CASE("constant 16384 payload decodes to 0.5") {
    TempDir dir("wav");
    const std::string path = dir.file("half.wav");
    write_file(path, wav_bytes(1, 1, 16000, 16,
                               int16_payload(std::vector<std::int16_t>(100, 16384))));
    const io::Recording rec = io::load_wav(path);
    REQUIRE(rec.samples.size() == 100);
    for (double s : rec.samples) CHECK(s == 0.5);
  }

  TEST_CASE("out-of-range samples clamp on write") {
    TempDir dir("wav");
    const std::string path = dir.file("clamp.wav");
    io::write_wav(path, {2.0, -2.0}, 16000);
    const io::Recording rec = io::load_wav(path);
    CHECK(rec.samples[0] == doctest::Approx(32767.0 / 32768.0));
    CHECK(rec.samples[1] == -1.0);
  }

  TEST_CASE("stereo is rejected naming the channel count") {
    TempDir dir("wav");
    const std::string path = dir.file("stereo.wav");
    write_file(path, wav_bytes(1, 2, 16000, 16,
                               int16_payload(std::vector<std::int16_t>(20, 0))));
    const auto r = capture([&] { io::load_wav(path); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::UnsupportedFormat);
    CHECK(contains(r.message, "channels=2"));
  }

  TEST_CASE("8-bit and non-PCM and wrong-rate files are rejected") {
    TempDir dir("wav");
    const std::string payload = int16_payload(std::vector<std::int16_t>(10, 0));

    write_file(dir.file("b8.wav"), wav_bytes(1, 1, 16000, 8, payload));
    auto r = capture([&] { io::load_wav(dir.file("b8.wav")); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::UnsupportedFormat);
    CHECK(contains(r.message, "bits=8"));

    write_file(dir.file("float.wav"), wav_bytes(3, 1, 16000, 16, payload));
    r = capture([&] { io::load_wav(dir.file("float.wav")); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::UnsupportedFormat);
    CHECK(contains(r.message, "format=3"));

    write_file(dir.file("slow.wav"), wav_bytes(1, 1, 8000, 16, payload));
    r = capture([&] { io::load_wav(dir.file("slow.wav")); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::UnsupportedFormat);
    CHECK(contains(r.message, "sample_rate=8000"));
  }

  TEST_CASE("expected rate 0 accepts any rate") {
    TempDir dir("wav");
    const std::string path = dir.file("slow.wav");
    write_file(path, wav_bytes(1, 1, 8000, 16,
                               int16_payload(std::vector<std::int16_t>(10, 0))));
    const io::Recording rec = io::load_wav(path, 0);
    CHECK(rec.sample_rate_hz == 8000);
  }

  TEST_CASE("truncated data is a corrupt file") {
    TempDir dir("wav");
    const std::string path = dir.file("trunc.wav");
    std::string bytes = wav_bytes(1, 1, 16000, 16,
                                  int16_payload(std::vector<std::int16_t>(50, 7)));
    bytes.resize(bytes.size() - 30);
    write_file(path, bytes);
    const auto r = capture([&] { io::load_wav(path); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::CorruptFile);
  }

  TEST_CASE("non-RIFF bytes are a bad header") {
    TempDir dir("wav");
    const std::string path = dir.file("junk.wav");
    write_file(path, "JUNKJUNKJUNKJUNKJUNKJUNK");
    const auto r = capture([&] { io::load_wav(path); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::BadHeader);
  }

  TEST_CASE("a missing file is an io error") {
    const auto r = capture([&] { io::load_wav("/nonexistent/nowhere.wav"); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::IoError);
  }
}

TEST_SUITE("scale") {
  TEST_CASE("madrs has 10 items scored 0..6 with threshold 10") {
    const corpus::ScaleDefinition s = corpus::madrs();
    CHECK(s.name == "MADRS");
    CHECK(s.n_items() == 10);
    CHECK(s.score_min == 0);
    CHECK(s.score_max == 6);
    CHECK(s.depression_threshold == 10);
    CHECK(s.item_name(10) == "Suicidal thoughts");
    for (int i = 0; i < 10; ++i) CHECK(s.items[static_cast<std::size_t>(i)].index == i + 1);
  }

  TEST_CASE("phq8 has 8 items scored 0..3") {
    const corpus::ScaleDefinition s = corpus::phq8();
    CHECK(s.name == "PHQ8");
    CHECK(s.n_items() == 8);
    CHECK(s.score_min == 0);
    CHECK(s.score_max == 3);
    CHECK(s.depression_threshold == 10);
  }

  TEST_CASE("lookup by name is case-insensitive and validates") {
    CHECK(corpus::scale_by_name("madrs").name == "MADRS");
    CHECK(corpus::scale_by_name("MADRS").name == "MADRS");
    CHECK(corpus::scale_by_name("Phq8").name == "PHQ8");
    const auto r = capture([&] { corpus::scale_by_name("hamd"); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::BadConfig);
    const auto r2 = capture([&] { corpus::madrs().item_name(11); });
    REQUIRE(r2.raised);
    CHECK(r2.kind == ErrorKind::BadConfig);
  }
}

TEST_SUITE("manifest") {
  TEST_CASE("parse, binarize and depression threshold") {
    TempDir dir("manifest");
    const std::string path = dir.file("m.csv");
    std::string csv = madrs_header(true);
    csv += row("r1", "s1", "train", {1, 2, 0, 3, 0, 0, 1, 0, 2, 3}, 12);
    csv += row("r2", "s2", "val", kZeros, 0);
    csv += row("r3", "s3", "test", {1, 2, 0, 3, 0, 0, 1, 0, 2, 0}, 9);
    write_file(path, csv);

    const corpus::Manifest m = corpus::parse_manifest(path, corpus::madrs());
    REQUIRE(m.rows.size() == 3);
    CHECK(m.has_total_column);
    CHECK(m.split_indices("train") == std::vector<std::size_t>{0});
    CHECK(m.row_by_id("r2").speaker_id == "s2");

    const corpus::RecordingLabels l1 = corpus::binarize_labels(m.rows[0], m.scale);
    CHECK(l1.total == 12);
    CHECK(l1.depressed);
    const std::vector<int> present{1, 2, 4, 7, 9, 10};
    for (const corpus::ItemLabel& item : l1.items) {
      const bool expect = std::find(present.begin(), present.end(), item.item_index) !=
                          present.end();
      CHECK(item.present == expect);
      CHECK(item.present == (item.raw_score > 0));
    }

    const corpus::RecordingLabels l2 = corpus::binarize_labels(m.rows[1], m.scale);
    CHECK_FALSE(l2.depressed);
    for (const corpus::ItemLabel& item : l2.items) CHECK_FALSE(item.present);

    // total 9 sits below the MADRS threshold of 10
    CHECK_FALSE(corpus::binarize_labels(m.rows[2], m.scale).depressed);
  }

  TEST_CASE("per-split supports are countable from labels") {
    TempDir dir("manifest");
    const std::string path = dir.file("m.csv");
    std::string csv = madrs_header(false);
    const std::vector<int> present_scores{3, 1, 2, 6};
    for (int i = 0; i < 21; ++i) {
      std::vector<int> scores = kZeros;
      if (i < 4) scores[9] = present_scores[static_cast<std::size_t>(i)];
      csv += row("r" + std::to_string(i), "s" + std::to_string(i), "test", scores);
    }
    write_file(path, csv);
    const corpus::Manifest m = corpus::parse_manifest(path, corpus::madrs());
    int present = 0, absent = 0;
    for (const std::size_t i : m.split_indices("test")) {
      const corpus::RecordingLabels l = corpus::binarize_labels(m.rows[i], m.scale);
      (l.items[9].present ? present : absent) += 1;
    }
    CHECK(present == 4);
    CHECK(absent == 17);
  }

  TEST_CASE("speaker leaking across splits is rejected") {
    TempDir dir("manifest");
    const std::string path = dir.file("m.csv");
    write_file(path, madrs_header(false) + row("r1", "s1", "train", kZeros) +
                         row("r2", "s1", "val", kZeros));
    const auto r = capture([&] { corpus::parse_manifest(path, corpus::madrs()); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::SplitLeak);
    CHECK(contains(r.message, "s1"));
  }

  TEST_CASE("score validation") {
    TempDir dir("manifest");
    corpus::ScaleDefinition scale = corpus::madrs();

    std::vector<int> high = kZeros;
    high[4] = 7;
    write_file(dir.file("range.csv"), madrs_header(false) + row("r1", "s1", "train", high));
    auto r = capture([&] { corpus::parse_manifest(dir.file("range.csv"), scale); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::ScoreOutOfRange);

    write_file(dir.file("short.csv"),
               madrs_header(false) + "r1,s1,wav/r1.wav,train,0,0,0,0,0,0,0,0,0\n");
    r = capture([&] { corpus::parse_manifest(dir.file("short.csv"), scale); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::MissingScore);

    write_file(dir.file("text.csv"),
               madrs_header(false) + "r1,s1,wav/r1.wav,train,0,0,0,x,0,0,0,0,0,0\n");
    r = capture([&] { corpus::parse_manifest(dir.file("text.csv"), scale); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::MissingScore);

    write_file(dir.file("total.csv"),
               madrs_header(true) + row("r1", "s1", "train", kZeros, 5));
    r = capture([&] { corpus::parse_manifest(dir.file("total.csv"), scale); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::CorruptFile);
  }

  TEST_CASE("structural validation") {
    TempDir dir("manifest");
    corpus::ScaleDefinition scale = corpus::madrs();

    write_file(dir.file("split.csv"), madrs_header(false) + row("r1", "s1", "dev", kZeros));
    auto r = capture([&] { corpus::parse_manifest(dir.file("split.csv"), scale); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::BadConfig);

    write_file(dir.file("dup.csv"), madrs_header(false) + row("r1", "s1", "train", kZeros) +
                                        row("r1", "s2", "train", kZeros));
    r = capture([&] { corpus::parse_manifest(dir.file("dup.csv"), scale); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::CorruptFile);

    write_file(dir.file("empty.csv"), "");
    r = capture([&] { corpus::parse_manifest(dir.file("empty.csv"), scale); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::EmptyManifest);

    write_file(dir.file("norows.csv"), madrs_header(false));
    r = capture([&] { corpus::parse_manifest(dir.file("norows.csv"), scale); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::EmptyManifest);

    // a PHQ-8 header cannot serve a MADRS scale
    std::string phq = "recording_id,speaker_id,path,split";
    for (int i = 1; i <= 8; ++i) phq += ",item_" + std::to_string(i);
    write_file(dir.file("phq.csv"), phq + "\n" + "r1,s1,w.wav,train,0,0,0,0,0,0,0,0\n");
    r = capture([&] { corpus::parse_manifest(dir.file("phq.csv"), scale); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::BadHeader);
  }

  TEST_CASE("write then parse round-trips") {
    TempDir dir("manifest");
    const std::string path = dir.file("m.csv");
    std::string csv = madrs_header(true);
    csv += row("r1", "s1", "train", {1, 2, 0, 3, 0, 0, 1, 0, 2, 3}, 12);
    csv += row("r2", "s2", "val", kZeros, 0);
    write_file(path, csv);
    const corpus::Manifest m1 = corpus::parse_manifest(path, corpus::madrs());

    const std::string copy = dir.file("copy.csv");
    corpus::write_manifest(copy, m1);
    const corpus::Manifest m2 = corpus::parse_manifest(copy, corpus::madrs());
    REQUIRE(m2.rows.size() == m1.rows.size());
    CHECK(m2.has_total_column == m1.has_total_column);
    for (std::size_t i = 0; i < m1.rows.size(); ++i) {
      CHECK(m2.rows[i].recording_id == m1.rows[i].recording_id);
      CHECK(m2.rows[i].speaker_id == m1.rows[i].speaker_id);
      CHECK(m2.rows[i].path == m1.rows[i].path);
      CHECK(m2.rows[i].split == m1.rows[i].split);
      CHECK(m2.rows[i].scores == m1.rows[i].scores);
      CHECK(m2.rows[i].total == m1.rows[i].total);
    }
  }

  TEST_CASE("relative audio paths resolve against the manifest directory") {
    CHECK(corpus::resolve_path("/data/corpus/m.csv", "wav/r1.wav") ==
          "/data/corpus/wav/r1.wav");
    CHECK(corpus::resolve_path("/data/corpus/m.csv", "/abs/r1.wav") == "/abs/r1.wav");
  }
}

TEST_SUITE("functionals") {
  TEST_CASE("write then import round-trips sorted by recording and window") {
    TempDir dir("func");
    Rng rng(3);
    std::vector<corpus::FunctionalFeatureVector> rows;
    for (const auto& [id, w] : std::vector<std::pair<std::string, std::int64_t>>{
             {"r2", 0}, {"r1", 1}, {"r1", 0}}) {
      corpus::FunctionalFeatureVector v;
      v.recording_id = id;
      v.window_index = w;
      for (int i = 0; i < 5; ++i) v.values.push_back(rng.uniform(-10.0, 10.0));
      rows.push_back(v);
    }
    const std::string path = dir.file("f.csv");
    corpus::write_functionals(path, rows);
    const auto got = corpus::import_functionals(path, 5);
    REQUIRE(got.size() == 3);
    CHECK(got[0].recording_id == "r1");
    CHECK(got[0].window_index == 0);
    CHECK(got[1].recording_id == "r1");
    CHECK(got[1].window_index == 1);
    CHECK(got[2].recording_id == "r2");
    CHECK(got[0].values == rows[2].values);
    CHECK(got[1].values == rows[1].values);
    CHECK(got[2].values == rows[0].values);
  }

  TEST_CASE("semicolon delimiter is auto-detected") {
    TempDir dir("func");
    const std::string path = dir.file("f.csv");
    corpus::FunctionalFeatureVector v{"r1", 0, {1.5, -2.25}};
    corpus::write_functionals(path, {v}, ';');
    const auto got = corpus::import_functionals(path, 2);
    REQUIRE(got.size() == 1);
    CHECK(got[0].values == std::vector<double>{1.5, -2.25});
  }

  TEST_CASE("dimension and value validation") {
    TempDir dir("func");

    write_file(dir.file("dim.csv"), "recording_id,window_index,f1,f2,f3,f4\nr1,0,1,2,3,4\n");
    auto r = capture([&] { corpus::import_functionals(dir.file("dim.csv"), 5); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::DimensionMismatch);

    write_file(dir.file("nan.csv"), "recording_id,window_index,f1,f2\nr1,0,1.0,nan\n");
    r = capture([&] { corpus::import_functionals(dir.file("nan.csv"), 2); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::NonFiniteValue);
    CHECK(contains(r.message, "row 2"));
    CHECK(contains(r.message, "column 3"));

    write_file(dir.file("text.csv"), "recording_id,window_index,f1,f2\nr1,0,1.0,abc\n");
    r = capture([&] { corpus::import_functionals(dir.file("text.csv"), 2); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::CorruptFile);

    write_file(dir.file("dup.csv"),
               "recording_id,window_index,f1,f2\nr1,0,1,2\nr1,0,3,4\n");
    r = capture([&] { corpus::import_functionals(dir.file("dup.csv"), 2); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::CorruptFile);

    write_file(dir.file("widx.csv"), "recording_id,window_index,f1,f2\nr1,-1,1,2\n");
    r = capture([&] { corpus::import_functionals(dir.file("widx.csv"), 2); });
    REQUIRE(r.raised);
    CHECK(r.kind == ErrorKind::CorruptFile);
  }

  TEST_CASE("grouping keeps window order per recording") {
    std::vector<corpus::FunctionalFeatureVector> rows{
        {"r1", 0, {0.0}}, {"r1", 1, {1.0}}, {"r1", 2, {2.0}}, {"r2", 0, {9.0}}};
    const auto grouped = corpus::group_functionals(rows);
    REQUIRE(grouped.size() == 2);
    REQUIRE(grouped.at("r1").size() == 3);
    for (std::size_t w = 0; w < 3; ++w) {
      CHECK(grouped.at("r1")[w][0] == static_cast<double>(w));
    }
    CHECK(grouped.at("r2")[0][0] == 9.0);
  }
}
