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

#ifndef ITEMVOICE_DATASET_HPP_
#define ITEMVOICE_DATASET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "itemvoice/dsp.hpp"
#include "itemvoice/manifest.hpp"
#include "itemvoice/model.hpp"
#include "itemvoice/segmentation.hpp"
#include "itemvoice/wav.hpp"

namespace itemvoice::data {

struct RecordingData {
  std::string recording_id;
  std::string speaker_id;
  std::string split;
  corpus::RecordingLabels labels;
  dsp::LogMelSpectrogram logmel;                 // spectrogram kinds: full recording
  std::vector<std::vector<double>> functionals;  // egemaps kinds: one row per 1 s window
  std::int64_t n_units = 0;                      // model samples on the 1 s grid
};

struct Corpus {
  corpus::ScaleDefinition scale;
  nn::ModelKind kind = nn::ModelKind::spec_cnn_lstm;
  bool drop_last = false;
  std::int64_t egemaps_dim = 88;
  dsp::StftConfig stft;
  bool standardize_units = false;
  std::vector<RecordingData> recordings;

  std::vector<std::size_t> split_recordings(const std::string& split) const;
};

struct FeatureSource {
  std::string manifest_path;      // resolves relative audio paths
  std::string cache_dir;          // <cache_dir>/<recording_id>.ivsc; empty = from WAV
  std::string functionals_path;   // egemaps kinds
};

Corpus build_corpus(const corpus::Manifest& manifest, nn::ModelKind kind,
                    const FeatureSource& source, const dsp::StftConfig& stft, bool drop_last,
                    std::int64_t egemaps_dim, bool standardize_units);

// Label-free single-recording corpora for prediction and timeline export.
Corpus predict_corpus(nn::ModelKind kind, const io::Recording& rec,
                      const dsp::StftConfig& stft, bool drop_last, bool standardize_units);
Corpus predict_corpus_functionals(nn::ModelKind kind, const std::string& recording_id,
                                  std::vector<std::vector<double>> functionals,
                                  std::int64_t egemaps_dim, bool drop_last,
                                  bool standardize_units);

struct UnitRef {
  std::size_t recording = 0;  // index into corpus.recordings
  std::int64_t unit = 0;      // grid position (start second)
};

// All units of the given recordings, grid-ordered per recording.
std::vector<UnitRef> collect_units(const Corpus& corpus,
                                   const std::vector<std::size_t>& recording_indices);

// Batch tensor in the model's input layout. Sequence kinds are packed
// step-major: row t*B+s carries step t of unit s.
nn::Tensor make_batch(const Corpus& corpus, const std::vector<UnitRef>& units);

// Per-unit binary target: item_index 1..n selects that item's presence,
// item_index 0 selects the depression flag.
std::int64_t unit_target(const Corpus& corpus, const UnitRef& ref, int item_index);

}  // namespace itemvoice::data

#endif  // ITEMVOICE_DATASET_HPP_
