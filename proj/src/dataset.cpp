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

#include "itemvoice/dataset.hpp"

#include <cstring>
#include <filesystem>

#include "itemvoice/error.hpp"
#include "itemvoice/functionals.hpp"
#include "itemvoice/wav.hpp"

namespace itemvoice::data {

namespace {

std::int64_t units_from_frames(const Corpus& corpus, std::int64_t n_frames,
                               const std::string& recording_id) {
  const std::int64_t fps = seg::frames_per_second(corpus.stft);
  const std::int64_t window_frames = static_cast<std::int64_t>(seg::kWindowSpanS) * fps;
  const std::int64_t seq_frames =
      window_frames + fps * (seg::kSpectrogramsPerSequence - 1);  // 650 at 50 fps
  const bool lstm = corpus.kind == nn::ModelKind::spec_cnn_lstm;
  const std::int64_t need = lstm ? seq_frames : window_frames;
  std::int64_t n = (n_frames - need) / fps + 1;
  if (lstm && corpus.drop_last) --n;
  if (n_frames < need || n < 1) {
    raise(ErrorKind::TooShort, "recording '" + recording_id + "' has " +
                                   std::to_string(n_frames) + " frames, needs " +
                                   std::to_string(need + (lstm && corpus.drop_last ? fps : 0)));
  }
  return n;
}

std::int64_t units_from_windows(const Corpus& corpus, std::int64_t n_windows,
                                const std::string& recording_id) {
  const bool lstm = corpus.kind == nn::ModelKind::egemaps_cnn_lstm;
  std::int64_t n = lstm ? n_windows - (seg::kSpectrogramsPerSequence - 1) : n_windows;
  if (lstm && corpus.drop_last) --n;
  if (n < 1) {
    raise(ErrorKind::TooShort, "recording '" + recording_id + "' has only " +
                                   std::to_string(n_windows) + " feature windows");
  }
  return n;
}

}  // namespace

std::vector<std::size_t> Corpus::split_recordings(const std::string& split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    if (recordings[i].split == split) out.push_back(i);
  }
  return out;
}

Corpus build_corpus(const corpus::Manifest& manifest, nn::ModelKind kind,
                    const FeatureSource& source, const dsp::StftConfig& stft, bool drop_last,
                    std::int64_t egemaps_dim, bool standardize_units) {
  Corpus c;
  c.scale = manifest.scale;
  c.kind = kind;
  c.drop_last = drop_last;
  c.egemaps_dim = egemaps_dim;
  c.stft = stft;
  c.standardize_units = standardize_units;

  const bool spectro =
      kind == nn::ModelKind::spec_cnn || kind == nn::ModelKind::spec_cnn_lstm;

  std::map<std::string, std::vector<std::vector<double>>> grouped;
  if (!spectro) {
    if (source.functionals_path.empty()) {
      raise(ErrorKind::BadConfig, "egemaps models need --functionals");
    }
    grouped = corpus::group_functionals(
        corpus::import_functionals(source.functionals_path, egemaps_dim));
  }

  dsp::MelFilterbank bank;
  if (spectro && source.cache_dir.empty()) {
    bank = dsp::build_mel_filterbank(stft.sample_rate_hz, stft.fft_size,
                                     static_cast<int>(64));
  }

  for (const corpus::ManifestRow& row : manifest.rows) {
    RecordingData rd;
    rd.recording_id = row.recording_id;
    rd.speaker_id = row.speaker_id;
    rd.split = row.split;
    rd.labels = corpus::binarize_labels(row, manifest.scale);
    if (spectro) {
      if (!source.cache_dir.empty()) {
        const std::string cache =
            (std::filesystem::path(source.cache_dir) / (row.recording_id + ".ivsc")).string();
        if (!std::filesystem::exists(cache)) {
          raise(ErrorKind::IoError, "missing spectrogram cache: " + cache);
        }
        rd.logmel = dsp::load_spectrogram_cache(cache);
      } else {
        const io::Recording rec =
            io::load_wav(corpus::resolve_path(source.manifest_path, row.path),
                         stft.sample_rate_hz);
        rd.logmel = dsp::compute_log_mel(rec.samples, stft, bank, row.recording_id);
      }
      rd.n_units = units_from_frames(c, rd.logmel.n_frames(), row.recording_id);
    } else {
      const auto it = grouped.find(row.recording_id);
      if (it == grouped.end()) {
        raise(ErrorKind::BadConfig,
              "functionals CSV lacks recording '" + row.recording_id + "'");
      }
      rd.functionals = it->second;
      rd.n_units =
          units_from_windows(c, static_cast<std::int64_t>(rd.functionals.size()),
                             row.recording_id);
    }
    c.recordings.push_back(std::move(rd));
  }
  return c;
}

Corpus predict_corpus(nn::ModelKind kind, const io::Recording& rec,
                      const dsp::StftConfig& stft, bool drop_last, bool standardize_units) {
  if (kind != nn::ModelKind::spec_cnn && kind != nn::ModelKind::spec_cnn_lstm) {
    raise(ErrorKind::BadConfig, "this model kind takes functional features, not audio");
  }
  Corpus c;
  c.kind = kind;
  c.drop_last = drop_last;
  c.stft = stft;
  c.standardize_units = standardize_units;

  RecordingData rd;
  rd.recording_id = rec.id;
  rd.speaker_id = rec.speaker_id;
  rd.split = "predict";
  const dsp::MelFilterbank bank =
      dsp::build_mel_filterbank(stft.sample_rate_hz, stft.fft_size, 64);
  rd.logmel = dsp::compute_log_mel(rec.samples, stft, bank, rec.id);
  rd.n_units = units_from_frames(c, rd.logmel.n_frames(), rec.id);
  c.recordings.push_back(std::move(rd));
  return c;
}

Corpus predict_corpus_functionals(nn::ModelKind kind, const std::string& recording_id,
                                  std::vector<std::vector<double>> functionals,
                                  std::int64_t egemaps_dim, bool drop_last,
                                  bool standardize_units) {
  if (kind != nn::ModelKind::egemaps_cnn && kind != nn::ModelKind::egemaps_cnn_lstm) {
    raise(ErrorKind::BadConfig, "this model kind takes audio, not functional features");
  }
  Corpus c;
  c.kind = kind;
  c.drop_last = drop_last;
  c.egemaps_dim = egemaps_dim;
  c.standardize_units = standardize_units;

  RecordingData rd;
  rd.recording_id = recording_id;
  rd.split = "predict";
  rd.functionals = std::move(functionals);
  rd.n_units = units_from_windows(c, static_cast<std::int64_t>(rd.functionals.size()),
                                  recording_id);
  c.recordings.push_back(std::move(rd));
  return c;
}

std::vector<UnitRef> collect_units(const Corpus& corpus,
                                   const std::vector<std::size_t>& recording_indices) {
  std::vector<UnitRef> out;
  for (std::size_t ri : recording_indices) {
    for (std::int64_t u = 0; u < corpus.recordings[ri].n_units; ++u) out.push_back({ri, u});
  }
  return out;
}

namespace {

// One 4 s window of a recording's log-mel, optionally standardized.
void copy_window(const Corpus& corpus, const RecordingData& rd, std::int64_t start_s,
                 double* dst, std::int64_t window_numel) {
  const std::int64_t fps = seg::frames_per_second(corpus.stft);
  const std::int64_t mels = rd.logmel.n_mels();
  const std::int64_t first = start_s * fps;
  std::memcpy(dst, rd.logmel.values.data.data() + first * mels,
              sizeof(double) * static_cast<std::size_t>(window_numel));
  if (corpus.standardize_units) {
    nn::Tensor view({window_numel}, std::vector<double>(dst, dst + window_numel));
    dsp::standardize(view);
    std::memcpy(dst, view.data.data(), sizeof(double) * static_cast<std::size_t>(window_numel));
  }
}

}  // namespace

nn::Tensor make_batch(const Corpus& corpus, const std::vector<UnitRef>& units) {
  if (units.empty()) raise(ErrorKind::EmptySplit, "empty batch");
  const auto b = static_cast<std::int64_t>(units.size());
  const std::int64_t fps = seg::frames_per_second(corpus.stft);
  const std::int64_t frames = static_cast<std::int64_t>(seg::kWindowSpanS) * fps;

  switch (corpus.kind) {
    case nn::ModelKind::spec_cnn: {
      const std::int64_t mels = corpus.recordings[units[0].recording].logmel.n_mels();
      nn::Tensor batch = nn::Tensor::zeros({b, 1, frames, mels});
      const std::int64_t numel = frames * mels;
      for (std::int64_t s = 0; s < b; ++s) {
        const UnitRef& ref = units[static_cast<std::size_t>(s)];
        copy_window(corpus, corpus.recordings[ref.recording], ref.unit,
                    batch.data.data() + s * numel, numel);
      }
      return batch;
    }
    case nn::ModelKind::spec_cnn_lstm: {
      const std::int64_t mels = corpus.recordings[units[0].recording].logmel.n_mels();
      nn::Tensor batch =
          nn::Tensor::zeros({seg::kSpectrogramsPerSequence * b, 1, frames, mels});
      const std::int64_t numel = frames * mels;
      for (std::int64_t t = 0; t < seg::kSpectrogramsPerSequence; ++t) {
        for (std::int64_t s = 0; s < b; ++s) {
          const UnitRef& ref = units[static_cast<std::size_t>(s)];
          copy_window(corpus, corpus.recordings[ref.recording], ref.unit + t,
                      batch.data.data() + (t * b + s) * numel, numel);
        }
      }
      return batch;
    }
    case nn::ModelKind::egemaps_cnn: {
      nn::Tensor batch = nn::Tensor::zeros({b, corpus.egemaps_dim});
      for (std::int64_t s = 0; s < b; ++s) {
        const UnitRef& ref = units[static_cast<std::size_t>(s)];
        const auto& vec =
            corpus.recordings[ref.recording].functionals[static_cast<std::size_t>(ref.unit)];
        std::memcpy(batch.data.data() + s * corpus.egemaps_dim, vec.data(),
                    sizeof(double) * vec.size());
      }
      return batch;
    }
    case nn::ModelKind::egemaps_cnn_lstm: {
      nn::Tensor batch =
          nn::Tensor::zeros({seg::kSpectrogramsPerSequence * b, corpus.egemaps_dim});
      for (std::int64_t t = 0; t < seg::kSpectrogramsPerSequence; ++t) {
        for (std::int64_t s = 0; s < b; ++s) {
          const UnitRef& ref = units[static_cast<std::size_t>(s)];
          const auto& vec = corpus.recordings[ref.recording]
                                .functionals[static_cast<std::size_t>(ref.unit + t)];
          std::memcpy(batch.data.data() + (t * b + s) * corpus.egemaps_dim, vec.data(),
                      sizeof(double) * vec.size());
        }
      }
      return batch;
    }
  }
  raise(ErrorKind::BadConfig, "bad model kind value");
}

std::int64_t unit_target(const Corpus& corpus, const UnitRef& ref, int item_index) {
  const corpus::RecordingLabels& labels = corpus.recordings[ref.recording].labels;
  if (item_index == 0) return labels.depressed ? 1 : 0;
  if (item_index < 1 || item_index > static_cast<int>(labels.items.size())) {
    raise(ErrorKind::BadConfig, "item index " + std::to_string(item_index) + " out of range");
  }
  return labels.items[static_cast<std::size_t>(item_index - 1)].present ? 1 : 0;
}

}  // namespace itemvoice::data
