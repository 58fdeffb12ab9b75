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

#ifndef ITEMVOICE_COMMANDS_HPP_
#define ITEMVOICE_COMMANDS_HPP_

#include <cstdint>
#include <ostream>
#include <string>

#include "itemvoice/train.hpp"

namespace itemvoice::cli {

// Option structs mirror the command-line surface one to one; the binary
// fills them from flags or a config file and calls the cmd_* entry point.
// All failures raise Error; the binary maps kinds to exit codes.

struct ExtractOptions {
  std::string manifest;
  std::string scale = "madrs";
  std::string out_dir;
  std::string window = "hann";
  bool drop_last = false;
};

struct TrainOptions {
  std::string manifest;
  std::string scale = "madrs";
  std::string model = "spec_cnn_lstm";
  std::string task = "classify";
  std::string cache_dir;     // spectrogram caches; empty computes from audio
  std::string functionals;   // eGeMAPS-style CSV for the egemaps kinds
  std::string out_dir;
  std::string items = "all";
  std::string vote = "soft";
  std::string window = "hann";
  bool depression = false;   // additionally train the depression model
  bool multitask = false;    // one checkpoint with a head per item
  bool drop_last = false;
  bool standardize = false;
  bool use_batchnorm = false;
  bool class_weights = false;
  double dropout = 0.0;
  std::int64_t egemaps_dim = 88;
  std::int64_t trials = 8;   // search only
  train::TrainConfig train;
};

struct EvaluateOptions {
  std::string manifest;
  std::string scale = "madrs";
  std::string checkpoint_dir;
  std::string split = "test";
  std::string cache_dir;
  std::string functionals;
  std::string out_csv;      // empty prints the CSV to stdout
  std::string combine = "mean_prob";
  std::string window = "hann";
  // model: vote the depression checkpoint; combine: pool item decisions;
  // auto: model when the checkpoint exists, combine otherwise; none.
  std::string depression_from = "auto";
  int combine_k = 0;        // count_threshold minimum; 0 = majority of items
  bool drop_last = false;
  bool standardize = false;
  std::int64_t egemaps_dim = 88;
};

struct PredictOptions {
  std::string checkpoint;
  std::string wav;
  std::string functionals;
  std::string recording_id;  // selects the row group in a functionals CSV
  std::string out_json;      // empty prints to stdout
  std::string window = "hann";
  bool drop_last = false;
  bool standardize = false;
  std::int64_t egemaps_dim = 88;
  int head = 0;
};

struct TimelineOptions {
  std::string checkpoint;
  std::string wav;
  std::string functionals;
  std::string recording_id;
  std::string out_prefix;  // writes <prefix>.json and <prefix>.svg
  std::string window = "hann";
  bool drop_last = false;
  bool standardize = false;
  std::int64_t egemaps_dim = 88;
  int head = 0;
};

struct SynthOptions {
  std::string out_dir;
  std::string scale = "madrs";
  int n_speakers = 40;
  int n_train = 24;
  int n_val = 8;
  int n_test = 8;
  double duration_s = 20.0;
  std::uint64_t seed = 0;
  bool functionals = false;
};

void cmd_extract(const ExtractOptions& opt, std::ostream& out);
void cmd_train(const TrainOptions& opt, std::ostream& out);
void cmd_search(const TrainOptions& opt, std::ostream& out);
void cmd_evaluate(const EvaluateOptions& opt, std::ostream& out);
void cmd_predict(const PredictOptions& opt, std::ostream& out);
void cmd_timeline(const TimelineOptions& opt, std::ostream& out);
void cmd_synth(const SynthOptions& opt, std::ostream& out);

}  // namespace itemvoice::cli

#endif  // ITEMVOICE_COMMANDS_HPP_
