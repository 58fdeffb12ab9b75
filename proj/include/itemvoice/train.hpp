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

#ifndef ITEMVOICE_TRAIN_HPP_
#define ITEMVOICE_TRAIN_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "itemvoice/adam.hpp"
#include "itemvoice/checkpoint.hpp"
#include "itemvoice/dataset.hpp"
#include "itemvoice/metrics.hpp"
#include "itemvoice/model.hpp"
#include "itemvoice/vote.hpp"

namespace itemvoice::train {

struct SearchSpace {
  std::vector<int> use_batchnorm{0, 1};
  std::vector<double> dropout_rate{0.0, 0.1, 0.3, 0.5};
  std::vector<double> l2_lambda{0.0, 1e-5, 1e-4, 1e-3};
};

struct TrainConfig {
  nn::AdamConfig adam;
  std::int64_t batch_size = 32;
  std::int64_t max_epochs = 100;
  std::uint64_t seed = 0;
  SearchSpace search_space;
  std::int64_t n_search_trials = 1;
  vote::VoteMethod selection_vote = vote::VoteMethod::soft;
  bool class_weighted_loss = false;  // inverse-frequency NLL weights
};

struct Hyperparams {
  bool use_batchnorm = false;
  double dropout_rate = 0.0;
  double l2_lambda = 0.0;
};

struct EpochRecord {
  std::int64_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_weighted_f = 0.0;
  double val_f_absent = 0.0;
  double val_f_present = 0.0;
};

struct TrainedItemModel {
  int item_index = 0;  // 1-based scale item; 0 = depression target
  nn::Checkpoint checkpoint;
  Hyperparams chosen_hyperparams;
  double validation_weighted_f = 0.0;
  std::vector<EpochRecord> training_log;
  bool degenerate_single_class = false;  // training labels were all identical
  std::int64_t best_epoch = 0;           // epoch of the stored checkpoint
  std::int64_t trial_index = 0;          // set by random_search
};

// Largest number of units per forward graph. Bounds tape memory; gradients
// accumulate across micro-graphs so the optimizer still sees full batches.
std::int64_t micro_batch_cap(nn::ModelKind kind);

// Per-segment class probabilities for one recording, one column per grid
// position. head selects the multi-task output.
vote::SegmentProbabilityGrid recording_grid(nn::Model& model, const data::Corpus& corpus,
                                            std::size_t recording, int item_index,
                                            int head = 0);

// Recording-level F-scores over a split: vote each recording's grid and
// compare with that recording's label (item_index 0 = depressed flag).
eval::FScores evaluate_split(nn::Model& model, const data::Corpus& corpus,
                             const std::string& split, int item_index,
                             vote::VoteMethod method, int head = 0);

// Adam + NLL training of one binary segment classifier with per-epoch
// validation. Keeps the epoch checkpoint with the highest validation
// weighted F; ties go to the earlier epoch. Validation always runs on the
// float32-rounded weights, so the stored score re-evaluates exactly from
// the checkpoint.
TrainedItemModel train_item(const nn::ModelSpec& spec, int item_index,
                            const data::Corpus& corpus, const TrainConfig& cfg);

// n_search_trials uniform draws over the search space, one train_item run
// each; returns the best validation weighted F, ties to the lower trial.
TrainedItemModel random_search(const nn::ModelSpec& spec, int item_index,
                               const data::Corpus& corpus, const TrainConfig& cfg);

// train_item against the recording-level depressed flag.
TrainedItemModel train_depression_model(const nn::ModelSpec& spec,
                                        const data::Corpus& corpus, const TrainConfig& cfg);

// One shared trunk with a head per scale item, trained on the mean of the
// per-head losses. Selection uses the macro mean of per-item validation
// weighted F; the result carries item_index -1.
TrainedItemModel train_multitask(const nn::ModelSpec& spec, const data::Corpus& corpus,
                                 const TrainConfig& cfg);

std::string training_log_csv_string(const std::vector<EpochRecord>& log);
void write_training_log_csv(const std::string& path, const std::vector<EpochRecord>& log);

}  // namespace itemvoice::train

#endif  // ITEMVOICE_TRAIN_HPP_
