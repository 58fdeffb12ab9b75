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

#include <iostream>

#include <CLI11.hpp>

#include "itemvoice/commands.hpp"
#include "itemvoice/error.hpp"

namespace {

using itemvoice::cli::EvaluateOptions;
using itemvoice::cli::ExtractOptions;
using itemvoice::cli::PredictOptions;
using itemvoice::cli::SynthOptions;
using itemvoice::cli::TimelineOptions;
using itemvoice::cli::TrainOptions;

void add_train_flags(CLI::App* cmd, TrainOptions& opt) {
  cmd->add_option("--manifest", opt.manifest, "Recording manifest CSV")->required();
  cmd->add_option("--scale", opt.scale, "Rating scale: madrs or phq8");
  cmd->add_option("--model", opt.model,
                  "spec_cnn | spec_cnn_lstm | egemaps_cnn | egemaps_cnn_lstm");
  cmd->add_option("--task", opt.task, "classify or regress");
  cmd->add_option("--cache-dir", opt.cache_dir, "Spectrogram cache directory");
  cmd->add_option("--functionals", opt.functionals, "Functional feature CSV");
  cmd->add_option("--out", opt.out_dir, "Output directory")->required();
  cmd->add_option("--items", opt.items, "Item indices, e.g. 1,3,10; default all");
  cmd->add_option("--vote", opt.vote, "Validation voting: soft or hard");
  cmd->add_option("--stft-window", opt.window, "Analysis window: hann or rectangular");
  cmd->add_flag("--depression", opt.depression, "Also train the depression model");
  cmd->add_flag("--multitask", opt.multitask, "One model with a head per item");
  cmd->add_flag("--drop-last", opt.drop_last, "Drop the final partly covered segment");
  cmd->add_flag("--standardize", opt.standardize, "Standardize each spectrogram window");
  cmd->add_flag("--batchnorm", opt.use_batchnorm, "Batch normalization after convolutions");
  cmd->add_flag("--class-weights", opt.class_weights, "Inverse-frequency loss weights");
  cmd->add_option("--dropout", opt.dropout, "Dropout rate on the embedding");
  cmd->add_option("--egemaps-dim", opt.egemaps_dim, "Functional vector width");
  cmd->add_option("--batch-size", opt.train.batch_size, "Segments per optimizer step");
  cmd->add_option("--epochs", opt.train.max_epochs, "Training epochs");
  cmd->add_option("--seed", opt.train.seed, "Random seed");
  cmd->add_option("--lr", opt.train.adam.lr, "Adam learning rate");
  cmd->add_option("--beta1", opt.train.adam.beta1, "Adam first-moment decay");
  cmd->add_option("--beta2", opt.train.adam.beta2, "Adam second-moment decay");
  cmd->add_option("--epsilon", opt.train.adam.eps, "Adam epsilon");
  cmd->add_option("--weight-decay", opt.train.adam.weight_decay, "L2 coefficient");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-item depression assessment from speech segments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style config file; sections per subcommand");
  app.get_config_ptr()->check(CLI::ExistingFile);

  ExtractOptions ex;
  CLI::App* extract = app.add_subcommand("extract", "Compute spectrogram caches");
  extract->add_option("--manifest", ex.manifest, "Recording manifest CSV")->required();
  extract->add_option("--scale", ex.scale, "Rating scale: madrs or phq8");
  extract->add_option("--out", ex.out_dir, "Cache directory")->required();
  extract->add_option("--stft-window", ex.window, "Analysis window: hann or rectangular");
  extract->add_flag("--drop-last", ex.drop_last, "Report drop-last segment counts");
  extract->callback([&] { itemvoice::cli::cmd_extract(ex, std::cout); });

  TrainOptions tr;
  CLI::App* train = app.add_subcommand("train", "Train per-item models");
  add_train_flags(train, tr);
  train->callback([&] { itemvoice::cli::cmd_train(tr, std::cout); });

  TrainOptions se;
  CLI::App* search = app.add_subcommand("search", "Random hyper-parameter search");
  add_train_flags(search, se);
  search->add_option("--trials", se.trials, "Search trials per item");
  search->callback([&] { itemvoice::cli::cmd_search(se, std::cout); });

  EvaluateOptions ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score checkpoints on a split");
  evaluate->add_option("--manifest", ev.manifest, "Recording manifest CSV")->required();
  evaluate->add_option("--scale", ev.scale, "Rating scale: madrs or phq8");
  evaluate->add_option("--checkpoints", ev.checkpoint_dir, "Checkpoint directory")
      ->required();
  evaluate->add_option("--split", ev.split, "train, val or test");
  evaluate->add_option("--cache-dir", ev.cache_dir, "Spectrogram cache directory");
  evaluate->add_option("--functionals", ev.functionals, "Functional feature CSV");
  evaluate->add_option("--out", ev.out_csv, "Report CSV path; default prints to stdout");
  evaluate->add_option("--combine", ev.combine, "Item combination: mean_prob or count_threshold");
  evaluate->add_option("--combine-k", ev.combine_k, "count_threshold minimum present count");
  evaluate->add_option("--depression-from", ev.depression_from,
                       "Depression row source: auto, model, combine or none");
  evaluate->add_option("--stft-window", ev.window, "Analysis window: hann or rectangular");
  evaluate->add_flag("--drop-last", ev.drop_last, "Drop the final partly covered segment");
  evaluate->add_flag("--standardize", ev.standardize, "Standardize each spectrogram window");
  evaluate->add_option("--egemaps-dim", ev.egemaps_dim, "Functional vector width");
  evaluate->callback([&] { itemvoice::cli::cmd_evaluate(ev, std::cout); });

  PredictOptions pr;
  CLI::App* predict = app.add_subcommand("predict", "Segment probabilities for one recording");
  predict->add_option("--checkpoint", pr.checkpoint, "Trained model checkpoint")->required();
  predict->add_option("--wav", pr.wav, "Input audio (spectrogram models)");
  predict->add_option("--functionals", pr.functionals, "Functional CSV (egemaps models)");
  predict->add_option("--recording-id", pr.recording_id, "Recording to pick from the CSV");
  predict->add_option("--out", pr.out_json, "Output JSON path; default prints to stdout");
  predict->add_option("--stft-window", pr.window, "Analysis window: hann or rectangular");
  predict->add_flag("--drop-last", pr.drop_last, "Drop the final partly covered segment");
  predict->add_flag("--standardize", pr.standardize, "Standardize each spectrogram window");
  predict->add_option("--egemaps-dim", pr.egemaps_dim, "Functional vector width");
  predict->add_option("--head", pr.head, "Multi-task head index");
  predict->callback([&] { itemvoice::cli::cmd_predict(pr, std::cout); });

  TimelineOptions tl;
  CLI::App* timeline = app.add_subcommand("timeline", "Export a probability timeline");
  timeline->add_option("--checkpoint", tl.checkpoint, "Trained model checkpoint")->required();
  timeline->add_option("--wav", tl.wav, "Input audio (spectrogram models)");
  timeline->add_option("--functionals", tl.functionals, "Functional CSV (egemaps models)");
  timeline->add_option("--recording-id", tl.recording_id, "Recording to pick from the CSV");
  timeline->add_option("--out", tl.out_prefix, "Output prefix for .json and .svg")
      ->required();
  timeline->add_option("--stft-window", tl.window, "Analysis window: hann or rectangular");
  timeline->add_flag("--drop-last", tl.drop_last, "Drop the final partly covered segment");
  timeline->add_flag("--standardize", tl.standardize, "Standardize each spectrogram window");
  timeline->add_option("--egemaps-dim", tl.egemaps_dim, "Functional vector width");
  timeline->add_option("--head", tl.head, "Multi-task head index");
  timeline->callback([&] { itemvoice::cli::cmd_timeline(tl, std::cout); });

  SynthOptions sy;
  CLI::App* synth = app.add_subcommand("synth", "Generate the synthetic two-class corpus");
  synth->add_option("--out", sy.out_dir, "Corpus directory")->required();
  synth->add_option("--scale", sy.scale, "Rating scale: madrs or phq8");
  synth->add_option("--speakers", sy.n_speakers, "Total speakers (one recording each)");
  synth->add_option("--train", sy.n_train, "Speakers in the train split");
  synth->add_option("--val", sy.n_val, "Speakers in the val split");
  synth->add_option("--test", sy.n_test, "Speakers in the test split");
  synth->add_option("--duration", sy.duration_s, "Seconds per recording");
  synth->add_option("--seed", sy.seed, "Random seed");
  synth->add_flag("--functionals", sy.functionals, "Also write a functional feature CSV");
  synth->callback([&] { itemvoice::cli::cmd_synth(sy, std::cout); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const itemvoice::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return itemvoice::is_validation_error(e.kind()) ? 2 : 3;
  }
  return 0;
}
