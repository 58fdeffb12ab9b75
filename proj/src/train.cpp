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

#include "itemvoice/train.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "itemvoice/error.hpp"

namespace itemvoice::train {

std::int64_t micro_batch_cap(nn::ModelKind kind) {
  switch (kind) {
    case nn::ModelKind::spec_cnn:
      return 8;
    case nn::ModelKind::spec_cnn_lstm:
      return 2;
    case nn::ModelKind::egemaps_cnn:
      return 64;
    case nn::ModelKind::egemaps_cnn_lstm:
      return 16;
  }
  raise(ErrorKind::BadConfig, "bad model kind value");
}

vote::SegmentProbabilityGrid recording_grid(nn::Model& model, const data::Corpus& corpus,
                                            std::size_t recording, int item_index,
                                            int head) {
  const data::RecordingData& rd = corpus.recordings[recording];
  const bool lstm = model.spec().uses_lstm();
  const bool dropped = lstm && corpus.drop_last;

  vote::SegmentProbabilityGrid grid;
  grid.recording_id = rd.recording_id;
  grid.item_index = item_index;
  grid.geometry.segment_span_s = lstm ? seg::kSequenceSpanS : seg::kWindowSpanS;
  grid.geometry.hop_s = seg::kHopS;
  grid.geometry.n_segments = rd.n_units;
  grid.geometry.drop_last = dropped;
  grid.geometry.recording_duration_s = grid.geometry.segment_span_s +
                                       static_cast<double>(rd.n_units - 1) +
                                       (dropped ? 1.0 : 0.0);

  const bool regress = model.spec().task == nn::TaskKind::regress;
  const std::int64_t cap = micro_batch_cap(corpus.kind);
  std::vector<data::UnitRef> chunk;
  for (std::int64_t u0 = 0; u0 < rd.n_units; u0 += cap) {
    const std::int64_t n = std::min(cap, rd.n_units - u0);
    chunk.clear();
    for (std::int64_t u = 0; u < n; ++u) chunk.push_back({recording, u0 + u});
    const nn::Tensor batch = data::make_batch(corpus, chunk);
    if (regress) {
      // Regression heads predict the binarized target directly; clamping
      // into [0,1] turns the estimate into a present probability.
      const nn::Tensor vals = model.predict_values(batch, n, head);
      for (std::int64_t i = 0; i < n; ++i) {
        const double p = std::clamp(vals(i, 0), 0.0, 1.0);
        grid.probs.push_back({1.0 - p, p});
      }
    } else {
      const nn::Tensor probs = model.predict_probs(batch, n, head);
      for (std::int64_t i = 0; i < n; ++i) grid.probs.push_back({probs(i, 0), probs(i, 1)});
    }
  }
  return grid;
}

eval::FScores evaluate_split(nn::Model& model, const data::Corpus& corpus,
                             const std::string& split, int item_index,
                             vote::VoteMethod method, int head) {
  const std::vector<std::size_t> recs = corpus.split_recordings(split);
  if (recs.empty()) raise(ErrorKind::EmptySplit, "no recordings in split '" + split + "'");
  std::vector<bool> preds, labels;
  for (std::size_t ri : recs) {
    const auto grid = recording_grid(model, corpus, ri, item_index, head);
    preds.push_back(vote::apply_vote(grid, method).present);
    labels.push_back(data::unit_target(corpus, {ri, 0}, item_index) == 1);
  }
  return eval::f_scores(preds, labels);
}

namespace {

double unit_weight(const std::vector<double>& class_weights, std::int64_t target) {
  return class_weights.empty() ? 1.0 : class_weights[static_cast<std::size_t>(target)];
}

// w_c = n_total / (2 * n_c); a class absent from training keeps weight 0,
// which the loss never applies because that target never occurs.
std::vector<double> inverse_frequency_weights(const data::Corpus& corpus,
                                              const std::vector<data::UnitRef>& units,
                                              int item_index) {
  std::int64_t counts[2] = {0, 0};
  for (const data::UnitRef& u : units) ++counts[data::unit_target(corpus, u, item_index)];
  std::vector<double> w(2, 0.0);
  const double total = static_cast<double>(counts[0] + counts[1]);
  for (int c = 0; c < 2; ++c) {
    if (counts[c] > 0) w[static_cast<std::size_t>(c)] = total / (2.0 * counts[c]);
  }
  return w;
}

}  // namespace

TrainedItemModel train_item(const nn::ModelSpec& spec, int item_index,
                            const data::Corpus& corpus, const TrainConfig& cfg) {
  if (cfg.batch_size < 1) raise(ErrorKind::BadConfig, "batch_size must be >= 1");
  if (cfg.max_epochs < 1) raise(ErrorKind::BadConfig, "max_epochs must be >= 1");
  const std::vector<std::size_t> train_recs = corpus.split_recordings("train");
  if (train_recs.empty()) raise(ErrorKind::EmptySplit, "train split is empty");
  if (corpus.split_recordings("val").empty()) {
    raise(ErrorKind::EmptySplit, "val split is empty");
  }

  std::vector<data::UnitRef> units = data::collect_units(corpus, train_recs);

  TrainedItemModel out;
  out.item_index = item_index;
  out.chosen_hyperparams = {spec.use_batchnorm, spec.dropout_rate, cfg.adam.weight_decay};

  bool saw[2] = {false, false};
  for (const data::UnitRef& u : units) saw[data::unit_target(corpus, u, item_index)] = true;
  out.degenerate_single_class = !(saw[0] && saw[1]);

  std::vector<double> class_weights;
  if (cfg.class_weighted_loss && spec.task == nn::TaskKind::classify) {
    class_weights = inverse_frequency_weights(corpus, units, item_index);
  }

  // Stream split: the master seed drives weight init, forks drive epoch
  // shuffling and dropout masks. Evaluation consumes no randomness, so the
  // training trajectory is a pure function of (seed, data, config).
  Rng init_rng(cfg.seed);
  nn::Model model(spec, init_rng);
  Rng shuffle_rng = Rng(cfg.seed).fork(1);
  Rng dropout_rng = Rng(cfg.seed).fork(2);

  nn::Adam adam(model.parameters(), cfg.adam);
  const std::int64_t cap = micro_batch_cap(corpus.kind);
  const auto n_units = static_cast<std::int64_t>(units.size());
  double best_f = -1.0;

  for (std::int64_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(units);
    double loss_sum = 0.0;
    std::int64_t seen = 0;

    for (std::int64_t b0 = 0; b0 < n_units; b0 += cfg.batch_size) {
      const std::int64_t batch_n = std::min(cfg.batch_size, n_units - b0);
      double weight_total = 0.0;
      for (std::int64_t i = 0; i < batch_n; ++i) {
        weight_total += unit_weight(
            class_weights,
            data::unit_target(corpus, units[static_cast<std::size_t>(b0 + i)], item_index));
      }

      adam.zero_grad();
      double batch_loss = 0.0;
      for (std::int64_t m0 = 0; m0 < batch_n; m0 += cap) {
        const std::int64_t micro_n = std::min(cap, batch_n - m0);
        const auto first = units.begin() + b0 + m0;
        const std::vector<data::UnitRef> micro(first, first + micro_n);
        std::vector<std::int64_t> targets;
        targets.reserve(static_cast<std::size_t>(micro_n));
        double micro_weight = 0.0;
        for (const data::UnitRef& u : micro) {
          targets.push_back(data::unit_target(corpus, u, item_index));
          micro_weight += unit_weight(class_weights, targets.back());
        }

        nn::Graph g(true);
        nn::Var x = g.input(data::make_batch(corpus, micro));
        std::vector<nn::Var> heads = model.forward(g, x, micro_n, dropout_rng);
        nn::Var loss;
        if (spec.task == nn::TaskKind::regress) {
          nn::Tensor want = nn::Tensor::zeros({micro_n, 1});
          for (std::int64_t i = 0; i < micro_n; ++i) {
            want.data[static_cast<std::size_t>(i)] =
                static_cast<double>(targets[static_cast<std::size_t>(i)]);
          }
          loss = g.mse_loss(heads[0], std::move(want));
        } else {
          loss = g.nll_loss(heads[0], std::move(targets), class_weights);
        }
        // Summing micro losses scaled by their weight share reproduces the
        // whole-batch mean exactly, so the cap never changes the gradients.
        nn::Var scaled = g.scale(loss, micro_weight / weight_total);
        g.backward(scaled);
        batch_loss += g.value(scaled).data[0];
      }
      adam.step();
      loss_sum += batch_loss * static_cast<double>(batch_n);
      seen += batch_n;
    }

    nn::Model snapshot = model.rounded_f32();
    const eval::FScores f =
        evaluate_split(snapshot, corpus, "val", item_index, cfg.selection_vote, 0);
    out.training_log.push_back(
        {epoch, loss_sum / static_cast<double>(seen), f.weighted_f, f.f_absent, f.f_present});

    if (f.weighted_f > best_f) {
      best_f = f.weighted_f;
      out.best_epoch = epoch;
      out.validation_weighted_f = f.weighted_f;
      out.checkpoint = snapshot.to_checkpoint();
    }
  }

  out.checkpoint.meta["item_index"] = out.item_index;
  out.checkpoint.meta["validation_weighted_f"] = out.validation_weighted_f;
  out.checkpoint.meta["best_epoch"] = out.best_epoch;
  out.checkpoint.meta["seed"] = cfg.seed;
  out.checkpoint.meta["degenerate_single_class"] = out.degenerate_single_class;
  out.checkpoint.meta["hyperparams"] = {{"use_batchnorm", out.chosen_hyperparams.use_batchnorm},
                                        {"dropout_rate", out.chosen_hyperparams.dropout_rate},
                                        {"l2_lambda", out.chosen_hyperparams.l2_lambda}};
  return out;
}

TrainedItemModel random_search(const nn::ModelSpec& spec, int item_index,
                               const data::Corpus& corpus, const TrainConfig& cfg) {
  if (cfg.n_search_trials < 1) raise(ErrorKind::BadConfig, "n_search_trials must be >= 1");
  const SearchSpace& space = cfg.search_space;
  if (space.use_batchnorm.empty() || space.dropout_rate.empty() || space.l2_lambda.empty()) {
    raise(ErrorKind::BadConfig, "search space axes must be non-empty");
  }

  Rng draw(cfg.seed);
  TrainedItemModel best;
  bool have = false;
  for (std::int64_t t = 0; t < cfg.n_search_trials; ++t) {
    Hyperparams hp;
    hp.use_batchnorm = space.use_batchnorm[draw.below(space.use_batchnorm.size())] != 0;
    hp.dropout_rate = space.dropout_rate[draw.below(space.dropout_rate.size())];
    hp.l2_lambda = space.l2_lambda[draw.below(space.l2_lambda.size())];

    nn::ModelSpec trial_spec = spec;
    trial_spec.use_batchnorm = hp.use_batchnorm;
    trial_spec.dropout_rate = hp.dropout_rate;
    TrainConfig trial_cfg = cfg;
    trial_cfg.adam.weight_decay = hp.l2_lambda;
    trial_cfg.seed = Rng(cfg.seed).fork(static_cast<std::uint64_t>(t) + 1).seed();

    TrainedItemModel result = train_item(trial_spec, item_index, corpus, trial_cfg);
    result.trial_index = t;
    result.checkpoint.meta["trial_index"] = t;
    if (!have || result.validation_weighted_f > best.validation_weighted_f) {
      best = std::move(result);
      have = true;
    }
  }
  return best;
}

TrainedItemModel train_depression_model(const nn::ModelSpec& spec,
                                        const data::Corpus& corpus, const TrainConfig& cfg) {
  return train_item(spec, 0, corpus, cfg);
}

TrainedItemModel train_multitask(const nn::ModelSpec& spec, const data::Corpus& corpus,
                                 const TrainConfig& cfg) {
  if (cfg.batch_size < 1) raise(ErrorKind::BadConfig, "batch_size must be >= 1");
  if (cfg.max_epochs < 1) raise(ErrorKind::BadConfig, "max_epochs must be >= 1");
  if (spec.task != nn::TaskKind::classify) {
    raise(ErrorKind::BadConfig, "multi-task training requires the classify task");
  }
  const int n_items = corpus.scale.n_items();
  if (spec.heads != n_items) {
    raise(ErrorKind::BadConfig, "multi-task model needs one head per scale item");
  }
  const std::vector<std::size_t> train_recs = corpus.split_recordings("train");
  if (train_recs.empty()) raise(ErrorKind::EmptySplit, "train split is empty");
  if (corpus.split_recordings("val").empty()) {
    raise(ErrorKind::EmptySplit, "val split is empty");
  }

  std::vector<data::UnitRef> units = data::collect_units(corpus, train_recs);

  TrainedItemModel out;
  out.item_index = -1;
  out.chosen_hyperparams = {spec.use_batchnorm, spec.dropout_rate, cfg.adam.weight_decay};

  out.degenerate_single_class = true;
  for (int h = 0; h < n_items && out.degenerate_single_class; ++h) {
    bool saw[2] = {false, false};
    for (const data::UnitRef& u : units) saw[data::unit_target(corpus, u, h + 1)] = true;
    if (saw[0] && saw[1]) out.degenerate_single_class = false;
  }

  std::vector<std::vector<double>> head_weights(static_cast<std::size_t>(n_items));
  if (cfg.class_weighted_loss) {
    for (int h = 0; h < n_items; ++h) {
      head_weights[static_cast<std::size_t>(h)] =
          inverse_frequency_weights(corpus, units, h + 1);
    }
  }

  Rng init_rng(cfg.seed);
  nn::Model model(spec, init_rng);
  Rng shuffle_rng = Rng(cfg.seed).fork(1);
  Rng dropout_rng = Rng(cfg.seed).fork(2);

  nn::Adam adam(model.parameters(), cfg.adam);
  const std::int64_t cap = micro_batch_cap(corpus.kind);
  const auto n_units = static_cast<std::int64_t>(units.size());
  double best_f = -1.0;

  for (std::int64_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(units);
    double loss_sum = 0.0;
    std::int64_t seen = 0;

    for (std::int64_t b0 = 0; b0 < n_units; b0 += cfg.batch_size) {
      const std::int64_t batch_n = std::min(cfg.batch_size, n_units - b0);
      adam.zero_grad();
      double batch_loss = 0.0;
      for (std::int64_t m0 = 0; m0 < batch_n; m0 += cap) {
        const std::int64_t micro_n = std::min(cap, batch_n - m0);
        const auto first = units.begin() + b0 + m0;
        const std::vector<data::UnitRef> micro(first, first + micro_n);

        nn::Graph g(true);
        nn::Var x = g.input(data::make_batch(corpus, micro));
        std::vector<nn::Var> heads = model.forward(g, x, micro_n, dropout_rng);
        nn::Var acc;
        for (int h = 0; h < n_items; ++h) {
          std::vector<std::int64_t> targets;
          targets.reserve(static_cast<std::size_t>(micro_n));
          for (const data::UnitRef& u : micro) {
            targets.push_back(data::unit_target(corpus, u, h + 1));
          }
          nn::Var term = g.nll_loss(heads[static_cast<std::size_t>(h)], std::move(targets),
                                    head_weights[static_cast<std::size_t>(h)]);
          acc = h == 0 ? term : g.add(acc, term);
        }
        // Head-mean loss; micro terms are per-sample means, so weighting by
        // the sample share reassembles the batch mean. Weighted per-head
        // normalizers make this approximate under class_weighted_loss.
        nn::Var scaled = g.scale(acc, static_cast<double>(micro_n) /
                                          static_cast<double>(n_items * batch_n));
        g.backward(scaled);
        batch_loss += g.value(scaled).data[0];
      }
      adam.step();
      loss_sum += batch_loss * static_cast<double>(batch_n);
      seen += batch_n;
    }

    nn::Model snapshot = model.rounded_f32();
    double mean_f = 0.0, mean_fa = 0.0, mean_fp = 0.0;
    for (int h = 0; h < n_items; ++h) {
      const eval::FScores f =
          evaluate_split(snapshot, corpus, "val", h + 1, cfg.selection_vote, h);
      mean_f += f.weighted_f;
      mean_fa += f.f_absent;
      mean_fp += f.f_present;
    }
    mean_f /= n_items;
    mean_fa /= n_items;
    mean_fp /= n_items;
    out.training_log.push_back(
        {epoch, loss_sum / static_cast<double>(seen), mean_f, mean_fa, mean_fp});

    if (mean_f > best_f) {
      best_f = mean_f;
      out.best_epoch = epoch;
      out.validation_weighted_f = mean_f;
      out.checkpoint = snapshot.to_checkpoint();
    }
  }

  out.checkpoint.meta["item_index"] = out.item_index;
  out.checkpoint.meta["multitask"] = true;
  out.checkpoint.meta["validation_weighted_f"] = out.validation_weighted_f;
  out.checkpoint.meta["best_epoch"] = out.best_epoch;
  out.checkpoint.meta["seed"] = cfg.seed;
  out.checkpoint.meta["degenerate_single_class"] = out.degenerate_single_class;
  out.checkpoint.meta["hyperparams"] = {{"use_batchnorm", out.chosen_hyperparams.use_batchnorm},
                                        {"dropout_rate", out.chosen_hyperparams.dropout_rate},
                                        {"l2_lambda", out.chosen_hyperparams.l2_lambda}};
  return out;
}

std::string training_log_csv_string(const std::vector<EpochRecord>& log) {
  std::string out = "epoch,train_loss,val_weighted_f,val_f_absent,val_f_present\n";
  char line[160];
  for (const EpochRecord& r : log) {
    std::snprintf(line, sizeof(line), "%lld,%.6f,%.6f,%.6f,%.6f\n",
                  static_cast<long long>(r.epoch), r.train_loss, r.val_weighted_f,
                  r.val_f_absent, r.val_f_present);
    out += line;
  }
  return out;
}

void write_training_log_csv(const std::string& path, const std::vector<EpochRecord>& log) {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(ErrorKind::IoError, "cannot write " + path);
  f << training_log_csv_string(log);
}

}  // namespace itemvoice::train
