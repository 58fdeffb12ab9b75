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

#include "itemvoice/commands.hpp"

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>

#include "itemvoice/config.hpp"
#include "itemvoice/error.hpp"
#include "itemvoice/functionals.hpp"
#include "itemvoice/synth.hpp"
#include "itemvoice/timeline.hpp"

namespace itemvoice::cli {

namespace fs = std::filesystem;

namespace {

std::string f4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

struct TrainContext {
  corpus::ScaleDefinition scale;
  data::Corpus corpus;
  train::TrainConfig cfg;
  nn::ModelSpec spec;
};

TrainContext make_train_context(const TrainOptions& opt) {
  TrainContext ctx;
  ctx.scale = corpus::scale_by_name(opt.scale);
  const corpus::Manifest manifest = corpus::parse_manifest(opt.manifest, ctx.scale);

  const nn::ModelKind kind = nn::model_kind_by_name(opt.model);
  const data::FeatureSource source{opt.manifest, opt.cache_dir, opt.functionals};
  ctx.corpus = data::build_corpus(manifest, kind, source, stft_with_window(opt.window),
                                  opt.drop_last, opt.egemaps_dim, opt.standardize);

  ctx.cfg = opt.train;
  ctx.cfg.seed = effective_seed(ctx.cfg.seed);
  ctx.cfg.selection_vote = vote::vote_method_by_name(opt.vote);
  ctx.cfg.class_weighted_loss = opt.class_weights;
  ctx.cfg.n_search_trials = opt.trials;

  ctx.spec.kind = kind;
  ctx.spec.task = nn::task_by_name(opt.task);
  ctx.spec.heads = opt.multitask ? ctx.scale.n_items() : 1;
  ctx.spec.use_batchnorm = opt.use_batchnorm;
  ctx.spec.dropout_rate = opt.dropout;
  ctx.spec.egemaps_dim = opt.egemaps_dim;
  return ctx;
}

std::string target_name(const corpus::ScaleDefinition& scale, int item_index) {
  return item_index == 0 ? "Depression" : scale.item_name(item_index);
}

void save_trained(const TrainContext& ctx, train::TrainedItemModel& result,
                  const std::string& ckpt_path, const std::string& log_path) {
  result.checkpoint.meta["scale"] = ctx.scale.name;
  if (result.item_index >= 0) {
    result.checkpoint.meta["item_name"] = target_name(ctx.scale, result.item_index);
  }
  nn::save_checkpoint(ckpt_path, result.checkpoint);
  train::write_training_log_csv(log_path, result.training_log);
}

void report_trained(std::ostream& out, const corpus::ScaleDefinition& scale,
                    const train::TrainedItemModel& r, bool searched) {
  if (r.item_index < 0) {
    out << "multitask";
  } else {
    out << "(" << r.item_index << ") " << target_name(scale, r.item_index);
  }
  out << ": val_f=" << f4(r.validation_weighted_f) << " best_epoch=" << r.best_epoch;
  if (searched) {
    out << " trial=" << r.trial_index
        << " batchnorm=" << (r.chosen_hyperparams.use_batchnorm ? 1 : 0)
        << " dropout=" << r.chosen_hyperparams.dropout_rate
        << " l2=" << r.chosen_hyperparams.l2_lambda;
  }
  if (r.degenerate_single_class) out << " [single-class train split]";
  out << "\n";
}

// Runs one train/search target, reporting per-item failures without
// aborting the remaining items. The first failure is rethrown at the end of
// the command so the exit code still reflects it.
template <typename Fn>
void run_target(std::ostream& out, int item_index, const corpus::ScaleDefinition& scale,
                std::exception_ptr& first_failure, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    out << "(" << item_index << ") " << target_name(scale, item_index)
        << ": FAILED: " << e.what() << "\n";
    if (!first_failure) first_failure = std::current_exception();
  }
}

data::Corpus predict_input(nn::ModelKind kind, const std::string& wav,
                           const std::string& functionals, const std::string& recording_id,
                           const dsp::StftConfig& stft, bool drop_last, bool standardize,
                           std::int64_t egemaps_dim) {
  const bool spectro =
      kind == nn::ModelKind::spec_cnn || kind == nn::ModelKind::spec_cnn_lstm;
  if (spectro) {
    if (wav.empty()) {
      raise(ErrorKind::BadConfig, "this checkpoint consumes audio; pass --wav");
    }
    return data::predict_corpus(kind, io::load_wav(wav, stft.sample_rate_hz), stft,
                                drop_last, standardize);
  }
  if (functionals.empty()) {
    raise(ErrorKind::BadConfig,
          "this checkpoint consumes functional features; pass --functionals");
  }
  auto grouped = corpus::group_functionals(corpus::import_functionals(functionals, egemaps_dim));
  std::string id = recording_id;
  if (id.empty()) {
    if (grouped.size() != 1) {
      raise(ErrorKind::BadConfig,
            "functionals CSV holds several recordings; pass --recording-id");
    }
    id = grouped.begin()->first;
  }
  const auto it = grouped.find(id);
  if (it == grouped.end()) {
    raise(ErrorKind::BadConfig, "recording '" + id + "' not in the functionals CSV");
  }
  return data::predict_corpus_functionals(kind, id, std::move(it->second), egemaps_dim,
                                          drop_last, standardize);
}

struct LoadedModel {
  nn::Checkpoint checkpoint;
  std::optional<nn::Model> model;
  int item_index = 0;
  std::string item_name;
};

LoadedModel load_model(const std::string& path, int head) {
  LoadedModel lm;
  lm.checkpoint = nn::load_checkpoint(path);
  lm.model.emplace(nn::Model::from_checkpoint(lm.checkpoint));
  lm.item_index = lm.checkpoint.meta.value("item_index", 0);
  lm.item_name = lm.checkpoint.meta.value("item_name", std::string());
  if (lm.checkpoint.meta.value("multitask", false)) {
    lm.item_index = head + 1;
    if (lm.checkpoint.meta.contains("scale")) {
      lm.item_name = corpus::scale_by_name(lm.checkpoint.meta["scale"].get<std::string>())
                         .item_name(lm.item_index);
    }
  }
  if (lm.item_name.empty()) lm.item_name = lm.item_index == 0 ? "Depression" : "item";
  return lm;
}

}  // namespace

void cmd_extract(const ExtractOptions& opt, std::ostream& out) {
  if (opt.out_dir.empty()) raise(ErrorKind::BadConfig, "extract needs --out");
  const corpus::ScaleDefinition scale = corpus::scale_by_name(opt.scale);
  const corpus::Manifest manifest = corpus::parse_manifest(opt.manifest, scale);
  const dsp::StftConfig stft = stft_with_window(opt.window);
  const dsp::MelFilterbank bank =
      dsp::build_mel_filterbank(stft.sample_rate_hz, stft.fft_size, 64);
  fs::create_directories(opt.out_dir);

  for (const corpus::ManifestRow& row : manifest.rows) {
    const io::Recording rec =
        io::load_wav(corpus::resolve_path(opt.manifest, row.path), stft.sample_rate_hz);
    const dsp::LogMelSpectrogram spec =
        dsp::compute_log_mel(rec.samples, stft, bank, row.recording_id);
    dsp::save_spectrogram_cache(
        (fs::path(opt.out_dir) / (row.recording_id + ".ivsc")).string(), spec);

    std::int64_t windows = 0, segments = 0;
    try {
      windows = seg::cnn_window_count(rec.duration_s());
    } catch (const Error&) {
    }
    try {
      segments = seg::grid_geometry(rec.duration_s(), opt.drop_last).n_segments;
    } catch (const Error&) {
    }
    out << row.recording_id << " frames=" << spec.n_frames() << " windows=" << windows
        << " segments=" << segments << "\n";
  }
}

void cmd_train(const TrainOptions& opt, std::ostream& out) {
  if (opt.out_dir.empty()) raise(ErrorKind::BadConfig, "train needs --out");
  const TrainContext ctx = make_train_context(opt);
  fs::create_directories(opt.out_dir);

  if (opt.multitask) {
    train::TrainedItemModel r = train::train_multitask(ctx.spec, ctx.corpus, ctx.cfg);
    save_trained(ctx, r, (fs::path(opt.out_dir) / "multitask.ivck").string(),
                 (fs::path(opt.out_dir) / "multitask_log.csv").string());
    report_trained(out, ctx.scale, r, false);
    return;
  }

  std::vector<int> targets = parse_items(opt.items, ctx.scale);
  if (opt.depression) targets.push_back(0);

  std::exception_ptr first_failure;
  for (int k : targets) {
    run_target(out, k, ctx.scale, first_failure, [&] {
      train::TrainedItemModel r = train::train_item(ctx.spec, k, ctx.corpus, ctx.cfg);
      save_trained(ctx, r, item_checkpoint_path(opt.out_dir, k),
                   item_log_path(opt.out_dir, k));
      report_trained(out, ctx.scale, r, false);
    });
  }
  if (first_failure) std::rethrow_exception(first_failure);
}

void cmd_search(const TrainOptions& opt, std::ostream& out) {
  if (opt.out_dir.empty()) raise(ErrorKind::BadConfig, "search needs --out");
  if (opt.multitask) {
    raise(ErrorKind::BadConfig, "hyper-parameter search runs per item; drop --multitask");
  }
  const TrainContext ctx = make_train_context(opt);
  fs::create_directories(opt.out_dir);

  std::vector<int> targets = parse_items(opt.items, ctx.scale);
  if (opt.depression) targets.push_back(0);

  std::exception_ptr first_failure;
  for (int k : targets) {
    run_target(out, k, ctx.scale, first_failure, [&] {
      train::TrainedItemModel r = train::random_search(ctx.spec, k, ctx.corpus, ctx.cfg);
      save_trained(ctx, r, item_checkpoint_path(opt.out_dir, k),
                   item_log_path(opt.out_dir, k));
      report_trained(out, ctx.scale, r, true);
    });
  }
  if (first_failure) std::rethrow_exception(first_failure);
}

void cmd_evaluate(const EvaluateOptions& opt, std::ostream& out) {
  const corpus::ScaleDefinition scale = corpus::scale_by_name(opt.scale);
  const corpus::Manifest manifest = corpus::parse_manifest(opt.manifest, scale);

  const std::string multi_path = (fs::path(opt.checkpoint_dir) / "multitask.ivck").string();
  const bool multitask = fs::exists(multi_path);
  if (!multitask) {
    for (int k = 1; k <= scale.n_items(); ++k) {
      if (!fs::exists(item_checkpoint_path(opt.checkpoint_dir, k))) {
        raise(ErrorKind::MissingCheckpoint,
              "no checkpoint for item " + std::to_string(k) + " under " + opt.checkpoint_dir);
      }
    }
  }

  const nn::Checkpoint probe = nn::load_checkpoint(
      multitask ? multi_path : item_checkpoint_path(opt.checkpoint_dir, 1));
  const nn::ModelSpec probe_spec = nn::ModelSpec::from_json(probe.meta.at("model"));

  const data::FeatureSource source{opt.manifest, opt.cache_dir, opt.functionals};
  const data::Corpus corpus =
      data::build_corpus(manifest, probe_spec.kind, source, stft_with_window(opt.window),
                         opt.drop_last, opt.egemaps_dim, opt.standardize);
  const std::vector<std::size_t> recs = corpus.split_recordings(opt.split);
  if (recs.empty()) raise(ErrorKind::EmptySplit, "no recordings in split '" + opt.split + "'");

  std::optional<nn::Model> shared;
  if (multitask) shared.emplace(nn::Model::from_checkpoint(probe));

  eval::EvalReport report;
  report.scale_name = scale.name;
  report.split = opt.split;

  std::vector<std::vector<vote::ItemDecision>> hard_dec(recs.size()), soft_dec(recs.size());

  for (int k = 1; k <= scale.n_items(); ++k) {
    std::optional<nn::Model> own;
    if (!multitask) {
      own.emplace(nn::Model::from_checkpoint(
          nn::load_checkpoint(item_checkpoint_path(opt.checkpoint_dir, k))));
    }
    nn::Model& model = multitask ? *shared : *own;
    const int head = multitask ? k - 1 : 0;

    std::vector<bool> hard_preds, soft_preds, labels;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto grid = train::recording_grid(model, corpus, recs[i], k, head);
      const vote::ItemDecision hd = vote::hard_vote(grid);
      const vote::ItemDecision sd = vote::soft_vote(grid);
      hard_preds.push_back(hd.present);
      soft_preds.push_back(sd.present);
      hard_dec[i].push_back(hd);
      soft_dec[i].push_back(sd);
      labels.push_back(data::unit_target(corpus, {recs[i], 0}, k) == 1);
    }
    report.rows.push_back({k, scale.item_name(k), eval::f_scores(hard_preds, labels),
                           eval::f_scores(soft_preds, labels)});
  }

  std::string dep_mode = opt.depression_from;
  const std::string dep_path = item_checkpoint_path(opt.checkpoint_dir, 0);
  if (dep_mode == "auto") dep_mode = fs::exists(dep_path) ? "model" : "combine";

  if (dep_mode == "model" || dep_mode == "combine") {
    std::vector<bool> hard_preds, soft_preds, labels;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      labels.push_back(data::unit_target(corpus, {recs[i], 0}, 0) == 1);
    }
    if (dep_mode == "model") {
      nn::Model model = nn::Model::from_checkpoint(nn::load_checkpoint(dep_path));
      for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto grid = train::recording_grid(model, corpus, recs[i], 0, 0);
        hard_preds.push_back(vote::hard_vote(grid).present);
        soft_preds.push_back(vote::soft_vote(grid).present);
      }
    } else {
      const int k0 = opt.combine_k > 0 ? opt.combine_k : (scale.n_items() + 1) / 2;
      const vote::CombineRule rule = vote::combine_rule_by_name(opt.combine, k0);
      for (std::size_t i = 0; i < recs.size(); ++i) {
        hard_preds.push_back(vote::combine_items(hard_dec[i], rule, scale.n_items()));
        soft_preds.push_back(vote::combine_items(soft_dec[i], rule, scale.n_items()));
      }
    }
    report.rows.push_back({0, "Depression Detection", eval::f_scores(hard_preds, labels),
                           eval::f_scores(soft_preds, labels)});
  } else if (dep_mode != "none") {
    raise(ErrorKind::BadConfig,
          "--depression-from must be auto, model, combine or none, got '" + dep_mode + "'");
  }

  if (opt.out_csv.empty()) {
    out << eval::report_csv_string(report);
  } else {
    eval::write_report_csv(opt.out_csv, report);
    for (const eval::ReportRow& row : report.rows) {
      out << "(" << row.item_index << ") " << row.item_name
          << " hard=" << eval::wap_cell(row.hard) << " soft=" << eval::wap_cell(row.soft)
          << "\n";
    }
    out << "wrote " << opt.out_csv << "\n";
  }
}

void cmd_predict(const PredictOptions& opt, std::ostream& out) {
  LoadedModel lm = load_model(opt.checkpoint, opt.head);
  const data::Corpus corpus = predict_input(
      lm.model->spec().kind, opt.wav, opt.functionals, opt.recording_id,
      stft_with_window(opt.window), opt.drop_last, opt.standardize, opt.egemaps_dim);
  const auto grid = train::recording_grid(*lm.model, corpus, 0,
                                          std::max(lm.item_index, 0), opt.head);
  const std::string json = vote::timeline_json(grid, lm.item_name);
  if (opt.out_json.empty()) {
    out << json;
  } else {
    std::ofstream f(opt.out_json, std::ios::binary);
    if (!f) raise(ErrorKind::IoError, "cannot write " + opt.out_json);
    f << json;
    out << "wrote " << opt.out_json << "\n";
  }
}

void cmd_timeline(const TimelineOptions& opt, std::ostream& out) {
  if (opt.out_prefix.empty()) raise(ErrorKind::BadConfig, "timeline needs --out");
  LoadedModel lm = load_model(opt.checkpoint, opt.head);
  const data::Corpus corpus = predict_input(
      lm.model->spec().kind, opt.wav, opt.functionals, opt.recording_id,
      stft_with_window(opt.window), opt.drop_last, opt.standardize, opt.egemaps_dim);
  const auto grid = train::recording_grid(*lm.model, corpus, 0,
                                          std::max(lm.item_index, 0), opt.head);
  const std::string json_path = opt.out_prefix + ".json";
  const std::string svg_path = opt.out_prefix + ".svg";
  vote::write_timeline(grid, lm.item_name, json_path, svg_path);
  const vote::ItemDecision hd = vote::hard_vote(grid);
  const vote::ItemDecision sd = vote::soft_vote(grid);
  out << grid.recording_id << " " << lm.item_name << ": segments="
      << grid.geometry.n_segments << " hard=" << (hd.present ? "present" : "absent")
      << " soft=" << (sd.present ? "present" : "absent") << " p=" << f4(sd.aggregate_present_prob)
      << "\n";
  out << "wrote " << json_path << " " << svg_path << "\n";
}

void cmd_synth(const SynthOptions& opt, std::ostream& out) {
  synth::SynthConfig cfg;
  cfg.out_dir = opt.out_dir;
  cfg.scale_name = opt.scale;
  cfg.n_speakers = opt.n_speakers;
  cfg.n_train = opt.n_train;
  cfg.n_val = opt.n_val;
  cfg.n_test = opt.n_test;
  cfg.duration_s = opt.duration_s;
  cfg.seed = effective_seed(opt.seed);
  cfg.write_functionals = opt.functionals;
  const synth::SynthSummary s = synth::generate_corpus(cfg);
  out << "wrote " << s.n_recordings << " recordings (" << s.n_depressed
      << " depressed) under " << opt.out_dir << "\n";
  out << "manifest=" << s.manifest_path << "\n";
  if (!s.functionals_path.empty()) out << "functionals=" << s.functionals_path << "\n";
}

}  // namespace itemvoice::cli
