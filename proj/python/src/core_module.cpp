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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "itemvoice/dataset.hpp"
#include "itemvoice/dsp.hpp"
#include "itemvoice/error.hpp"
#include "itemvoice/metrics.hpp"
#include "itemvoice/model.hpp"
#include "itemvoice/scale.hpp"
#include "itemvoice/segmentation.hpp"
#include "itemvoice/synth.hpp"
#include "itemvoice/timeline.hpp"
#include "itemvoice/train.hpp"
#include "itemvoice/vote.hpp"
#include "itemvoice/wav.hpp"

namespace py = pybind11;

namespace {

using itemvoice::Error;
using itemvoice::ErrorKind;

using ProbArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

itemvoice::vote::SegmentProbabilityGrid grid_from_probs(const ProbArray& probs,
                                                        double span_s) {
  if (probs.ndim() != 2 || probs.shape(1) != 2) {
    itemvoice::raise(ErrorKind::ShapeMismatch, "probs must have shape [n_segments, 2]");
  }
  const auto view = probs.unchecked<2>();
  itemvoice::vote::SegmentProbabilityGrid grid;
  grid.geometry.segment_span_s = span_s;
  grid.geometry.n_segments = view.shape(0);
  grid.geometry.recording_duration_s = span_s + static_cast<double>(view.shape(0) - 1);
  for (py::ssize_t i = 0; i < view.shape(0); ++i) {
    grid.probs.push_back({view(i, 0), view(i, 1)});
  }
  return grid;
}

py::dict decision_dict(const itemvoice::vote::ItemDecision& d) {
  py::dict out;
  out["present"] = d.present;
  out["aggregate_present_prob"] = d.aggregate_present_prob;
  return out;
}

py::dict f_dict(const itemvoice::eval::FScores& f) {
  py::dict out;
  out["weighted_f"] = f.weighted_f;
  out["f_absent"] = f.f_absent;
  out["f_present"] = f.f_present;
  out["support_absent"] = f.support_absent;
  out["support_present"] = f.support_present;
  return out;
}

py::array_t<double> tensor_to_array(const itemvoice::nn::Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
  py::array_t<double> out(shape);
  std::copy(t.data.begin(), t.data.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Speech-based per-item depression assessment: core operations";
  m.attr("__version__") = "0.1.0";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (itemvoice::is_validation_error(e.kind())) {
        PyErr_SetString(PyExc_ValueError, e.what());
      } else {
        PyErr_SetString(PyExc_RuntimeError, e.what());
      }
    }
  });

  m.def(
      "scale_items",
      [](const std::string& name) {
        std::vector<std::string> items;
        for (const auto& it : itemvoice::corpus::scale_by_name(name).items) {
          items.push_back(it.name);
        }
        return items;
      },
      py::arg("scale"), "Ordered item names of a rating scale (madrs or phq8).");

  m.def(
      "load_wav",
      [](const std::string& path, int expected_rate_hz) {
        const itemvoice::io::Recording rec = itemvoice::io::load_wav(path, expected_rate_hz);
        py::array_t<double> samples(static_cast<py::ssize_t>(rec.samples.size()));
        std::copy(rec.samples.begin(), rec.samples.end(), samples.mutable_data());
        return py::make_tuple(samples, rec.sample_rate_hz);
      },
      py::arg("path"), py::arg("expected_rate_hz") = 16000,
      "Mono PCM16 WAV as (samples in [-1, 1), sample_rate_hz).");

  m.def(
      "log_mel",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& samples,
         int sample_rate_hz, const std::string& window) {
        itemvoice::dsp::StftConfig cfg;
        cfg.sample_rate_hz = sample_rate_hz;
        cfg.window = itemvoice::dsp::window_by_name(window);
        const auto bank =
            itemvoice::dsp::build_mel_filterbank(cfg.sample_rate_hz, cfg.fft_size, 64);
        const std::vector<double> x(samples.data(), samples.data() + samples.size());
        return tensor_to_array(itemvoice::dsp::compute_log_mel(x, cfg, bank, "py").values);
      },
      py::arg("samples"), py::arg("sample_rate_hz") = 16000, py::arg("window") = "hann",
      "[n_frames, 64] natural-log mel spectrogram (20 ms frames, 20 ms hop).");

  m.def(
      "segment_count",
      [](double duration_s, bool drop_last) {
        return itemvoice::seg::grid_geometry(duration_s, drop_last).n_segments;
      },
      py::arg("duration_s"), py::arg("drop_last") = false,
      "Number of 13 s segments on the 1 s grid.");

  m.def("cnn_window_count", &itemvoice::seg::cnn_window_count, py::arg("duration_s"),
        "Number of 4 s windows on the 1 s grid.");

  m.def(
      "hard_vote",
      [](const ProbArray& probs) {
        return decision_dict(itemvoice::vote::hard_vote(grid_from_probs(probs, 13.0)));
      },
      py::arg("probs"), "Majority of per-segment argmax votes; ties predict present.");

  m.def(
      "soft_vote",
      [](const ProbArray& probs) {
        return decision_dict(itemvoice::vote::soft_vote(grid_from_probs(probs, 13.0)));
      },
      py::arg("probs"), "Mean-probability vote; present at mean >= 0.5.");

  m.def(
      "f_scores",
      [](const std::vector<bool>& predictions, const std::vector<bool>& labels) {
        return f_dict(itemvoice::eval::f_scores(predictions, labels));
      },
      py::arg("predictions"), py::arg("labels"),
      "Weighted/absent/present F-scores with class supports.");

  m.def("ramp_color", &itemvoice::vote::ramp_color, py::arg("p"),
        "Timeline color ramp sample as #rrggbb.");

  m.def(
      "predict_wav",
      [](const std::string& checkpoint, const std::string& wav, bool drop_last) {
        const itemvoice::nn::Checkpoint ckpt = itemvoice::nn::load_checkpoint(checkpoint);
        itemvoice::nn::Model model = itemvoice::nn::Model::from_checkpoint(ckpt);
        itemvoice::dsp::StftConfig stft;
        const auto corpus = itemvoice::data::predict_corpus(
            model.spec().kind, itemvoice::io::load_wav(wav, stft.sample_rate_hz), stft,
            drop_last, false);
        const int item = std::max(ckpt.meta.value("item_index", 0), 0);
        const auto grid = itemvoice::train::recording_grid(model, corpus, 0, item, 0);
        py::array_t<double> probs({static_cast<py::ssize_t>(grid.probs.size()),
                                   static_cast<py::ssize_t>(2)});
        auto view = probs.mutable_unchecked<2>();
        for (std::size_t i = 0; i < grid.probs.size(); ++i) {
          view(static_cast<py::ssize_t>(i), 0) = grid.probs[i][0];
          view(static_cast<py::ssize_t>(i), 1) = grid.probs[i][1];
        }
        py::dict out;
        out["item_index"] = grid.item_index;
        out["probs"] = probs;
        out["hard"] = decision_dict(itemvoice::vote::hard_vote(grid));
        out["soft"] = decision_dict(itemvoice::vote::soft_vote(grid));
        return out;
      },
      py::arg("checkpoint"), py::arg("wav"), py::arg("drop_last") = false,
      "Segment probabilities and both voting decisions for one recording.");

  m.def(
      "generate_synth_corpus",
      [](const std::string& out_dir, int n_speakers, double duration_s, std::uint64_t seed,
         const std::string& scale, bool functionals, int n_train, int n_val, int n_test) {
        itemvoice::synth::SynthConfig cfg;
        cfg.out_dir = out_dir;
        cfg.n_speakers = n_speakers;
        cfg.duration_s = duration_s;
        cfg.seed = seed;
        cfg.scale_name = scale;
        cfg.write_functionals = functionals;
        cfg.n_train = n_train;
        cfg.n_val = n_val;
        cfg.n_test = n_test;
        const auto s = itemvoice::synth::generate_corpus(cfg);
        py::dict out;
        out["manifest"] = s.manifest_path;
        out["functionals"] = s.functionals_path;
        out["n_recordings"] = s.n_recordings;
        out["n_depressed"] = s.n_depressed;
        return out;
      },
      py::arg("out_dir"), py::arg("n_speakers") = 40, py::arg("duration_s") = 20.0,
      py::arg("seed") = 0, py::arg("scale") = "madrs", py::arg("functionals") = false,
      py::arg("n_train") = 24, py::arg("n_val") = 8, py::arg("n_test") = 8,
      "Two-class synthetic corpus; returns the written paths.");

  m.def(
      "adam_defaults",
      [] {
        const itemvoice::nn::AdamConfig cfg;
        py::dict out;
        out["lr"] = cfg.lr;
        out["beta1"] = cfg.beta1;
        out["beta2"] = cfg.beta2;
        out["eps"] = cfg.eps;
        out["weight_decay"] = cfg.weight_decay;
        return out;
      },
      "Default optimizer constants.");
}
