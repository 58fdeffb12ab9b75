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

#ifndef ITEMVOICE_TESTS_SUPPORT_HPP_
#define ITEMVOICE_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "itemvoice/error.hpp"
#include "itemvoice/graph.hpp"
#include "itemvoice/rng.hpp"
#include "itemvoice/tensor.hpp"

namespace testsupport {

inline std::filesystem::path unique_temp_dir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  const std::filesystem::path p =
      std::filesystem::temp_directory_path() /
      ("itemvoice_" + tag + "_" + std::to_string(stamp) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(p);
  return p;
}

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) : path_(unique_temp_dir(tag)) {}
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

// Captured outcome of a call expected to raise itemvoice::Error.
struct Raised {
  bool raised = false;
  itemvoice::ErrorKind kind{};
  std::string message;
};

template <typename Fn>
Raised capture(Fn&& fn) {
  try {
    fn();
  } catch (const itemvoice::Error& e) {
    return {true, e.kind(), e.what()};
  }
  return {};
}

inline itemvoice::nn::Tensor random_tensor(std::vector<std::int64_t> shape,
                                           itemvoice::Rng& rng, double lo = -1.0,
                                           double hi = 1.0) {
  itemvoice::nn::Tensor t = itemvoice::nn::Tensor::zeros(std::move(shape));
  for (double& x : t.data) x = rng.uniform(lo, hi);
  return t;
}

// Pushes tiny magnitudes away from zero so ReLU kinks stay clear of the
// finite-difference probes.
inline void keep_off_kinks(itemvoice::nn::Tensor& t, double margin = 0.05) {
  for (double& x : t.data) {
    if (std::fabs(x) < margin) x += x < 0.0 ? -margin : margin;
  }
}

// Deliberately naive convolution reference: triple loops, no padding tricks.
inline itemvoice::nn::Tensor conv2d_oracle(const itemvoice::nn::Tensor& x,
                                           const itemvoice::nn::Tensor& w,
                                           const itemvoice::nn::Tensor& b, std::int64_t sh,
                                           std::int64_t sw, std::int64_t ph,
                                           std::int64_t pw) {
  const std::int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::int64_t o = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const std::int64_t ho = (h + 2 * ph - kh) / sh + 1;
  const std::int64_t wo = (wd + 2 * pw - kw) / sw + 1;
  itemvoice::nn::Tensor out = itemvoice::nn::Tensor::zeros({n, o, ho, wo});
  for (std::int64_t ni = 0; ni < n; ++ni) {
    for (std::int64_t oi = 0; oi < o; ++oi) {
      for (std::int64_t oh = 0; oh < ho; ++oh) {
        for (std::int64_t ow = 0; ow < wo; ++ow) {
          double acc = b(oi);
          for (std::int64_t ci = 0; ci < c; ++ci) {
            for (std::int64_t i = 0; i < kh; ++i) {
              for (std::int64_t j = 0; j < kw; ++j) {
                const std::int64_t ih = oh * sh - ph + i;
                const std::int64_t iw = ow * sw - pw + j;
                if (ih >= 0 && ih < h && iw >= 0 && iw < wd) {
                  acc += x(ni, ci, ih, iw) * w(oi, ci, i, j);
                }
              }
            }
          }
          out(ni, oi, oh, ow) = acc;
        }
      }
    }
  }
  return out;
}

// Rebuilds the graph on every call; any randomness must be reseeded inside
// the builder so repeated evaluations see the identical computation.
using LossBuilder = std::function<itemvoice::nn::Var(
    itemvoice::nn::Graph&, const std::vector<itemvoice::nn::Var>&)>;

// Central finite differences against the tape gradients of every leaf.
// Relative error uses max(1e-3, |fd|, |analytic|) as the denominator.
inline double max_rel_grad_err(const LossBuilder& builder,
                               std::vector<itemvoice::nn::Tensor> inputs, double h = 1e-5,
                               bool training = true) {
  using itemvoice::nn::Graph;
  using itemvoice::nn::Tensor;
  using itemvoice::nn::Var;

  Graph g(training);
  std::vector<Var> leaves;
  leaves.reserve(inputs.size());
  for (const Tensor& t : inputs) leaves.push_back(g.input(t, true));
  const Var loss = builder(g, leaves);
  g.backward(loss);
  std::vector<Tensor> analytic;
  analytic.reserve(leaves.size());
  for (Var v : leaves) analytic.push_back(g.grad(v));

  const auto eval = [&](const std::vector<Tensor>& xs) {
    Graph g2(training);
    std::vector<Var> ls;
    ls.reserve(xs.size());
    for (const Tensor& t : xs) ls.push_back(g2.input(t, false));
    return g2.value(builder(g2, ls))(0);
  };

  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t j = 0; j < inputs[i].data.size(); ++j) {
      const double keep = inputs[i].data[j];
      inputs[i].data[j] = keep + h;
      const double up = eval(inputs);
      inputs[i].data[j] = keep - h;
      const double down = eval(inputs);
      inputs[i].data[j] = keep;
      const double fd = (up - down) / (2.0 * h);
      const double an = analytic[i].data[j];
      const double denom = std::max({1e-3, std::fabs(fd), std::fabs(an)});
      worst = std::max(worst, std::fabs(fd - an) / denom);
    }
  }
  return worst;
}

}  // namespace testsupport

#endif  // ITEMVOICE_TESTS_SUPPORT_HPP_
