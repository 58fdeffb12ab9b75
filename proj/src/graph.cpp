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

#include "itemvoice/graph.hpp"

#include <cmath>
#include <cstring>
#include <utility>

#include "itemvoice/error.hpp"
#include "itemvoice/gemm.hpp"

namespace itemvoice::nn {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct ConvDims {
  std::int64_t n, c, h, w;        // input
  std::int64_t o, kh, kw;         // kernel
  std::int64_t sh, sw, ph, pw;    // stride / padding
  std::int64_t oh, ow;            // output
  std::int64_t kdim() const { return c * kh * kw; }
  std::int64_t pos() const { return oh * ow; }
};

// col: [C*kH*kW, oH*oW] patch matrix for one image.
void im2col(const double* x, const ConvDims& d, double* col) {
  const std::int64_t pos = d.pos();
  std::int64_t row = 0;
  for (std::int64_t c = 0; c < d.c; ++c) {
    const double* xc = x + c * d.h * d.w;
    for (std::int64_t i = 0; i < d.kh; ++i) {
      for (std::int64_t j = 0; j < d.kw; ++j, ++row) {
        double* crow = col + row * pos;
        for (std::int64_t a = 0; a < d.oh; ++a) {
          const std::int64_t ih = a * d.sh + i - d.ph;
          double* cdst = crow + a * d.ow;
          if (ih < 0 || ih >= d.h) {
            std::memset(cdst, 0, sizeof(double) * static_cast<std::size_t>(d.ow));
            continue;
          }
          const double* xrow = xc + ih * d.w;
          for (std::int64_t b = 0; b < d.ow; ++b) {
            const std::int64_t iw = b * d.sw + j - d.pw;
            cdst[b] = (iw >= 0 && iw < d.w) ? xrow[iw] : 0.0;
          }
        }
      }
    }
  }
}

void col2im_add(const double* col, const ConvDims& d, double* dx) {
  const std::int64_t pos = d.pos();
  std::int64_t row = 0;
  for (std::int64_t c = 0; c < d.c; ++c) {
    double* xc = dx + c * d.h * d.w;
    for (std::int64_t i = 0; i < d.kh; ++i) {
      for (std::int64_t j = 0; j < d.kw; ++j, ++row) {
        const double* crow = col + row * pos;
        for (std::int64_t a = 0; a < d.oh; ++a) {
          const std::int64_t ih = a * d.sh + i - d.ph;
          if (ih < 0 || ih >= d.h) continue;
          double* xrow = xc + ih * d.w;
          const double* csrc = crow + a * d.ow;
          for (std::int64_t b = 0; b < d.ow; ++b) {
            const std::int64_t iw = b * d.sw + j - d.pw;
            if (iw >= 0 && iw < d.w) xrow[iw] += csrc[b];
          }
        }
      }
    }
  }
}

}  // namespace

Parameter::Parameter(std::string name_in, Tensor value_in)
    : name(std::move(name_in)),
      value(std::move(value_in)),
      grad(Tensor::zeros(value.shape)) {}

void Parameter::zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }

Var Graph::push(Tensor value, bool requires_grad) {
  Node nd;
  nd.value = std::move(value);
  nd.requires_grad = requires_grad;
  nodes_.push_back(std::move(nd));
  return Var{static_cast<std::int32_t>(nodes_.size()) - 1};
}

Var Graph::input(Tensor value, bool requires_grad) {
  return push(std::move(value), requires_grad);
}

Var Graph::param(Parameter& p) {
  Var v = push(p.value, true);
  node(v).bound = &p;
  return v;
}

const Tensor& Graph::value(Var v) const { return node(v).value; }

const Tensor& Graph::grad(Var v) {
  Node& nd = node(v);
  if (!nd.grad_alloc) {
    nd.grad = Tensor::zeros(nd.value.shape);
    nd.grad_alloc = true;
  }
  return nd.grad;
}

double* Graph::grad_sink(Var v) {
  Node& nd = node(v);
  if (!nd.requires_grad) return nullptr;
  if (!nd.grad_alloc) {
    nd.grad = Tensor::zeros(nd.value.shape);
    nd.grad_alloc = true;
  }
  return nd.grad.data.data();
}

void Graph::check_2d(Var v, const char* op) const {
  if (node(v).value.ndim() != 2) {
    raise(ErrorKind::ShapeMismatch,
          std::string(op) + " expects a 2-D tensor, got " + node(v).value.shape_str());
  }
}

void Graph::backward(Var loss) {
  if (!loss.valid() || node(loss).value.numel() != 1) {
    raise(ErrorKind::ShapeMismatch, "backward requires a scalar loss");
  }
  if (!node(loss).requires_grad) return;  // nothing reachable to differentiate
  grad_sink(loss)[0] = 1.0;
  for (std::int32_t i = loss.id; i >= 0; --i) {
    Node& nd = nodes_[static_cast<std::size_t>(i)];
    if (!nd.requires_grad || !nd.grad_alloc) continue;
    if (nd.backprop) nd.backprop(*this);
    if (nd.bound) {
      double* acc = nd.bound->grad.data.data();
      const double* src = nd.grad.data.data();
      const std::int64_t n = nd.grad.numel();
      for (std::int64_t k = 0; k < n; ++k) acc[k] += src[k];
    }
  }
}

// ---------------------------------------------------------------------------

Var Graph::conv2d(Var x, Var w, Var b, std::int64_t stride_h, std::int64_t stride_w,
                  std::int64_t pad_h, std::int64_t pad_w) {
  const Tensor& xv = node(x).value;
  const Tensor& wv = node(w).value;
  const Tensor& bv = node(b).value;
  if (xv.ndim() != 4 || wv.ndim() != 4) {
    raise(ErrorKind::ShapeMismatch, "conv2d expects 4-D input and kernel");
  }
  ConvDims d;
  d.n = xv.dim(0); d.c = xv.dim(1); d.h = xv.dim(2); d.w = xv.dim(3);
  d.o = wv.dim(0); d.kh = wv.dim(2); d.kw = wv.dim(3);
  d.sh = stride_h; d.sw = stride_w; d.ph = pad_h; d.pw = pad_w;
  if (wv.dim(1) != d.c) {
    raise(ErrorKind::ShapeMismatch, "conv2d channel mismatch: input " + xv.shape_str() +
                                        " vs kernel " + wv.shape_str());
  }
  if (bv.ndim() != 1 || bv.dim(0) != d.o) {
    raise(ErrorKind::ShapeMismatch, "conv2d bias must be [O]");
  }
  if (d.kh > d.h + 2 * d.ph || d.kw > d.w + 2 * d.pw) {
    raise(ErrorKind::ShapeMismatch, "conv2d kernel larger than padded input");
  }
  d.oh = (d.h + 2 * d.ph - d.kh) / d.sh + 1;
  d.ow = (d.w + 2 * d.pw - d.kw) / d.sw + 1;

  const std::int64_t kdim = d.kdim();
  const std::int64_t pos = d.pos();
  Tensor y = Tensor::zeros({d.n, d.o, d.oh, d.ow});
  std::vector<double> col(static_cast<std::size_t>(kdim * pos));
  for (std::int64_t n = 0; n < d.n; ++n) {
    im2col(xv.data.data() + n * d.c * d.h * d.w, d, col.data());
    double* yn = y.data.data() + n * d.o * pos;
    gemm_nn(d.o, pos, kdim, wv.data.data(), col.data(), yn);
    for (std::int64_t o = 0; o < d.o; ++o) {
      const double bias = bv.data[static_cast<std::size_t>(o)];
      double* yrow = yn + o * pos;
      for (std::int64_t p = 0; p < pos; ++p) yrow[p] += bias;
    }
  }

  const bool req = needs_grad(x) || needs_grad(w) || needs_grad(b);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x, w, b, d](Graph& g) {
      const Tensor& dy = g.node(out).grad;
      const Tensor& xv2 = g.value(x);
      const Tensor& wv2 = g.value(w);
      double* dx = g.grad_sink(x);
      double* dw = g.grad_sink(w);
      double* db = g.grad_sink(b);
      const std::int64_t kdim = d.kdim();
      const std::int64_t pos = d.pos();
      std::vector<double> col((dw || dx) ? static_cast<std::size_t>(kdim * pos) : 0);
      std::vector<double> dcol(dx ? static_cast<std::size_t>(kdim * pos) : 0);
      for (std::int64_t n = 0; n < d.n; ++n) {
        const double* dyn = dy.data.data() + n * d.o * pos;
        if (dw) {
          im2col(xv2.data.data() + n * d.c * d.h * d.w, d, col.data());
          gemm_nt(d.o, kdim, pos, dyn, col.data(), dw);
        }
        if (dx) {
          std::fill(dcol.begin(), dcol.end(), 0.0);
          gemm_tn(kdim, pos, d.o, wv2.data.data(), dyn, dcol.data());
          col2im_add(dcol.data(), d, dx + n * d.c * d.h * d.w);
        }
        if (db) {
          for (std::int64_t o = 0; o < d.o; ++o) {
            const double* dyrow = dyn + o * pos;
            double acc = 0.0;
            for (std::int64_t p = 0; p < pos; ++p) acc += dyrow[p];
            db[o] += acc;
          }
        }
      }
    };
  }
  return out;
}

Var Graph::relu(Var x) {
  Tensor y = node(x).value;
  for (double& v : y.data) {
    if (v < 0.0) v = 0.0;
  }
  const bool req = needs_grad(x);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x](Graph& g) {
      double* dx = g.grad_sink(x);
      if (!dx) return;
      const Tensor& dy = g.node(out).grad;
      const Tensor& yv = g.node(out).value;
      const std::int64_t n = yv.numel();
      for (std::int64_t i = 0; i < n; ++i) {
        if (yv.data[static_cast<std::size_t>(i)] > 0.0) dx[i] += dy.data[static_cast<std::size_t>(i)];
      }
    };
  }
  return out;
}

Var Graph::linear(Var x, Var w, Var b) {
  check_2d(x, "linear");
  check_2d(w, "linear weight");
  const Tensor& xv = node(x).value;
  const Tensor& wv = node(w).value;
  const Tensor& bv = node(b).value;
  const std::int64_t n = xv.dim(0), in = xv.dim(1), outw = wv.dim(0);
  if (wv.dim(1) != in || bv.ndim() != 1 || bv.dim(0) != outw) {
    raise(ErrorKind::ShapeMismatch, "linear shapes: x " + xv.shape_str() + ", w " +
                                        wv.shape_str() + ", b " + bv.shape_str());
  }
  Tensor y = Tensor::zeros({n, outw});
  gemm_nt(n, outw, in, xv.data.data(), wv.data.data(), y.data.data());
  for (std::int64_t i = 0; i < n; ++i) {
    double* yrow = y.data.data() + i * outw;
    for (std::int64_t j = 0; j < outw; ++j) yrow[j] += bv.data[static_cast<std::size_t>(j)];
  }
  const bool req = needs_grad(x) || needs_grad(w) || needs_grad(b);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x, w, b, n, in, outw](Graph& g) {
      const Tensor& dy = g.node(out).grad;
      double* dx = g.grad_sink(x);
      double* dw = g.grad_sink(w);
      double* db = g.grad_sink(b);
      if (dx) gemm_nn(n, in, outw, dy.data.data(), g.value(w).data.data(), dx);
      if (dw) gemm_tn(outw, in, n, dy.data.data(), g.value(x).data.data(), dw);
      if (db) {
        for (std::int64_t i = 0; i < n; ++i) {
          const double* dyrow = dy.data.data() + i * outw;
          for (std::int64_t j = 0; j < outw; ++j) db[j] += dyrow[j];
        }
      }
    };
  }
  return out;
}

Var Graph::concat(const std::vector<Var>& xs) {
  if (xs.empty()) raise(ErrorKind::ShapeMismatch, "concat of zero tensors");
  const std::int64_t n = node(xs[0]).value.dim(0);
  std::int64_t total = 0;
  bool req = false;
  for (Var v : xs) {
    check_2d(v, "concat");
    if (node(v).value.dim(0) != n) {
      raise(ErrorKind::ShapeMismatch, "concat row-count mismatch");
    }
    total += node(v).value.dim(1);
    req = req || needs_grad(v);
  }
  Tensor y = Tensor::zeros({n, total});
  std::int64_t off = 0;
  for (Var v : xs) {
    const Tensor& xv = node(v).value;
    const std::int64_t w = xv.dim(1);
    for (std::int64_t i = 0; i < n; ++i) {
      std::memcpy(y.data.data() + i * total + off, xv.data.data() + i * w,
                  sizeof(double) * static_cast<std::size_t>(w));
    }
    off += w;
  }
  Var out = push(std::move(y), req);
  if (req) {
    std::vector<Var> inputs = xs;
    node(out).backprop = [out, inputs, n, total](Graph& g) {
      const Tensor& dy = g.node(out).grad;
      std::int64_t off2 = 0;
      for (Var v : inputs) {
        const std::int64_t w = g.value(v).dim(1);
        if (double* dx = g.grad_sink(v)) {
          for (std::int64_t i = 0; i < n; ++i) {
            const double* src = dy.data.data() + i * total + off2;
            double* dst = dx + i * w;
            for (std::int64_t j = 0; j < w; ++j) dst[j] += src[j];
          }
        }
        off2 += w;
      }
    };
  }
  return out;
}

Var Graph::flatten(Var x) {
  const Tensor& xv = node(x).value;
  if (xv.ndim() != 4) raise(ErrorKind::ShapeMismatch, "flatten expects a 4-D tensor");
  Tensor y({xv.dim(0), xv.dim(1) * xv.dim(2) * xv.dim(3)}, xv.data);
  const bool req = needs_grad(x);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x](Graph& g) {
      if (double* dx = g.grad_sink(x)) {
        const Tensor& dy = g.node(out).grad;
        const std::int64_t n = dy.numel();
        for (std::int64_t i = 0; i < n; ++i) dx[i] += dy.data[static_cast<std::size_t>(i)];
      }
    };
  }
  return out;
}

Var Graph::global_avg_pool(Var x) {
  const Tensor& xv = node(x).value;
  if (xv.ndim() != 4) raise(ErrorKind::ShapeMismatch, "global_avg_pool expects a 4-D tensor");
  const std::int64_t n = xv.dim(0), c = xv.dim(1), spatial = xv.dim(2) * xv.dim(3);
  Tensor y = Tensor::zeros({n, c});
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < c; ++j) {
      const double* src = xv.data.data() + (i * c + j) * spatial;
      double acc = 0.0;
      for (std::int64_t k = 0; k < spatial; ++k) acc += src[k];
      y(i, j) = acc / static_cast<double>(spatial);
    }
  }
  const bool req = needs_grad(x);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x, n, c, spatial](Graph& g) {
      if (double* dx = g.grad_sink(x)) {
        const Tensor& dy = g.node(out).grad;
        const double inv = 1.0 / static_cast<double>(spatial);
        for (std::int64_t i = 0; i < n; ++i) {
          for (std::int64_t j = 0; j < c; ++j) {
            const double gv = dy(i, j) * inv;
            double* dst = dx + (i * c + j) * spatial;
            for (std::int64_t k = 0; k < spatial; ++k) dst[k] += gv;
          }
        }
      }
    };
  }
  return out;
}

Var Graph::dropout(Var x, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    raise(ErrorKind::InvalidRate, "dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (!training_ || rate == 0.0) return x;
  const Tensor& xv = node(x).value;
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor mask = Tensor::zeros(xv.shape);
  for (double& m : mask.data) m = rng.uniform() >= rate ? keep_scale : 0.0;
  Tensor y = xv;
  for (std::int64_t i = 0; i < y.numel(); ++i) {
    y.data[static_cast<std::size_t>(i)] *= mask.data[static_cast<std::size_t>(i)];
  }
  const bool req = needs_grad(x);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x, mask = std::move(mask)](Graph& g) {
      if (double* dx = g.grad_sink(x)) {
        const Tensor& dy = g.node(out).grad;
        const std::int64_t n = dy.numel();
        for (std::int64_t i = 0; i < n; ++i) {
          dx[i] += dy.data[static_cast<std::size_t>(i)] * mask.data[static_cast<std::size_t>(i)];
        }
      }
    };
  }
  return out;
}

namespace {

struct ChannelLayout {
  std::int64_t channels;
  std::int64_t outer;    // N
  std::int64_t inner;    // H*W for 4-D, 1 for 2-D
  std::int64_t per_channel() const { return outer * inner; }
};

ChannelLayout channel_layout(const Tensor& x) {
  if (x.ndim() == 2) return {x.dim(1), x.dim(0), 1};
  if (x.ndim() == 4) return {x.dim(1), x.dim(0), x.dim(2) * x.dim(3)};
  raise(ErrorKind::ShapeMismatch, "batch_norm expects a 2-D or 4-D tensor");
}

// Walk all elements of channel c; f(index).
template <typename F>
void for_channel(const ChannelLayout& l, std::int64_t c, F&& f) {
  for (std::int64_t n = 0; n < l.outer; ++n) {
    const std::int64_t base = (n * l.channels + c) * l.inner;
    for (std::int64_t k = 0; k < l.inner; ++k) f(base + k);
  }
}

}  // namespace

Var Graph::batch_norm(Var x, Var gamma, Var beta, BatchNormState& state,
                      double momentum, double eps) {
  const Tensor& xv = node(x).value;
  const ChannelLayout layout = channel_layout(xv);
  const std::int64_t c = layout.channels;
  const Tensor& gv = node(gamma).value;
  const Tensor& bv = node(beta).value;
  if (gv.numel() != c || bv.numel() != c || state.running_mean.numel() != c ||
      state.running_var.numel() != c) {
    raise(ErrorKind::ShapeMismatch, "batch_norm parameter length must equal channel count");
  }

  std::vector<double> mean(static_cast<std::size_t>(c)), invstd(static_cast<std::size_t>(c));
  const double m = static_cast<double>(layout.per_channel());
  if (training_) {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      double sum = 0.0;
      for_channel(layout, ch, [&](std::int64_t i) { sum += xv.data[static_cast<std::size_t>(i)]; });
      const double mu = sum / m;
      double var = 0.0;
      for_channel(layout, ch, [&](std::int64_t i) {
        const double d = xv.data[static_cast<std::size_t>(i)] - mu;
        var += d * d;
      });
      var /= m;
      mean[static_cast<std::size_t>(ch)] = mu;
      invstd[static_cast<std::size_t>(ch)] = 1.0 / std::sqrt(var + eps);
      state.running_mean(ch) = (1.0 - momentum) * state.running_mean(ch) + momentum * mu;
      state.running_var(ch) = (1.0 - momentum) * state.running_var(ch) + momentum * var;
    }
  } else {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      mean[static_cast<std::size_t>(ch)] = state.running_mean(ch);
      invstd[static_cast<std::size_t>(ch)] = 1.0 / std::sqrt(state.running_var(ch) + eps);
    }
  }

  Tensor y = Tensor::zeros(xv.shape);
  for (std::int64_t ch = 0; ch < c; ++ch) {
    const double mu = mean[static_cast<std::size_t>(ch)];
    const double is = invstd[static_cast<std::size_t>(ch)];
    const double g = gv(ch), bb = bv(ch);
    for_channel(layout, ch, [&](std::int64_t i) {
      y.data[static_cast<std::size_t>(i)] =
          g * (xv.data[static_cast<std::size_t>(i)] - mu) * is + bb;
    });
  }

  const bool req = needs_grad(x) || needs_grad(gamma) || needs_grad(beta);
  const bool train_stats = training_;
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x, gamma, beta, layout, mean = std::move(mean),
                          invstd = std::move(invstd), train_stats](Graph& g) {
      const Tensor& dy = g.node(out).grad;
      const Tensor& xv2 = g.value(x);
      const Tensor& gv2 = g.value(gamma);
      double* dx = g.grad_sink(x);
      double* dg = g.grad_sink(gamma);
      double* db = g.grad_sink(beta);
      const double m2 = static_cast<double>(layout.per_channel());
      for (std::int64_t ch = 0; ch < layout.channels; ++ch) {
        const double mu = mean[static_cast<std::size_t>(ch)];
        const double is = invstd[static_cast<std::size_t>(ch)];
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for_channel(layout, ch, [&](std::int64_t i) {
          const double xhat = (xv2.data[static_cast<std::size_t>(i)] - mu) * is;
          const double d = dy.data[static_cast<std::size_t>(i)];
          sum_dy += d;
          sum_dy_xhat += d * xhat;
        });
        if (dg) dg[ch] += sum_dy_xhat;
        if (db) db[ch] += sum_dy;
        if (dx) {
          const double gch = gv2(ch);
          if (train_stats) {
            // dx = gamma*invstd/M * (M*dy - sum(dy) - xhat*sum(dy*xhat))
            const double k = gch * is / m2;
            for_channel(layout, ch, [&](std::int64_t i) {
              const double xhat = (xv2.data[static_cast<std::size_t>(i)] - mu) * is;
              dx[i] += k * (m2 * dy.data[static_cast<std::size_t>(i)] - sum_dy -
                            xhat * sum_dy_xhat);
            });
          } else {
            const double k = gch * is;
            for_channel(layout, ch, [&](std::int64_t i) {
              dx[i] += k * dy.data[static_cast<std::size_t>(i)];
            });
          }
        }
      }
    };
  }
  return out;
}

Var Graph::softmax(Var x) {
  check_2d(x, "softmax");
  const Tensor& xv = node(x).value;
  const std::int64_t n = xv.dim(0), k = xv.dim(1);
  Tensor y = Tensor::zeros({n, k});
  for (std::int64_t i = 0; i < n; ++i) {
    const double* row = xv.data.data() + i * k;
    double* yrow = y.data.data() + i * k;
    double mx = row[0];
    for (std::int64_t j = 1; j < k; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (std::int64_t j = 0; j < k; ++j) {
      yrow[j] = std::exp(row[j] - mx);
      sum += yrow[j];
    }
    for (std::int64_t j = 0; j < k; ++j) yrow[j] /= sum;
  }
  const bool req = needs_grad(x);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x, n, k](Graph& g) {
      if (double* dx = g.grad_sink(x)) {
        const Tensor& dy = g.node(out).grad;
        const Tensor& yv = g.node(out).value;
        for (std::int64_t i = 0; i < n; ++i) {
          const double* yrow = yv.data.data() + i * k;
          const double* dyrow = dy.data.data() + i * k;
          double dot = 0.0;
          for (std::int64_t j = 0; j < k; ++j) dot += yrow[j] * dyrow[j];
          double* dst = dx + i * k;
          for (std::int64_t j = 0; j < k; ++j) dst[j] += yrow[j] * (dyrow[j] - dot);
        }
      }
    };
  }
  return out;
}

Var Graph::log_softmax(Var x) {
  check_2d(x, "log_softmax");
  const Tensor& xv = node(x).value;
  const std::int64_t n = xv.dim(0), k = xv.dim(1);
  Tensor y = Tensor::zeros({n, k});
  for (std::int64_t i = 0; i < n; ++i) {
    const double* row = xv.data.data() + i * k;
    double* yrow = y.data.data() + i * k;
    double mx = row[0];
    for (std::int64_t j = 1; j < k; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (std::int64_t j = 0; j < k; ++j) sum += std::exp(row[j] - mx);
    const double lse = mx + std::log(sum);
    for (std::int64_t j = 0; j < k; ++j) yrow[j] = row[j] - lse;
  }
  const bool req = needs_grad(x);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x, n, k](Graph& g) {
      if (double* dx = g.grad_sink(x)) {
        const Tensor& dy = g.node(out).grad;
        const Tensor& yv = g.node(out).value;
        for (std::int64_t i = 0; i < n; ++i) {
          const double* yrow = yv.data.data() + i * k;
          const double* dyrow = dy.data.data() + i * k;
          double sum_dy = 0.0;
          for (std::int64_t j = 0; j < k; ++j) sum_dy += dyrow[j];
          double* dst = dx + i * k;
          for (std::int64_t j = 0; j < k; ++j) dst[j] += dyrow[j] - std::exp(yrow[j]) * sum_dy;
        }
      }
    };
  }
  return out;
}

Var Graph::lstm_step(Var x, Var h, Var c, Var w_x, Var w_h, Var b) {
  check_2d(x, "lstm_step");
  check_2d(h, "lstm_step");
  check_2d(c, "lstm_step");
  const Tensor& xv = node(x).value;
  const Tensor& hv = node(h).value;
  const Tensor& cv = node(c).value;
  const Tensor& wxv = node(w_x).value;
  const Tensor& whv = node(w_h).value;
  const Tensor& bv = node(b).value;
  const std::int64_t batch = xv.dim(0), in = xv.dim(1), hidden = hv.dim(1);
  if (hv.dim(0) != batch || cv.dim(0) != batch || cv.dim(1) != hidden) {
    raise(ErrorKind::ShapeMismatch, "lstm_step state shapes disagree with input batch");
  }
  if (wxv.ndim() != 2 || wxv.dim(0) != 4 * hidden || wxv.dim(1) != in ||
      whv.ndim() != 2 || whv.dim(0) != 4 * hidden || whv.dim(1) != hidden ||
      bv.numel() != 4 * hidden) {
    raise(ErrorKind::ShapeMismatch, "lstm_step weight shapes must be [4H,I], [4H,H], [4H]");
  }

  Tensor pre = Tensor::zeros({batch, 4 * hidden});
  gemm_nt(batch, 4 * hidden, in, xv.data.data(), wxv.data.data(), pre.data.data());
  gemm_nt(batch, 4 * hidden, hidden, hv.data.data(), whv.data.data(), pre.data.data());
  for (std::int64_t i = 0; i < batch; ++i) {
    double* prow = pre.data.data() + i * 4 * hidden;
    for (std::int64_t j = 0; j < 4 * hidden; ++j) prow[j] += bv.data[static_cast<std::size_t>(j)];
  }

  Tensor ig = Tensor::zeros({batch, hidden}), fg = ig, gg = ig, og = ig, tc = ig;
  Tensor y = Tensor::zeros({batch, 2 * hidden});
  for (std::int64_t i = 0; i < batch; ++i) {
    const double* prow = pre.data.data() + i * 4 * hidden;
    for (std::int64_t j = 0; j < hidden; ++j) {
      const double iv = sigmoid(prow[j]);
      const double fv = sigmoid(prow[hidden + j]);
      const double gvl = std::tanh(prow[2 * hidden + j]);
      const double ov = sigmoid(prow[3 * hidden + j]);
      const double cnew = fv * cv(i, j) + iv * gvl;
      const double tcv = std::tanh(cnew);
      ig(i, j) = iv; fg(i, j) = fv; gg(i, j) = gvl; og(i, j) = ov; tc(i, j) = tcv;
      y(i, j) = ov * tcv;          // h'
      y(i, hidden + j) = cnew;     // c'
    }
  }

  const bool req = needs_grad(x) || needs_grad(h) || needs_grad(c) ||
                   needs_grad(w_x) || needs_grad(w_h) || needs_grad(b);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x, h, c, w_x, w_h, b, batch, in, hidden,
                          ig = std::move(ig), fg = std::move(fg), gg = std::move(gg),
                          og = std::move(og), tc = std::move(tc)](Graph& g) {
      const Tensor& dy = g.node(out).grad;
      const Tensor& cv2 = g.value(c);
      Tensor dpre = Tensor::zeros({batch, 4 * hidden});
      double* dc = g.grad_sink(c);
      for (std::int64_t i = 0; i < batch; ++i) {
        const double* dyrow = dy.data.data() + i * 2 * hidden;
        double* dprow = dpre.data.data() + i * 4 * hidden;
        for (std::int64_t j = 0; j < hidden; ++j) {
          const double dh_out = dyrow[j];
          const double dc_out = dyrow[hidden + j];
          const double tcv = tc(i, j), ov = og(i, j);
          const double dct = dc_out + dh_out * ov * (1.0 - tcv * tcv);
          const double iv = ig(i, j), fv = fg(i, j), gvl = gg(i, j);
          dprow[j] = dct * gvl * iv * (1.0 - iv);
          dprow[hidden + j] = dct * cv2(i, j) * fv * (1.0 - fv);
          dprow[2 * hidden + j] = dct * iv * (1.0 - gvl * gvl);
          dprow[3 * hidden + j] = dh_out * tcv * ov * (1.0 - ov);
          if (dc) dc[i * hidden + j] += dct * fv;
        }
      }
      if (double* dx = g.grad_sink(x)) {
        gemm_nn(batch, in, 4 * hidden, dpre.data.data(), g.value(w_x).data.data(), dx);
      }
      if (double* dh = g.grad_sink(h)) {
        gemm_nn(batch, hidden, 4 * hidden, dpre.data.data(), g.value(w_h).data.data(), dh);
      }
      if (double* dwx = g.grad_sink(w_x)) {
        gemm_tn(4 * hidden, in, batch, dpre.data.data(), g.value(x).data.data(), dwx);
      }
      if (double* dwh = g.grad_sink(w_h)) {
        gemm_tn(4 * hidden, hidden, batch, dpre.data.data(), g.value(h).data.data(), dwh);
      }
      if (double* db = g.grad_sink(b)) {
        for (std::int64_t i = 0; i < batch; ++i) {
          const double* dprow = dpre.data.data() + i * 4 * hidden;
          for (std::int64_t j = 0; j < 4 * hidden; ++j) db[j] += dprow[j];
        }
      }
    };
  }
  return out;
}

Var Graph::rows(Var x, std::int64_t offset, std::int64_t count) {
  check_2d(x, "rows");
  const Tensor& xv = node(x).value;
  if (offset < 0 || count < 1 || offset + count > xv.dim(0)) {
    raise(ErrorKind::ShapeMismatch, "rows slice out of range");
  }
  const std::int64_t w = xv.dim(1);
  Tensor y({count, w},
           std::vector<double>(xv.data.begin() + static_cast<std::ptrdiff_t>(offset * w),
                               xv.data.begin() + static_cast<std::ptrdiff_t>((offset + count) * w)));
  const bool req = needs_grad(x);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x, offset, count, w](Graph& g) {
      if (double* dx = g.grad_sink(x)) {
        const Tensor& dy = g.node(out).grad;
        const std::int64_t n = count * w;
        double* dst = dx + offset * w;
        for (std::int64_t i = 0; i < n; ++i) dst[i] += dy.data[static_cast<std::size_t>(i)];
      }
    };
  }
  return out;
}

Var Graph::cols(Var x, std::int64_t offset, std::int64_t count) {
  check_2d(x, "cols");
  const Tensor& xv = node(x).value;
  if (offset < 0 || count < 1 || offset + count > xv.dim(1)) {
    raise(ErrorKind::ShapeMismatch, "cols slice out of range");
  }
  const std::int64_t n = xv.dim(0), w = xv.dim(1);
  Tensor y = Tensor::zeros({n, count});
  for (std::int64_t i = 0; i < n; ++i) {
    std::memcpy(y.data.data() + i * count, xv.data.data() + i * w + offset,
                sizeof(double) * static_cast<std::size_t>(count));
  }
  const bool req = needs_grad(x);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x, offset, count, n, w](Graph& g) {
      if (double* dx = g.grad_sink(x)) {
        const Tensor& dy = g.node(out).grad;
        for (std::int64_t i = 0; i < n; ++i) {
          const double* src = dy.data.data() + i * count;
          double* dst = dx + i * w + offset;
          for (std::int64_t j = 0; j < count; ++j) dst[j] += src[j];
        }
      }
    };
  }
  return out;
}

Var Graph::add(Var a, Var b) {
  const Tensor& av = node(a).value;
  const Tensor& bv = node(b).value;
  if (!av.same_shape(bv)) {
    raise(ErrorKind::ShapeMismatch,
          "add shapes differ: " + av.shape_str() + " vs " + bv.shape_str());
  }
  Tensor y = av;
  for (std::int64_t i = 0; i < y.numel(); ++i) {
    y.data[static_cast<std::size_t>(i)] += bv.data[static_cast<std::size_t>(i)];
  }
  const bool req = needs_grad(a) || needs_grad(b);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, a, b](Graph& g) {
      const Tensor& dy = g.node(out).grad;
      const std::int64_t n = dy.numel();
      if (double* da = g.grad_sink(a)) {
        for (std::int64_t i = 0; i < n; ++i) da[i] += dy.data[static_cast<std::size_t>(i)];
      }
      if (double* db = g.grad_sink(b)) {
        for (std::int64_t i = 0; i < n; ++i) db[i] += dy.data[static_cast<std::size_t>(i)];
      }
    };
  }
  return out;
}

Var Graph::scale(Var x, double factor) {
  Tensor y = node(x).value;
  for (double& v : y.data) v *= factor;
  const bool req = needs_grad(x);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, x, factor](Graph& g) {
      if (double* dx = g.grad_sink(x)) {
        const Tensor& dy = g.node(out).grad;
        const std::int64_t n = dy.numel();
        for (std::int64_t i = 0; i < n; ++i) dx[i] += factor * dy.data[static_cast<std::size_t>(i)];
      }
    };
  }
  return out;
}

Var Graph::nll_loss(Var log_probs, std::vector<std::int64_t> targets,
                    std::vector<double> class_weights) {
  check_2d(log_probs, "nll_loss");
  const Tensor& lp = node(log_probs).value;
  const std::int64_t n = lp.dim(0), k = lp.dim(1);
  if (static_cast<std::int64_t>(targets.size()) != n) {
    raise(ErrorKind::LengthMismatch, "nll_loss targets length " +
                                         std::to_string(targets.size()) + " for batch " +
                                         std::to_string(n));
  }
  if (!class_weights.empty() && static_cast<std::int64_t>(class_weights.size()) != k) {
    raise(ErrorKind::LengthMismatch, "class_weights length must equal class count");
  }
  double acc = 0.0, denom = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t t = targets[static_cast<std::size_t>(i)];
    if (t < 0 || t >= k) {
      raise(ErrorKind::InvalidTarget, "target " + std::to_string(t) + " outside [0, " +
                                          std::to_string(k) + ")");
    }
    const double w = class_weights.empty() ? 1.0 : class_weights[static_cast<std::size_t>(t)];
    acc -= w * lp(i, t);
    denom += w;
  }
  if (denom <= 0.0) raise(ErrorKind::InvalidTarget, "nll_loss weights sum to zero");
  Tensor y({1}, {acc / denom});
  const bool req = needs_grad(log_probs);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, log_probs, targets = std::move(targets),
                          class_weights = std::move(class_weights), n, denom](Graph& g) {
      if (double* dlp = g.grad_sink(log_probs)) {
        const double gv = g.node(out).grad.data[0] / denom;
        const std::int64_t k2 = g.value(log_probs).dim(1);
        for (std::int64_t i = 0; i < n; ++i) {
          const std::int64_t t = targets[static_cast<std::size_t>(i)];
          const double w =
              class_weights.empty() ? 1.0 : class_weights[static_cast<std::size_t>(t)];
          dlp[i * k2 + t] -= gv * w;
        }
      }
    };
  }
  return out;
}

Var Graph::mse_loss(Var pred, Tensor target) {
  const Tensor& pv = node(pred).value;
  if (!pv.same_shape(target)) {
    raise(ErrorKind::ShapeMismatch, "mse_loss shapes differ: " + pv.shape_str() + " vs " +
                                        target.shape_str());
  }
  const std::int64_t n = pv.numel();
  double acc = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = pv.data[static_cast<std::size_t>(i)] - target.data[static_cast<std::size_t>(i)];
    acc += d * d;
  }
  Tensor y({1}, {acc / static_cast<double>(n)});
  const bool req = needs_grad(pred);
  Var out = push(std::move(y), req);
  if (req) {
    node(out).backprop = [out, pred, target = std::move(target), n](Graph& g) {
      if (double* dp = g.grad_sink(pred)) {
        const double gv = 2.0 * g.node(out).grad.data[0] / static_cast<double>(n);
        const Tensor& pv2 = g.value(pred);
        for (std::int64_t i = 0; i < n; ++i) {
          dp[i] += gv * (pv2.data[static_cast<std::size_t>(i)] -
                         target.data[static_cast<std::size_t>(i)]);
        }
      }
    };
  }
  return out;
}

}  // namespace itemvoice::nn
