#include "aide/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "aide/kernels.hpp"
#include "aide/parallel.hpp"

namespace aide::net {

namespace {

void check_4d(const Tensor& x, const char* who) {
  if (x.dims.size() != 4)
    throw std::invalid_argument(std::string(who) + ": expected NCHW tensor");
}

// col is (Cin*k*k) x (H*W), zero padding pad on both axes.
void im2col(const double* x, int cin, int h, int w, int k, int pad,
            double* col) {
  const std::size_t hw = std::size_t(h) * w;
  for (int ci = 0; ci < cin; ++ci) {
    const double* plane = x + std::size_t(ci) * hw;
    for (int dy = 0; dy < k; ++dy) {
      for (int dx = 0; dx < k; ++dx) {
        double* row =
            col + (std::size_t(ci) * k * k + std::size_t(dy) * k + dx) * hw;
        for (int oy = 0; oy < h; ++oy) {
          const int sy = oy + dy - pad;
          double* dst = row + std::size_t(oy) * w;
          if (sy < 0 || sy >= h) {
            for (int ox = 0; ox < w; ++ox) dst[ox] = 0.0;
            continue;
          }
          const double* src = plane + std::size_t(sy) * w;
          for (int ox = 0; ox < w; ++ox) {
            const int sx = ox + dx - pad;
            dst[ox] = (sx < 0 || sx >= w) ? 0.0 : src[sx];
          }
        }
      }
    }
  }
}

void col2im_add(const double* col, int cin, int h, int w, int k, int pad,
                double* x) {
  const std::size_t hw = std::size_t(h) * w;
  for (int ci = 0; ci < cin; ++ci) {
    double* plane = x + std::size_t(ci) * hw;
    for (int dy = 0; dy < k; ++dy) {
      for (int dx = 0; dx < k; ++dx) {
        const double* row =
            col + (std::size_t(ci) * k * k + std::size_t(dy) * k + dx) * hw;
        for (int oy = 0; oy < h; ++oy) {
          const int sy = oy + dy - pad;
          if (sy < 0 || sy >= h) continue;
          const double* src = row + std::size_t(oy) * w;
          double* dst = plane + std::size_t(sy) * w;
          for (int ox = 0; ox < w; ++ox) {
            const int sx = ox + dx - pad;
            if (sx >= 0 && sx < w) dst[sx] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace

Conv2d::Conv2d(int in_ch, int out_ch, int ksize, std::string name)
    : in_ch_(in_ch),
      out_ch_(out_ch),
      ksize_(ksize),
      pad_(ksize / 2),
      name_(std::move(name)),
      weight_({out_ch, in_ch, ksize, ksize}),
      bias_({out_ch}),
      grad_weight_({out_ch, in_ch, ksize, ksize}),
      grad_bias_({out_ch}) {}

void Conv2d::init(RngStream& rng) {
  const double std = std::sqrt(2.0 / (double(in_ch_) * ksize_ * ksize_));
  for (auto& v : weight_.data) v = std * rng.normal();
  bias_.zero();
}

Tensor Conv2d::forward(const Tensor& x, Mode mode) {
  check_4d(x, "Conv2d");
  if (x.dim(1) != in_ch_)
    throw std::invalid_argument("Conv2d " + name_ + ": channel mismatch");
  const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
  const int kdim = in_ch_ * ksize_ * ksize_;
  const std::size_t hw = std::size_t(h) * w;
  Tensor y({n, out_ch_, h, w});

  const auto& ops = kernels::active();
  parallel_for(0, std::size_t(n), [&](std::size_t s) {
    const double* xs = x.ptr() + s * in_ch_ * hw;
    double* ys = y.ptr() + s * out_ch_ * hw;
    std::vector<double> col;
    const double* colp = xs;
    if (ksize_ != 1) {
      col.resize(std::size_t(kdim) * hw);
      im2col(xs, in_ch_, h, w, ksize_, pad_, col.data());
      colp = col.data();
    }
    ops.gemm_nn(out_ch_, int(hw), kdim, weight_.ptr(), kdim, colp, int(hw),
                ys, int(hw), false);
    for (int co = 0; co < out_ch_; ++co) {
      double* row = ys + std::size_t(co) * hw;
      const double b = bias_.data[std::size_t(co)];
      for (std::size_t i = 0; i < hw; ++i) row[i] += b;
    }
  });

  if (mode == Mode::train) cached_input_ = x;
  return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
  const Tensor& x = cached_input_;
  if (x.numel() == 0)
    throw std::logic_error("Conv2d backward without train forward");
  const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
  const int kdim = in_ch_ * ksize_ * ksize_;
  const std::size_t hw = std::size_t(h) * w;
  Tensor dx({n, in_ch_, h, w});

  // Per-sample gradient buffers, reduced serially in sample order so the
  // result does not depend on the thread count.
  std::vector<std::vector<double>> dw_parts(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> db_parts(static_cast<std::size_t>(n));

  const auto& ops = kernels::active();
  parallel_for(0, std::size_t(n), [&](std::size_t s) {
    const double* xs = x.ptr() + s * in_ch_ * hw;
    const double* dys = dy.ptr() + s * out_ch_ * hw;
    double* dxs = dx.ptr() + s * in_ch_ * hw;

    std::vector<double> col;
    const double* colp = xs;
    if (ksize_ != 1) {
      col.resize(std::size_t(kdim) * hw);
      im2col(xs, in_ch_, h, w, ksize_, pad_, col.data());
      colp = col.data();
    }

    auto& dw = dw_parts[s];
    dw.assign(weight_.numel(), 0.0);
    ops.gemm_nt(out_ch_, kdim, int(hw), dys, int(hw), colp, int(hw),
                dw.data(), kdim, false);

    auto& db = db_parts[s];
    db.assign(std::size_t(out_ch_), 0.0);
    for (int co = 0; co < out_ch_; ++co)
      db[std::size_t(co)] = ops.sum(int(hw), dys + std::size_t(co) * hw);

    if (ksize_ == 1) {
      ops.gemm_tn(kdim, int(hw), out_ch_, weight_.ptr(), kdim, dys, int(hw),
                  dxs, int(hw), false);
    } else {
      std::vector<double> dcol(std::size_t(kdim) * hw);
      ops.gemm_tn(kdim, int(hw), out_ch_, weight_.ptr(), kdim, dys, int(hw),
                  dcol.data(), int(hw), false);
      col2im_add(dcol.data(), in_ch_, h, w, ksize_, pad_, dxs);
    }
  });

  for (std::size_t s = 0; s < std::size_t(n); ++s) {
    ops.add(int(weight_.numel()), dw_parts[s].data(), grad_weight_.ptr());
    ops.add(out_ch_, db_parts[s].data(), grad_bias_.ptr());
  }
  return dx;
}

void Conv2d::collect(std::vector<ParamRef>& out) {
  out.push_back({name_ + ".weight", &weight_, &grad_weight_});
  out.push_back({name_ + ".bias", &bias_, &grad_bias_});
}

BatchNorm2d::BatchNorm2d(int channels, std::string name)
    : channels_(channels),
      name_(std::move(name)),
      gamma_({channels}),
      beta_({channels}),
      grad_gamma_({channels}),
      grad_beta_({channels}),
      running_mean_({channels}),
      running_var_({channels}) {
  for (auto& v : gamma_.data) v = 1.0;
  for (auto& v : running_var_.data) v = 1.0;
}

Tensor BatchNorm2d::forward(const Tensor& x, Mode mode) {
  check_4d(x, "BatchNorm2d");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (c != channels_)
    throw std::invalid_argument("BatchNorm2d " + name_ + ": channel mismatch");
  const std::size_t hw = std::size_t(h) * w;
  const std::size_t cnt = std::size_t(n) * hw;
  Tensor y({n, c, h, w});

  if (mode == Mode::eval) {
    for (int ch = 0; ch < c; ++ch) {
      const double invstd =
          1.0 / std::sqrt(running_var_.data[std::size_t(ch)] + eps_);
      const double g = gamma_.data[std::size_t(ch)] * invstd;
      const double b = beta_.data[std::size_t(ch)] -
                       g * running_mean_.data[std::size_t(ch)];
      for (int s = 0; s < n; ++s) {
        const double* xs = x.ptr() + (std::size_t(s) * c + ch) * hw;
        double* ys = y.ptr() + (std::size_t(s) * c + ch) * hw;
        for (std::size_t i = 0; i < hw; ++i) ys[i] = g * xs[i] + b;
      }
    }
    return y;
  }

  cached_xhat_ = Tensor({n, c, h, w});
  cached_invstd_.assign(std::size_t(c), 0.0);
  const auto& ops = kernels::active();
  for (int ch = 0; ch < c; ++ch) {
    double sum = 0.0, sq = 0.0;
    for (int s = 0; s < n; ++s) {
      const double* xs = x.ptr() + (std::size_t(s) * c + ch) * hw;
      sum += ops.sum(int(hw), xs);
      sq += ops.sumsq(int(hw), xs);
    }
    const double mean = sum / double(cnt);
    double var = sq / double(cnt) - mean * mean;
    if (var < 0.0) var = 0.0;
    const double invstd = 1.0 / std::sqrt(var + eps_);
    cached_invstd_[std::size_t(ch)] = invstd;

    const double unbiased =
        cnt > 1 ? var * double(cnt) / double(cnt - 1) : var;
    running_mean_.data[std::size_t(ch)] =
        (1.0 - momentum_) * running_mean_.data[std::size_t(ch)] +
        momentum_ * mean;
    running_var_.data[std::size_t(ch)] =
        (1.0 - momentum_) * running_var_.data[std::size_t(ch)] +
        momentum_ * unbiased;

    const double g = gamma_.data[std::size_t(ch)];
    const double b = beta_.data[std::size_t(ch)];
    for (int s = 0; s < n; ++s) {
      const double* xs = x.ptr() + (std::size_t(s) * c + ch) * hw;
      double* xh = cached_xhat_.ptr() + (std::size_t(s) * c + ch) * hw;
      double* ys = y.ptr() + (std::size_t(s) * c + ch) * hw;
      for (std::size_t i = 0; i < hw; ++i) {
        xh[i] = (xs[i] - mean) * invstd;
        ys[i] = g * xh[i] + b;
      }
    }
  }
  cached_train_ = true;
  return y;
}

Tensor BatchNorm2d::backward(const Tensor& dy) {
  if (!cached_train_)
    throw std::logic_error("BatchNorm2d backward without train forward");
  const int n = dy.dim(0), c = dy.dim(1), h = dy.dim(2), w = dy.dim(3);
  const std::size_t hw = std::size_t(h) * w;
  const std::size_t cnt = std::size_t(n) * hw;
  Tensor dx({n, c, h, w});

  for (int ch = 0; ch < c; ++ch) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (int s = 0; s < n; ++s) {
      const double* d = dy.ptr() + (std::size_t(s) * c + ch) * hw;
      const double* xh = cached_xhat_.ptr() + (std::size_t(s) * c + ch) * hw;
      for (std::size_t i = 0; i < hw; ++i) {
        sum_dy += d[i];
        sum_dy_xhat += d[i] * xh[i];
      }
    }
    grad_gamma_.data[std::size_t(ch)] += sum_dy_xhat;
    grad_beta_.data[std::size_t(ch)] += sum_dy;

    const double g = gamma_.data[std::size_t(ch)];
    const double invstd = cached_invstd_[std::size_t(ch)];
    const double scale = g * invstd / double(cnt);
    for (int s = 0; s < n; ++s) {
      const double* d = dy.ptr() + (std::size_t(s) * c + ch) * hw;
      const double* xh = cached_xhat_.ptr() + (std::size_t(s) * c + ch) * hw;
      double* dxp = dx.ptr() + (std::size_t(s) * c + ch) * hw;
      for (std::size_t i = 0; i < hw; ++i)
        dxp[i] =
            scale * (double(cnt) * d[i] - sum_dy - xh[i] * sum_dy_xhat);
    }
  }
  return dx;
}

void BatchNorm2d::collect(std::vector<ParamRef>& out) {
  out.push_back({name_ + ".gamma", &gamma_, &grad_gamma_});
  out.push_back({name_ + ".beta", &beta_, &grad_beta_});
}

void BatchNorm2d::collect_buffers(std::vector<BufferRef>& out) {
  out.push_back({name_ + ".running_mean", &running_mean_});
  out.push_back({name_ + ".running_var", &running_var_});
}

Tensor ReLU::forward(const Tensor& x, Mode mode) {
  Tensor y(x.dims);
  kernels::active().relu_fwd(int(x.numel()), x.ptr(), y.ptr());
  if (mode == Mode::train) cached_input_ = x;
  return y;
}

Tensor ReLU::backward(const Tensor& dy) {
  if (cached_input_.numel() == 0)
    throw std::logic_error("ReLU backward without train forward");
  Tensor dx(dy.dims);
  kernels::active().relu_bwd(int(dy.numel()), cached_input_.ptr(), dy.ptr(),
                             dx.ptr());
  return dx;
}

Tensor MaxPool2d::forward(const Tensor& x, Mode mode) {
  check_4d(x, "MaxPool2d");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (h % 2 != 0 || w % 2 != 0)
    throw std::invalid_argument("MaxPool2d: odd spatial size");
  const int oh = h / 2, ow = w / 2;
  Tensor y({n, c, oh, ow});
  const bool track = mode == Mode::train;
  if (track) {
    cached_dims_ = x.dims;
    argmax_.assign(y.numel(), 0);
  }
  std::size_t out_idx = 0;
  for (int s = 0; s < n; ++s) {
    for (int ch = 0; ch < c; ++ch) {
      const double* plane =
          x.ptr() + (std::size_t(s) * c + ch) * std::size_t(h) * w;
      const std::size_t plane_off =
          (std::size_t(s) * c + ch) * std::size_t(h) * w;
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox, ++out_idx) {
          const int iy = oy * 2, ix = ox * 2;
          std::size_t best = std::size_t(iy) * w + ix;
          double bv = plane[best];
          const std::size_t cand[3] = {std::size_t(iy) * w + ix + 1,
                                       std::size_t(iy + 1) * w + ix,
                                       std::size_t(iy + 1) * w + ix + 1};
          for (std::size_t idx : cand) {
            if (plane[idx] > bv) {
              bv = plane[idx];
              best = idx;
            }
          }
          y.data[out_idx] = bv;
          if (track) argmax_[out_idx] = plane_off + best;
        }
      }
    }
  }
  return y;
}

Tensor MaxPool2d::backward(const Tensor& dy) {
  if (cached_dims_.empty())
    throw std::logic_error("MaxPool2d backward without train forward");
  Tensor dx(cached_dims_);
  for (std::size_t i = 0; i < dy.numel(); ++i)
    dx.data[argmax_[i]] += dy.data[i];
  return dx;
}

namespace {

struct LerpIndex {
  int i0, i1;
  double f;  // weight of i1
};

LerpIndex up2_src(int o, int in_size) {
  const double src = (o + 0.5) * 0.5 - 0.5;
  int i0 = int(std::floor(src));
  const double f = src - i0;
  int i1 = i0 + 1;
  if (i0 < 0) i0 = 0;
  if (i1 < 0) i1 = 0;
  if (i0 > in_size - 1) i0 = in_size - 1;
  if (i1 > in_size - 1) i1 = in_size - 1;
  return {i0, i1, f};
}

}  // namespace

Tensor BilinearUp2::forward(const Tensor& x, Mode mode) {
  check_4d(x, "BilinearUp2");
  const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int oh = h * 2, ow = w * 2;
  Tensor y({n, c, oh, ow});
  if (mode == Mode::train) cached_dims_ = x.dims;

  std::vector<LerpIndex> rows(static_cast<std::size_t>(oh)), cols(static_cast<std::size_t>(ow));
  for (int o = 0; o < oh; ++o) rows[std::size_t(o)] = up2_src(o, h);
  for (int o = 0; o < ow; ++o) cols[std::size_t(o)] = up2_src(o, w);

  for (int s = 0; s < n; ++s) {
    for (int ch = 0; ch < c; ++ch) {
      const double* src =
          x.ptr() + (std::size_t(s) * c + ch) * std::size_t(h) * w;
      double* dst =
          y.ptr() + (std::size_t(s) * c + ch) * std::size_t(oh) * ow;
      for (int oy = 0; oy < oh; ++oy) {
        const auto& ry = rows[std::size_t(oy)];
        const double* r0 = src + std::size_t(ry.i0) * w;
        const double* r1 = src + std::size_t(ry.i1) * w;
        double* out = dst + std::size_t(oy) * ow;
        for (int ox = 0; ox < ow; ++ox) {
          const auto& cx = cols[std::size_t(ox)];
          const double top = r0[cx.i0] * (1.0 - cx.f) + r0[cx.i1] * cx.f;
          const double bot = r1[cx.i0] * (1.0 - cx.f) + r1[cx.i1] * cx.f;
          out[ox] = top * (1.0 - ry.f) + bot * ry.f;
        }
      }
    }
  }
  return y;
}

Tensor BilinearUp2::backward(const Tensor& dy) {
  if (cached_dims_.empty())
    throw std::logic_error("BilinearUp2 backward without train forward");
  const int n = cached_dims_[0], c = cached_dims_[1], h = cached_dims_[2],
            w = cached_dims_[3];
  const int oh = h * 2, ow = w * 2;
  Tensor dx(cached_dims_);

  std::vector<LerpIndex> rows(static_cast<std::size_t>(oh)), cols(static_cast<std::size_t>(ow));
  for (int o = 0; o < oh; ++o) rows[std::size_t(o)] = up2_src(o, h);
  for (int o = 0; o < ow; ++o) cols[std::size_t(o)] = up2_src(o, w);

  for (int s = 0; s < n; ++s) {
    for (int ch = 0; ch < c; ++ch) {
      double* src =
          dx.ptr() + (std::size_t(s) * c + ch) * std::size_t(h) * w;
      const double* dst =
          dy.ptr() + (std::size_t(s) * c + ch) * std::size_t(oh) * ow;
      for (int oy = 0; oy < oh; ++oy) {
        const auto& ry = rows[std::size_t(oy)];
        for (int ox = 0; ox < ow; ++ox) {
          const auto& cx = cols[std::size_t(ox)];
          const double g = dst[std::size_t(oy) * ow + ox];
          src[std::size_t(ry.i0) * w + cx.i0] +=
              g * (1.0 - ry.f) * (1.0 - cx.f);
          src[std::size_t(ry.i0) * w + cx.i1] += g * (1.0 - ry.f) * cx.f;
          src[std::size_t(ry.i1) * w + cx.i0] += g * ry.f * (1.0 - cx.f);
          src[std::size_t(ry.i1) * w + cx.i1] += g * ry.f * cx.f;
        }
      }
    }
  }
  return dx;
}

Tensor ChannelSoftmax::forward(const Tensor& logits, Mode mode) {
  check_4d(logits, "ChannelSoftmax");
  const int n = logits.dim(0), c = logits.dim(1), h = logits.dim(2),
            w = logits.dim(3);
  const std::size_t hw = std::size_t(h) * w;
  Tensor y(logits.dims);
  for (int s = 0; s < n; ++s) {
    const double* in = logits.ptr() + std::size_t(s) * c * hw;
    double* out = y.ptr() + std::size_t(s) * c * hw;
    for (std::size_t i = 0; i < hw; ++i) {
      double m = in[i];
      for (int ch = 1; ch < c; ++ch)
        m = std::max(m, in[std::size_t(ch) * hw + i]);
      double sum = 0.0;
      for (int ch = 0; ch < c; ++ch) {
        const double e = std::exp(in[std::size_t(ch) * hw + i] - m);
        out[std::size_t(ch) * hw + i] = e;
        sum += e;
      }
      for (int ch = 0; ch < c; ++ch) out[std::size_t(ch) * hw + i] /= sum;
    }
  }
  if (mode == Mode::train) cached_output_ = y;
  return y;
}

Tensor ChannelSoftmax::backward(const Tensor& dprobs) {
  if (cached_output_.numel() == 0)
    throw std::logic_error("ChannelSoftmax backward without train forward");
  const Tensor& p = cached_output_;
  const int n = p.dim(0), c = p.dim(1), h = p.dim(2), w = p.dim(3);
  const std::size_t hw = std::size_t(h) * w;
  Tensor dl(p.dims);
  for (int s = 0; s < n; ++s) {
    const double* pp = p.ptr() + std::size_t(s) * c * hw;
    const double* dp = dprobs.ptr() + std::size_t(s) * c * hw;
    double* out = dl.ptr() + std::size_t(s) * c * hw;
    for (std::size_t i = 0; i < hw; ++i) {
      double dot = 0.0;
      for (int ch = 0; ch < c; ++ch)
        dot += dp[std::size_t(ch) * hw + i] * pp[std::size_t(ch) * hw + i];
      for (int ch = 0; ch < c; ++ch)
        out[std::size_t(ch) * hw + i] =
            pp[std::size_t(ch) * hw + i] *
            (dp[std::size_t(ch) * hw + i] - dot);
    }
  }
  return dl;
}

ConvBlock::ConvBlock(int in_ch, int out_ch, const std::string& name)
    : conv1_(in_ch, out_ch, 3, name + ".conv1"),
      bn1_(out_ch, name + ".bn1"),
      conv2_(out_ch, out_ch, 3, name + ".conv2"),
      bn2_(out_ch, name + ".bn2") {}

void ConvBlock::init(RngStream& rng) {
  conv1_.init(rng);
  conv2_.init(rng);
}

Tensor ConvBlock::forward(const Tensor& x, Mode mode) {
  Tensor t = conv1_.forward(x, mode);
  t = bn1_.forward(t, mode);
  t = relu1_.forward(t, mode);
  t = conv2_.forward(t, mode);
  t = bn2_.forward(t, mode);
  return relu2_.forward(t, mode);
}

Tensor ConvBlock::backward(const Tensor& dy) {
  Tensor t = relu2_.backward(dy);
  t = bn2_.backward(t);
  t = conv2_.backward(t);
  t = relu1_.backward(t);
  t = bn1_.backward(t);
  return conv1_.backward(t);
}

void ConvBlock::collect(std::vector<ParamRef>& out) {
  conv1_.collect(out);
  bn1_.collect(out);
  conv2_.collect(out);
  bn2_.collect(out);
}

void ConvBlock::collect_buffers(std::vector<BufferRef>& out) {
  bn1_.collect_buffers(out);
  bn2_.collect_buffers(out);
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3))
    throw std::invalid_argument("concat_channels: shape mismatch");
  const int n = a.dim(0), ca = a.dim(1), cb = b.dim(1), h = a.dim(2),
            w = a.dim(3);
  const std::size_t hw = std::size_t(h) * w;
  Tensor y({n, ca + cb, h, w});
  for (int s = 0; s < n; ++s) {
    std::copy_n(a.ptr() + std::size_t(s) * ca * hw, std::size_t(ca) * hw,
                y.ptr() + std::size_t(s) * (ca + cb) * hw);
    std::copy_n(b.ptr() + std::size_t(s) * cb * hw, std::size_t(cb) * hw,
                y.ptr() + std::size_t(s) * (ca + cb) * hw + std::size_t(ca) * hw);
  }
  return y;
}

void split_channels(const Tensor& dy, int a_channels, Tensor& da, Tensor& db) {
  const int n = dy.dim(0), c = dy.dim(1), h = dy.dim(2), w = dy.dim(3);
  const int cb = c - a_channels;
  const std::size_t hw = std::size_t(h) * w;
  da = Tensor({n, a_channels, h, w});
  db = Tensor({n, cb, h, w});
  for (int s = 0; s < n; ++s) {
    std::copy_n(dy.ptr() + std::size_t(s) * c * hw,
                std::size_t(a_channels) * hw,
                da.ptr() + std::size_t(s) * a_channels * hw);
    std::copy_n(
        dy.ptr() + std::size_t(s) * c * hw + std::size_t(a_channels) * hw,
        std::size_t(cb) * hw, db.ptr() + std::size_t(s) * cb * hw);
  }
}

}  // namespace aide::net
