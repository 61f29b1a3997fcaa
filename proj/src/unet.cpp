#include "aide/unet.hpp"

#include <stdexcept>
#include <string>

#include "aide/rng.hpp"

namespace aide::net {

UNet::UNet(const ArchConfig& arch, std::uint64_t seed)
    : arch_(arch), seed_(seed) {
  const int depth = arch_.depth;
  const int streams = arch_.modality_streams;

  RngStream root = seeded_rng(seed);

  enc_.resize(std::size_t(streams));
  pool_.resize(std::size_t(streams));
  for (int s = 0; s < streams; ++s) {
    for (int d = 0; d < depth; ++d) {
      const int in_ch = d == 0 ? 1 : level_channels(d - 1);
      enc_[std::size_t(s)].emplace_back(
          in_ch, level_channels(d),
          "enc" + std::to_string(s) + "." + std::to_string(d));
    }
    for (int d = 0; d + 1 < depth; ++d)
      pool_[std::size_t(s)].emplace_back();
  }

  int prev_ch = streams * level_channels(depth - 1);
  for (int i = 0; i + 1 < depth; ++i) {
    const int level = depth - 2 - i;
    up_.emplace_back();
    dec_.emplace_back(prev_ch + streams * level_channels(level),
                      level_channels(level), "dec" + std::to_string(i));
    prev_ch = level_channels(level);
  }
  head_ = std::make_unique<Conv2d>(level_channels(0), 2, 1, "head");

  RngStream init_rng = root.split("init");
  for (auto& stream : enc_)
    for (auto& block : stream) block.init(init_rng);
  for (auto& block : dec_) block.init(init_rng);
  head_->init(init_rng);
}

void UNet::check_input(const Tensor& x) const {
  if (x.dims.size() != 4)
    throw std::invalid_argument("UNet: expected NCHW input");
  if (x.dim(1) != arch_.modality_streams)
    throw std::invalid_argument("UNet: modality count mismatch");
  const int div = 1 << (arch_.depth - 1);
  if (x.dim(2) % div != 0 || x.dim(3) % div != 0)
    throw std::invalid_argument("UNet: input size not divisible by " +
                                std::to_string(div));
}

Tensor UNet::forward(const Tensor& x, Mode mode) {
  check_input(x);
  const int depth = arch_.depth;
  const int streams = arch_.modality_streams;
  const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
  const std::size_t hw = std::size_t(h) * w;

  // per-stream encoder, collecting per-level concatenated skips
  std::vector<std::vector<Tensor>> feats(static_cast<std::size_t>(streams));
  for (int s = 0; s < streams; ++s) {
    Tensor a({n, 1, h, w});
    for (int b = 0; b < n; ++b)
      std::copy_n(x.ptr() + (std::size_t(b) * streams + s) * hw, hw,
                  a.ptr() + std::size_t(b) * hw);
    for (int d = 0; d < depth; ++d) {
      if (d > 0) a = pool_[std::size_t(s)][std::size_t(d - 1)].forward(a, mode);
      a = enc_[std::size_t(s)][std::size_t(d)].forward(a, mode);
      feats[std::size_t(s)].push_back(a);
    }
  }

  std::vector<Tensor> skips(static_cast<std::size_t>(depth));
  for (int d = 0; d < depth; ++d) {
    Tensor cat = feats[0][std::size_t(d)];
    for (int s = 1; s < streams; ++s)
      cat = concat_channels(cat, feats[std::size_t(s)][std::size_t(d)]);
    skips[std::size_t(d)] = std::move(cat);
  }
  if (mode == Mode::train) cached_skips_ = skips;

  Tensor cur = skips[std::size_t(depth - 1)];
  for (int i = 0; i + 1 < depth; ++i) {
    const int level = depth - 2 - i;
    cur = up_[std::size_t(i)].forward(cur, mode);
    cur = concat_channels(cur, skips[std::size_t(level)]);
    cur = dec_[std::size_t(i)].forward(cur, mode);
  }
  cur = head_->forward(cur, mode);
  return softmax_.forward(cur, mode);
}

void UNet::backward(const Tensor& dprobs) {
  const int depth = arch_.depth;
  const int streams = arch_.modality_streams;
  if (cached_skips_.empty())
    throw std::logic_error("UNet backward without train forward");

  Tensor d = softmax_.backward(dprobs);
  d = head_->backward(d);

  std::vector<Tensor> dskips(static_cast<std::size_t>(depth));
  for (int i = depth - 2; i >= 0; --i) {
    const int level = depth - 2 - i;
    d = dec_[std::size_t(i)].backward(d);
    const int up_ch = i == 0 ? streams * level_channels(depth - 1)
                             : level_channels(depth - 1 - i);
    Tensor dup, dskip;
    split_channels(d, up_ch, dup, dskip);
    if (dskips[std::size_t(level)].numel() == 0)
      dskips[std::size_t(level)] = std::move(dskip);
    else
      for (std::size_t j = 0; j < dskip.numel(); ++j)
        dskips[std::size_t(level)].data[j] += dskip.data[j];
    d = up_[std::size_t(i)].backward(dup);
  }
  // d is now the gradient w.r.t. the bottom skip
  if (dskips[std::size_t(depth - 1)].numel() == 0)
    dskips[std::size_t(depth - 1)] = std::move(d);
  else
    for (std::size_t j = 0; j < d.numel(); ++j)
      dskips[std::size_t(depth - 1)].data[j] += d.data[j];

  // split per-level skip grads by stream and run encoder backward
  for (int s = 0; s < streams; ++s) {
    Tensor carry;  // gradient flowing down from the level above via pooling
    for (int d_lvl = depth - 1; d_lvl >= 0; --d_lvl) {
      const int ch = level_channels(d_lvl);
      Tensor dfeat;
      {
        const Tensor& dsk = dskips[std::size_t(d_lvl)];
        const int total_ch = dsk.dim(1);
        const int n = dsk.dim(0), hh = dsk.dim(2), ww = dsk.dim(3);
        const std::size_t hw = std::size_t(hh) * ww;
        dfeat = Tensor({n, ch, hh, ww});
        for (int b = 0; b < n; ++b)
          std::copy_n(dsk.ptr() + (std::size_t(b) * total_ch + s * ch) * hw,
                      std::size_t(ch) * hw,
                      dfeat.ptr() + std::size_t(b) * ch * hw);
      }
      if (carry.numel() != 0)
        for (std::size_t j = 0; j < dfeat.numel(); ++j)
          dfeat.data[j] += carry.data[j];
      Tensor g = enc_[std::size_t(s)][std::size_t(d_lvl)].backward(dfeat);
      if (d_lvl > 0)
        carry = pool_[std::size_t(s)][std::size_t(d_lvl - 1)].backward(g);
    }
  }
  cached_skips_.clear();
}

void UNet::zero_grad() {
  for (auto& p : params()) p.grad->zero();
}

std::vector<ParamRef> UNet::params() {
  std::vector<ParamRef> out;
  for (auto& stream : enc_)
    for (auto& block : stream) block.collect(out);
  for (auto& block : dec_) block.collect(out);
  head_->collect(out);
  return out;
}

std::vector<BufferRef> UNet::buffers() {
  std::vector<BufferRef> out;
  for (auto& stream : enc_)
    for (auto& block : stream) block.collect_buffers(out);
  for (auto& block : dec_) block.collect_buffers(out);
  return out;
}

Tensor images_to_tensor(const std::vector<const Image*>& batch) {
  if (batch.empty()) throw std::invalid_argument("empty image batch");
  const Image& first = *batch[0];
  Tensor x({int(batch.size()), first.modalities, first.height, first.width});
  const std::size_t sample_size = first.data.size();
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Image& img = *batch[b];
    if (img.height != first.height || img.width != first.width ||
        img.modalities != first.modalities)
      throw std::invalid_argument("image batch shape mismatch");
    std::copy_n(img.data.data(), sample_size, x.ptr() + b * sample_size);
  }
  return x;
}

ProbMap tensor_to_probmap(const Tensor& probs, int sample_index) {
  const int n = probs.dim(0), c = probs.dim(1), h = probs.dim(2),
            w = probs.dim(3);
  if (c != 2) throw std::invalid_argument("expected 2-channel probabilities");
  if (sample_index < 0 || sample_index >= n)
    throw std::out_of_range("sample index");
  ProbMap p(h, w);
  const std::size_t hw = std::size_t(h) * w;
  const double* base = probs.ptr() + std::size_t(sample_index) * 2 * hw;
  std::copy_n(base, hw, p.bg());
  std::copy_n(base + hw, hw, p.fg());
  return p;
}

ProbMap forward_eval(UNet& model, const Image& image) {
  std::vector<const Image*> batch{&image};
  const Tensor probs = model.forward(images_to_tensor(batch), Mode::eval);
  return tensor_to_probmap(probs, 0);
}

}  // namespace aide::net
