#pragma once
// Encoder-decoder segmentation network. Five (configurable) downsampling
// blocks with max-pooling in between, one encoder stream per input
// modality with per-level feature concatenation, a bilinear-upsampling
// decoder with skip connections, and a 1x1 conv + channel-softmax head
// producing two-class probability maps.

#include <memory>
#include <vector>

#include "aide/config.hpp"
#include "aide/layers.hpp"
#include "aide/types.hpp"

namespace aide::net {

class UNet {
 public:
  UNet(const ArchConfig& arch, std::uint64_t seed);

  // x is {N, modalities, H, W} with H, W divisible by 2^(depth-1).
  // Returns {N, 2, H, W} probabilities.
  Tensor forward(const Tensor& x, Mode mode);

  // Gradient of the loss w.r.t. the output probabilities; accumulates
  // parameter gradients and returns nothing (input grads are not needed).
  void backward(const Tensor& dprobs);

  void zero_grad();
  std::vector<ParamRef> params();
  std::vector<BufferRef> buffers();

  const ArchConfig& arch() const { return arch_; }
  std::uint64_t seed() const { return seed_; }
  int level_channels(int level) const { return arch_.base_channels << level; }

 private:
  void check_input(const Tensor& x) const;

  ArchConfig arch_;
  std::uint64_t seed_;

  std::vector<std::vector<ConvBlock>> enc_;   // [stream][level]
  std::vector<std::vector<MaxPool2d>> pool_;  // [stream][level-1]
  std::vector<BilinearUp2> up_;               // [depth-1]
  std::vector<ConvBlock> dec_;                // [depth-1], bottom to top
  std::unique_ptr<Conv2d> head_;
  ChannelSoftmax softmax_;

  // train-mode caches for skip backward routing
  std::vector<Tensor> cached_skips_;  // concat per level
};

// Batch conversion helpers.
Tensor images_to_tensor(const std::vector<const Image*>& batch);
ProbMap tensor_to_probmap(const Tensor& probs, int sample_index);

// Convenience single-image evaluation forward.
ProbMap forward_eval(UNet& model, const Image& image);

}  // namespace aide::net
