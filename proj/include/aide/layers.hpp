#pragma once
// Network layers with explicit forward/backward. Train-mode forwards cache
// what backward needs; eval-mode forwards leave caches untouched so that
// evaluation passes can be interleaved with a pending backward.

#include <cstdint>
#include <string>
#include <vector>

#include "aide/rng.hpp"
#include "aide/tensor.hpp"

namespace aide::net {

enum class Mode : std::uint8_t { train, eval };

// 2-D convolution, stride 1, square kernel, zero padding k/2 (same size).
class Conv2d {
 public:
  Conv2d(int in_ch, int out_ch, int ksize, std::string name);

  void init(RngStream& rng);
  Tensor forward(const Tensor& x, Mode mode);
  Tensor backward(const Tensor& dy);
  void collect(std::vector<ParamRef>& out);

  int in_channels() const { return in_ch_; }
  int out_channels() const { return out_ch_; }

 private:
  int in_ch_, out_ch_, ksize_, pad_;
  std::string name_;
  Tensor weight_, bias_, grad_weight_, grad_bias_;
  Tensor cached_input_;
};

class BatchNorm2d {
 public:
  BatchNorm2d(int channels, std::string name);

  Tensor forward(const Tensor& x, Mode mode);
  Tensor backward(const Tensor& dy);
  void collect(std::vector<ParamRef>& out);
  void collect_buffers(std::vector<BufferRef>& out);

 private:
  int channels_;
  std::string name_;
  double momentum_ = 0.1;
  double eps_ = 1e-5;
  Tensor gamma_, beta_, grad_gamma_, grad_beta_;
  Tensor running_mean_, running_var_;
  // train-mode caches
  Tensor cached_xhat_;
  std::vector<double> cached_invstd_;
  bool cached_train_ = false;
};

class ReLU {
 public:
  Tensor forward(const Tensor& x, Mode mode);
  Tensor backward(const Tensor& dy);

 private:
  Tensor cached_input_;
};

class MaxPool2d {
 public:
  Tensor forward(const Tensor& x, Mode mode);
  Tensor backward(const Tensor& dy);

 private:
  std::vector<int> cached_dims_;
  std::vector<std::size_t> argmax_;
};

class BilinearUp2 {
 public:
  Tensor forward(const Tensor& x, Mode mode);
  Tensor backward(const Tensor& dy);

 private:
  std::vector<int> cached_dims_;
};

// Channel softmax (2 classes).
class ChannelSoftmax {
 public:
  Tensor forward(const Tensor& logits, Mode mode);
  Tensor backward(const Tensor& dprobs);

 private:
  Tensor cached_output_;
};

// Two (conv -> BN -> ReLU) stages.
class ConvBlock {
 public:
  ConvBlock(int in_ch, int out_ch, const std::string& name);

  void init(RngStream& rng);
  Tensor forward(const Tensor& x, Mode mode);
  Tensor backward(const Tensor& dy);
  void collect(std::vector<ParamRef>& out);
  void collect_buffers(std::vector<BufferRef>& out);

 private:
  Conv2d conv1_;
  BatchNorm2d bn1_;
  ReLU relu1_;
  Conv2d conv2_;
  BatchNorm2d bn2_;
  ReLU relu2_;
};

// Channel-axis concat/split helpers for skip connections.
Tensor concat_channels(const Tensor& a, const Tensor& b);
void split_channels(const Tensor& dy, int a_channels, Tensor& da, Tensor& db);

}  // namespace aide::net
