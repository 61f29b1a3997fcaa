#pragma once
// Minimal dense tensor of doubles, row-major with explicit dims.

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace aide::net {

struct Tensor {
  std::vector<int> dims;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> d) : dims(std::move(d)) {
    data.assign(numel_of(dims), 0.0);
  }

  static std::size_t numel_of(const std::vector<int>& d) {
    std::size_t n = 1;
    for (int x : d) {
      if (x <= 0) throw std::invalid_argument("tensor dim must be > 0");
      n *= std::size_t(x);
    }
    return n;
  }

  std::size_t numel() const { return data.size(); }
  int dim(int i) const { return dims.at(std::size_t(i)); }
  double* ptr() { return data.data(); }
  const double* ptr() const { return data.data(); }

  void zero() { std::fill(data.begin(), data.end(), 0.0); }

  bool same_shape(const Tensor& o) const { return dims == o.dims; }
};

// Named handle onto a parameter and its gradient accumulator.
struct ParamRef {
  std::string name;
  Tensor* value = nullptr;
  Tensor* grad = nullptr;
};

struct BufferRef {
  std::string name;
  Tensor* value = nullptr;
};

}  // namespace aide::net
