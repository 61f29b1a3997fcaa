#include "aide/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "aide/kernels.hpp"

namespace aide::net {

void Sgd::step(const std::vector<ParamRef>& params) {
  const auto& ops = kernels::active();
  for (const auto& p : params) {
    for (std::size_t i = 0; i < p.value->numel(); ++i) {
      const double g = p.grad->data[i];
      if (!std::isfinite(g))
        throw std::runtime_error("non-finite gradient in " + p.name);
    }
    ops.axpy(int(p.value->numel()), -lr_, p.grad->ptr(), p.value->ptr());
  }
}

void Adam::step(const std::vector<ParamRef>& params) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(params[i].value->numel(), 0.0);
      v_[i].assign(params[i].value->numel(), 0.0);
    }
  }
  if (m_.size() != params.size())
    throw std::logic_error("Adam: parameter set changed between steps");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, double(t_));
  const double bc2 = 1.0 - std::pow(beta2_, double(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < p.value->numel(); ++j) {
      const double g = p.grad->data[j];
      if (!std::isfinite(g))
        throw std::runtime_error("non-finite gradient in " + p.name);
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g;
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g * g;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p.value->data[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind, double lr) {
  if (kind == OptimizerKind::adam) return std::make_unique<Adam>(lr);
  return std::make_unique<Sgd>(lr);
}

}  // namespace aide::net
