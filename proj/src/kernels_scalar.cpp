// Scalar reference kernels. These define the semantics the SIMD variants
// must reproduce; keep them straightforward.

#include "aide/kernels.hpp"

namespace aide::kernels {
namespace {

void gemm_nn_scalar(int m, int n, int k, const double* a, int lda,
                    const double* b, int ldb, double* c, int ldc,
                    bool accumulate) {
  for (int i = 0; i < m; ++i) {
    double* crow = c + static_cast<std::size_t>(i) * ldc;
    if (!accumulate) {
      for (int j = 0; j < n; ++j) crow[j] = 0.0;
    }
    for (int p = 0; p < k; ++p) {
      const double av = a[static_cast<std::size_t>(i) * lda + p];
      const double* brow = b + static_cast<std::size_t>(p) * ldb;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_nt_scalar(int m, int n, int k, const double* a, int lda,
                    const double* b, int ldb, double* c, int ldc,
                    bool accumulate) {
  for (int i = 0; i < m; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * lda;
    double* crow = c + static_cast<std::size_t>(i) * ldc;
    for (int j = 0; j < n; ++j) {
      const double* brow = b + static_cast<std::size_t>(j) * ldb;
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] = accumulate ? crow[j] + acc : acc;
    }
  }
}

void gemm_tn_scalar(int m, int n, int k, const double* a, int lda,
                    const double* b, int ldb, double* c, int ldc,
                    bool accumulate) {
  for (int i = 0; i < m; ++i) {
    double* crow = c + static_cast<std::size_t>(i) * ldc;
    if (!accumulate) {
      for (int j = 0; j < n; ++j) crow[j] = 0.0;
    }
    for (int p = 0; p < k; ++p) {
      const double av = a[static_cast<std::size_t>(p) * lda + i];
      const double* brow = b + static_cast<std::size_t>(p) * ldb;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void axpy_scalar(int n, double a, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(int n, double a, double* x) {
  for (int i = 0; i < n; ++i) x[i] *= a;
}

void add_scalar(int n, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += x[i];
}

double dot_scalar(int n, const double* x, const double* y) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_scalar(int n, const double* x) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sumsq_scalar(int n, const double* x) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void relu_fwd_scalar(int n, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_bwd_scalar(int n, const double* x, const double* dy, double* dx) {
  for (int i = 0; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{gemm_nn_scalar, gemm_nt_scalar, gemm_tn_scalar,
                       axpy_scalar,    scale_scalar,   add_scalar,
                       dot_scalar,     sum_scalar,     sumsq_scalar,
                       relu_fwd_scalar, relu_bwd_scalar, "scalar"};
  return ops;
}

}  // namespace aide::kernels
