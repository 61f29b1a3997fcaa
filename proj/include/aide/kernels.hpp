#pragma once
// Data-parallel inner-loop kernels used by the tensor/network code.
//
// Every kernel exists as a scalar reference implementation and, on x86-64,
// as an AVX2+FMA variant. The active table is chosen once at runtime from
// CPU capabilities; AIDE_KERNELS=scalar|avx2 overrides the choice.
// SIMD variants are equivalence-tested against the scalar references.

#include <cstddef>

namespace aide::kernels {

// Row-major GEMM, C[m x n] = A * B (+ C when accumulate).
// gemm_nn: A is m x k (lda), B is k x n (ldb)
// gemm_nt: A is m x k (lda), B is n x k (ldb), i.e. C = A * B^T
// gemm_tn: A is k x m (lda), B is k x n (ldb), i.e. C = A^T * B
using GemmFn = void (*)(int m, int n, int k, const double* a, int lda,
                        const double* b, int ldb, double* c, int ldc,
                        bool accumulate);

struct Ops {
  GemmFn gemm_nn;
  GemmFn gemm_nt;
  GemmFn gemm_tn;
  void (*axpy)(int n, double a, const double* x, double* y);  // y += a*x
  void (*scale)(int n, double a, double* x);                  // x *= a
  void (*add)(int n, const double* x, double* y);             // y += x
  double (*dot)(int n, const double* x, const double* y);
  double (*sum)(int n, const double* x);
  double (*sumsq)(int n, const double* x);
  void (*relu_fwd)(int n, const double* x, double* y);        // y = max(x,0)
  void (*relu_bwd)(int n, const double* x, const double* dy,
                   double* dx);                               // dx = x>0 ? dy : 0
  const char* name;
};

const Ops& scalar_ops();

// True when the AVX2 translation unit was compiled in and the CPU reports
// AVX2+FMA. avx2_ops() falls back to the scalar table when unsupported.
bool avx2_supported();
const Ops& avx2_ops();

// Runtime-selected table. Resolved once on first call.
const Ops& active();

}  // namespace aide::kernels
