// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma on x86-64 only;
// callers must gate on avx2_supported().

#include "aide/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace aide::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d h = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, h));
}

// Shared body for gemm_nn / gemm_tn: both broadcast one A element per k-step
// and stream along rows of B. ATrans selects the A indexing.
template <bool ATrans>
void gemm_bcast_avx2(int m, int n, int k, const double* a, int lda,
                     const double* b, int ldb, double* c, int ldc,
                     bool accumulate) {
  auto aval = [&](int row, int p) -> double {
    return ATrans ? a[static_cast<std::size_t>(p) * lda + row]
                  : a[static_cast<std::size_t>(row) * lda + p];
  };

  int i = 0;
  for (; i + 4 <= m; i += 4) {
    double* c0 = c + static_cast<std::size_t>(i) * ldc;
    double* c1 = c0 + ldc;
    double* c2 = c1 + ldc;
    double* c3 = c2 + ldc;
    int j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256d acc00 = _mm256_setzero_pd(), acc01 = _mm256_setzero_pd();
      __m256d acc10 = _mm256_setzero_pd(), acc11 = _mm256_setzero_pd();
      __m256d acc20 = _mm256_setzero_pd(), acc21 = _mm256_setzero_pd();
      __m256d acc30 = _mm256_setzero_pd(), acc31 = _mm256_setzero_pd();
      for (int p = 0; p < k; ++p) {
        const double* brow = b + static_cast<std::size_t>(p) * ldb + j;
        const __m256d b0 = _mm256_loadu_pd(brow);
        const __m256d b1 = _mm256_loadu_pd(brow + 4);
        const __m256d a0 = _mm256_set1_pd(aval(i + 0, p));
        const __m256d a1 = _mm256_set1_pd(aval(i + 1, p));
        const __m256d a2 = _mm256_set1_pd(aval(i + 2, p));
        const __m256d a3 = _mm256_set1_pd(aval(i + 3, p));
        acc00 = _mm256_fmadd_pd(a0, b0, acc00);
        acc01 = _mm256_fmadd_pd(a0, b1, acc01);
        acc10 = _mm256_fmadd_pd(a1, b0, acc10);
        acc11 = _mm256_fmadd_pd(a1, b1, acc11);
        acc20 = _mm256_fmadd_pd(a2, b0, acc20);
        acc21 = _mm256_fmadd_pd(a2, b1, acc21);
        acc30 = _mm256_fmadd_pd(a3, b0, acc30);
        acc31 = _mm256_fmadd_pd(a3, b1, acc31);
      }
      if (accumulate) {
        acc00 = _mm256_add_pd(acc00, _mm256_loadu_pd(c0 + j));
        acc01 = _mm256_add_pd(acc01, _mm256_loadu_pd(c0 + j + 4));
        acc10 = _mm256_add_pd(acc10, _mm256_loadu_pd(c1 + j));
        acc11 = _mm256_add_pd(acc11, _mm256_loadu_pd(c1 + j + 4));
        acc20 = _mm256_add_pd(acc20, _mm256_loadu_pd(c2 + j));
        acc21 = _mm256_add_pd(acc21, _mm256_loadu_pd(c2 + j + 4));
        acc30 = _mm256_add_pd(acc30, _mm256_loadu_pd(c3 + j));
        acc31 = _mm256_add_pd(acc31, _mm256_loadu_pd(c3 + j + 4));
      }
      _mm256_storeu_pd(c0 + j, acc00);
      _mm256_storeu_pd(c0 + j + 4, acc01);
      _mm256_storeu_pd(c1 + j, acc10);
      _mm256_storeu_pd(c1 + j + 4, acc11);
      _mm256_storeu_pd(c2 + j, acc20);
      _mm256_storeu_pd(c2 + j + 4, acc21);
      _mm256_storeu_pd(c3 + j, acc30);
      _mm256_storeu_pd(c3 + j + 4, acc31);
    }
    // column remainder
    for (; j < n; ++j) {
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      for (int p = 0; p < k; ++p) {
        const double bv = b[static_cast<std::size_t>(p) * ldb + j];
        s0 += aval(i + 0, p) * bv;
        s1 += aval(i + 1, p) * bv;
        s2 += aval(i + 2, p) * bv;
        s3 += aval(i + 3, p) * bv;
      }
      c0[j] = accumulate ? c0[j] + s0 : s0;
      c1[j] = accumulate ? c1[j] + s1 : s1;
      c2[j] = accumulate ? c2[j] + s2 : s2;
      c3[j] = accumulate ? c3[j] + s3 : s3;
    }
  }
  // row remainder: one row at a time, still vectorized along n
  for (; i < m; ++i) {
    double* crow = c + static_cast<std::size_t>(i) * ldc;
    int j = 0;
    for (; j + 4 <= n; j += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (int p = 0; p < k; ++p) {
        const __m256d bv =
            _mm256_loadu_pd(b + static_cast<std::size_t>(p) * ldb + j);
        acc = _mm256_fmadd_pd(_mm256_set1_pd(aval(i, p)), bv, acc);
      }
      if (accumulate) acc = _mm256_add_pd(acc, _mm256_loadu_pd(crow + j));
      _mm256_storeu_pd(crow + j, acc);
    }
    for (; j < n; ++j) {
      double s = 0.0;
      for (int p = 0; p < k; ++p)
        s += aval(i, p) * b[static_cast<std::size_t>(p) * ldb + j];
      crow[j] = accumulate ? crow[j] + s : s;
    }
  }
}

void gemm_nn_avx2(int m, int n, int k, const double* a, int lda,
                  const double* b, int ldb, double* c, int ldc,
                  bool accumulate) {
  gemm_bcast_avx2<false>(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

void gemm_tn_avx2(int m, int n, int k, const double* a, int lda,
                  const double* b, int ldb, double* c, int ldc,
                  bool accumulate) {
  gemm_bcast_avx2<true>(m, n, k, a, lda, b, ldb, c, ldc, accumulate);
}

// C = A * B^T: rows of A against rows of B, dot products vectorized over k.
void gemm_nt_avx2(int m, int n, int k, const double* a, int lda,
                  const double* b, int ldb, double* c, int ldc,
                  bool accumulate) {
  int i = 0;
  for (; i + 2 <= m; i += 2) {
    const double* a0 = a + static_cast<std::size_t>(i) * lda;
    const double* a1 = a0 + lda;
    double* c0 = c + static_cast<std::size_t>(i) * ldc;
    double* c1 = c0 + ldc;
    int j = 0;
    for (; j + 2 <= n; j += 2) {
      const double* b0 = b + static_cast<std::size_t>(j) * ldb;
      const double* b1 = b0 + ldb;
      __m256d s00 = _mm256_setzero_pd(), s01 = _mm256_setzero_pd();
      __m256d s10 = _mm256_setzero_pd(), s11 = _mm256_setzero_pd();
      int p = 0;
      for (; p + 4 <= k; p += 4) {
        const __m256d va0 = _mm256_loadu_pd(a0 + p);
        const __m256d va1 = _mm256_loadu_pd(a1 + p);
        const __m256d vb0 = _mm256_loadu_pd(b0 + p);
        const __m256d vb1 = _mm256_loadu_pd(b1 + p);
        s00 = _mm256_fmadd_pd(va0, vb0, s00);
        s01 = _mm256_fmadd_pd(va0, vb1, s01);
        s10 = _mm256_fmadd_pd(va1, vb0, s10);
        s11 = _mm256_fmadd_pd(va1, vb1, s11);
      }
      double d00 = hsum(s00), d01 = hsum(s01), d10 = hsum(s10),
             d11 = hsum(s11);
      for (; p < k; ++p) {
        d00 += a0[p] * b0[p];
        d01 += a0[p] * b1[p];
        d10 += a1[p] * b0[p];
        d11 += a1[p] * b1[p];
      }
      c0[j] = accumulate ? c0[j] + d00 : d00;
      c0[j + 1] = accumulate ? c0[j + 1] + d01 : d01;
      c1[j] = accumulate ? c1[j] + d10 : d10;
      c1[j + 1] = accumulate ? c1[j + 1] + d11 : d11;
    }
    for (; j < n; ++j) {
      const double* brow = b + static_cast<std::size_t>(j) * ldb;
      __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
      int p = 0;
      for (; p + 4 <= k; p += 4) {
        const __m256d vb = _mm256_loadu_pd(brow + p);
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + p), vb, s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + p), vb, s1);
      }
      double d0 = hsum(s0), d1 = hsum(s1);
      for (; p < k; ++p) {
        d0 += a0[p] * brow[p];
        d1 += a1[p] * brow[p];
      }
      c0[j] = accumulate ? c0[j] + d0 : d0;
      c1[j] = accumulate ? c1[j] + d1 : d1;
    }
  }
  for (; i < m; ++i) {
    const double* arow = a + static_cast<std::size_t>(i) * lda;
    double* crow = c + static_cast<std::size_t>(i) * ldc;
    for (int j = 0; j < n; ++j) {
      const double* brow = b + static_cast<std::size_t>(j) * ldb;
      __m256d s = _mm256_setzero_pd();
      int p = 0;
      for (; p + 4 <= k; p += 4)
        s = _mm256_fmadd_pd(_mm256_loadu_pd(arow + p),
                            _mm256_loadu_pd(brow + p), s);
      double d = hsum(s);
      for (; p < k; ++p) d += arow[p] * brow[p];
      crow[j] = accumulate ? crow[j] + d : d;
    }
  }
}

void axpy_avx2(int n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy =
        _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(int n, double a, double* x) {
  const __m256d va = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void add_avx2(int n, const double* x, double* y) {
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += x[i];
}

double dot_avx2(int n, const double* x, const double* y) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                         _mm256_loadu_pd(y + i + 4), s1);
  }
  double acc = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_avx2(int n, const double* x) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_add_pd(s0, _mm256_loadu_pd(x + i));
    s1 = _mm256_add_pd(s1, _mm256_loadu_pd(x + i + 4));
  }
  double acc = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double sumsq_avx2(int n, const double* x) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(x + i);
    const __m256d v1 = _mm256_loadu_pd(x + i + 4);
    s0 = _mm256_fmadd_pd(v0, v0, s0);
    s1 = _mm256_fmadd_pd(v1, v1, s1);
  }
  double acc = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void relu_fwd_avx2(int n, const double* x, double* y) {
  const __m256d zero = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_bwd_avx2(int n, const double* x, const double* dy, double* dx) {
  const __m256d zero = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask =
        _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(dx + i, _mm256_and_pd(mask, _mm256_loadu_pd(dy + i)));
  }
  for (; i < n; ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

}  // namespace

const Ops& avx2_ops_table() {
  static const Ops ops{gemm_nn_avx2, gemm_nt_avx2, gemm_tn_avx2,
                       axpy_avx2,    scale_avx2,   add_avx2,
                       dot_avx2,     sum_avx2,     sumsq_avx2,
                       relu_fwd_avx2, relu_bwd_avx2, "avx2"};
  return ops;
}

}  // namespace aide::kernels

#endif  // x86-64
