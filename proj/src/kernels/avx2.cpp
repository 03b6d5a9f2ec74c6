#include "anece/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define ANECE_HAVE_AVX2 1
#include <immintrin.h>
#endif

namespace anece::kernels {

#ifdef ANECE_HAVE_AVX2
namespace {

#define ANECE_AVX2 __attribute__((target("avx2,fma")))

// Register tile: R vectors of two complex values each. conj_b selects B^H.
template <int R, bool ConjB>
ANECE_AVX2 inline void column_tile(std::size_t k, const cplx* a, std::size_t lda, const cplx* bcol,
                                   std::size_t bstride, cplx* c) {
  __m256d re[R];
  __m256d im[R];
  for (int t = 0; t < R; ++t) {
    re[t] = _mm256_setzero_pd();
    im[t] = _mm256_setzero_pd();
  }
  for (std::size_t p = 0; p < k; ++p) {
    const cplx s = bcol[p * bstride];
    const __m256d sr = _mm256_set1_pd(s.real());
    const __m256d si = _mm256_set1_pd(ConjB ? -s.imag() : s.imag());
    const double* ap = reinterpret_cast<const double*>(a + p * lda);
    for (int t = 0; t < R; ++t) {
      const __m256d v = _mm256_loadu_pd(ap + 4 * t);
      re[t] = _mm256_fmadd_pd(v, sr, re[t]);
      im[t] = _mm256_fmadd_pd(_mm256_permute_pd(v, 0b0101), si, im[t]);
    }
  }
  double* out = reinterpret_cast<double*>(c);
  for (int t = 0; t < R; ++t) _mm256_storeu_pd(out + 4 * t, _mm256_addsub_pd(re[t], im[t]));
}

template <bool ConjB>
ANECE_AVX2 void gemm_columns(std::size_t m, std::size_t n, std::size_t k, const cplx* a,
                             std::size_t lda, const cplx* b, std::size_t b_row_stride,
                             std::size_t b_col_stride, cplx* c, std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    const cplx* bcol = b + j * b_col_stride;
    cplx* cj = c + j * ldc;
    std::size_t i = 0;
    for (; i + 8 <= m; i += 8) column_tile<4, ConjB>(k, a + i, lda, bcol, b_row_stride, cj + i);
    for (; i + 2 <= m; i += 2) column_tile<1, ConjB>(k, a + i, lda, bcol, b_row_stride, cj + i);
    if (i < m) {
      cplx acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const cplx s = bcol[p * b_row_stride];
        acc += a[i + p * lda] * (ConjB ? std::conj(s) : s);
      }
      cj[i] = acc;
    }
  }
}

ANECE_AVX2 void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const cplx* a,
                        std::size_t lda, const cplx* b, std::size_t ldb, cplx* c,
                        std::size_t ldc) {
  gemm_columns<false>(m, n, k, a, lda, b, 1, ldb, c, ldc);
}

ANECE_AVX2 void gemm_nh(std::size_t m, std::size_t n, std::size_t k, const cplx* a,
                        std::size_t lda, const cplx* b, std::size_t ldb, cplx* c,
                        std::size_t ldc) {
  gemm_columns<true>(m, n, k, a, lda, b, ldb, 1, c, ldc);
}

ANECE_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

ANECE_AVX2 cplx conj_dot(const cplx* x, const cplx* y, std::size_t k) {
  __m256d prod = _mm256_setzero_pd();   // [xr*yr, xi*yi, ...]
  __m256d cross = _mm256_setzero_pd();  // [xr*yi, xi*yr, ...]
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  std::size_t p = 0;
  for (; p + 2 <= k; p += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * p);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * p);
    prod = _mm256_fmadd_pd(xv, yv, prod);
    cross = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), cross);
  }
  const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
  cplx acc(hsum(prod), hsum(_mm256_mul_pd(cross, sign)));
  for (; p < k; ++p) acc += std::conj(x[p]) * y[p];
  return acc;
}

ANECE_AVX2 void gemm_hn(std::size_t m, std::size_t n, std::size_t k, const cplx* a,
                        std::size_t lda, const cplx* b, std::size_t ldb, cplx* c,
                        std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) c[i + j * ldc] = conj_dot(a + i * lda, b + j * ldb, k);
}

ANECE_AVX2 double dot(const double* x, const double* y, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  double acc = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

ANECE_AVX2 void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

#undef ANECE_AVX2

const Table avx2{gemm_nn, gemm_hn, gemm_nh, dot, axpy};

}  // namespace

namespace detail {
const Table* avx2_table() { return &avx2; }
}  // namespace detail

#else

namespace detail {
const Table* avx2_table() { return nullptr; }
}  // namespace detail

#endif

}  // namespace anece::kernels
