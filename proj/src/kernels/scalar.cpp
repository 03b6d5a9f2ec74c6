#include "anece/kernels.hpp"

namespace anece::kernels {
namespace {

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
             const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    cplx* cj = c + j * ldc;
    for (std::size_t i = 0; i < m; ++i) cj[i] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const cplx s = b[p + j * ldb];
      const cplx* ap = a + p * lda;
      for (std::size_t i = 0; i < m; ++i) cj[i] += ap[i] * s;
    }
  }
}

void gemm_hn(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
             const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    const cplx* bj = b + j * ldb;
    for (std::size_t i = 0; i < m; ++i) {
      const cplx* ai = a + i * lda;
      cplx acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += std::conj(ai[p]) * bj[p];
      c[i + j * ldc] = acc;
    }
  }
}

void gemm_nh(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
             const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    cplx* cj = c + j * ldc;
    for (std::size_t i = 0; i < m; ++i) cj[i] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const cplx s = std::conj(b[j + p * ldb]);
      const cplx* ap = a + p * lda;
      for (std::size_t i = 0; i < m; ++i) cj[i] += ap[i] * s;
    }
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

namespace detail {
const Table scalar_table{gemm_nn, gemm_hn, gemm_nh, dot, axpy};
}

}  // namespace anece::kernels
