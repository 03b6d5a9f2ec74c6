#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Low-level dense kernels. Matrices are column-major with explicit leading
// dimensions. Each entry point has a scalar reference and an AVX2+FMA variant;
// the variant is picked once at startup from cpuid and can be forced with the
// ANECE_KERNELS environment variable ("scalar" or "avx2").
namespace anece::kernels {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2 };

struct Table {
  // C(m x n) = A(m x k) * B(k x n)
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
                  const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc);
  // C(m x n) = A^H * B with A stored k x m
  void (*gemm_hn)(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
                  const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc);
  // C(m x n) = A * B^H with B stored n x k
  void (*gemm_nh)(std::size_t m, std::size_t n, std::size_t k, const cplx* a, std::size_t lda,
                  const cplx* b, std::size_t ldb, cplx* c, std::size_t ldc);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const Table& table(Backend b);
bool available(Backend b);

const Table& active();
Backend active_backend();
void select(Backend b);

std::string_view name(Backend b);

namespace detail {
extern const Table scalar_table;
const Table* avx2_table();  // nullptr when not compiled in
}  // namespace detail

}  // namespace anece::kernels
