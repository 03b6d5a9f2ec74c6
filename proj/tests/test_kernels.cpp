#include "anece/kernels.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cstdlib>
#include <string>
#include <vector>

using namespace anece;
using namespace anece::testing;

namespace {

using Gemm = decltype(kernels::Table::gemm_nn);

// Column-major storage with a padded leading dimension.
struct Strided {
  std::size_t rows, cols, ld;
  std::vector<cplx> data;
  Strided(Rng& rng, std::size_t r, std::size_t c, std::size_t pad) : rows(r), cols(c), ld(r + pad), data(ld * c) {
    for (auto& v : data) v = complex_normal(rng);
  }
};

std::vector<cplx> run(Gemm g, std::size_t m, std::size_t n, std::size_t k, const Strided& a, const Strided& b,
                      std::size_t ldc) {
  std::vector<cplx> c(ldc * n, cplx(7.0, -7.0));
  g(m, n, k, a.data.data(), a.ld, b.data.data(), b.ld, c.data(), ldc);
  return c;
}

double max_diff(const std::vector<cplx>& x, const std::vector<cplx>& y) {
  double d = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) d = std::max(d, std::abs(x[k] - y[k]));
  return d;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("scalar gemm matches the matrix product definition") {
    Rng rng(1);
    const Strided a(rng, 3, 4, 2);
    const Strided b(rng, 4, 5, 1);
    const auto c = run(kernels::table(kernels::Backend::scalar).gemm_nn, 3, 5, 4, a, b, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        cplx ref = 0.0;
        for (std::size_t l = 0; l < 4; ++l) ref += a.data[i + l * a.ld] * b.data[l + j * b.ld];
        CHECK(std::abs(c[i + j * 3] - ref) < 1e-13);
      }
  }

  TEST_CASE("adjoint variants agree with explicit adjoints") {
    Rng rng(2);
    const auto& t = kernels::table(kernels::Backend::scalar);
    const Strided a(rng, 4, 3, 0);  // used as A^H: 3 x 4
    const Strided b(rng, 4, 2, 0);
    const auto c = run(t.gemm_hn, 3, 2, 4, a, b, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        cplx ref = 0.0;
        for (std::size_t l = 0; l < 4; ++l) ref += std::conj(a.data[l + i * 4]) * b.data[l + j * 4];
        CHECK(std::abs(c[i + j * 3] - ref) < 1e-13);
      }
    const Strided x(rng, 3, 4, 0);
    const Strided y(rng, 2, 4, 0);  // used as Y^H: 4 x 2
    const auto d = run(t.gemm_nh, 3, 2, 4, x, y, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        cplx ref = 0.0;
        for (std::size_t l = 0; l < 4; ++l) ref += x.data[i + l * 3] * std::conj(y.data[j + l * 2]);
        CHECK(std::abs(d[i + j * 3] - ref) < 1e-13);
      }
  }

  TEST_CASE("avx2 kernels agree with the scalar reference") {
    if (!kernels::available(kernels::Backend::avx2)) return;
    const auto& s = kernels::table(kernels::Backend::scalar);
    const auto& v = kernels::table(kernels::Backend::avx2);
    Rng rng(3);
    for (std::size_t m : {1u, 2u, 3u, 7u, 12u})
      for (std::size_t n : {1u, 4u, 9u})
        for (std::size_t k : {1u, 5u, 8u}) {
          const Strided a(rng, m, k, 1);
          const Strided b(rng, k, n, 2);
          CHECK(max_diff(run(s.gemm_nn, m, n, k, a, b, m + 3), run(v.gemm_nn, m, n, k, a, b, m + 3)) < 1e-12);
          const Strided ah(rng, k, m, 1);
          CHECK(max_diff(run(s.gemm_hn, m, n, k, ah, b, m), run(v.gemm_hn, m, n, k, ah, b, m)) < 1e-12);
          const Strided bh(rng, n, k, 2);
          CHECK(max_diff(run(s.gemm_nh, m, n, k, a, bh, m), run(v.gemm_nh, m, n, k, a, bh, m)) < 1e-12);
        }
    std::normal_distribution<double> nd;
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u}) {
      std::vector<double> x(n), y(n);
      for (auto& e : x) e = nd(rng);
      for (auto& e : y) e = nd(rng);
      CHECK(s.dot(x.data(), y.data(), n) == doctest::Approx(v.dot(x.data(), y.data(), n)).epsilon(1e-13));
      auto ys = y;
      auto yv = y;
      s.axpy(0.37, x.data(), ys.data(), n);
      v.axpy(0.37, x.data(), yv.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(ys[i] == doctest::Approx(yv[i]).epsilon(1e-15));
    }
  }

  TEST_CASE("environment override and explicit selection") {
    if (const char* env = std::getenv("ANECE_KERNELS"); env && std::string(env) == "scalar")
      CHECK(kernels::active_backend() == kernels::Backend::scalar);
    const auto before = kernels::active_backend();
    kernels::select(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    CHECK(kernels::name(kernels::Backend::scalar) == "scalar");
    kernels::select(before);
    CHECK(kernels::active_backend() == before);
  }
}
