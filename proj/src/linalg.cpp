#include "anece/linalg.hpp"

#include "anece/kernels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace anece {
namespace {

using EMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using EMap = Eigen::Map<EMat>;
using CEMap = Eigen::Map<const EMat>;

CEMap view(const CMatrix& a) {
  return CEMap(a.data(), static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
}

CMatrix from_eigen(const EMat& m) {
  CMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  EMap(out.data(), m.rows(), m.cols()) = m;
  return out;
}

void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols()) throw LinalgError(std::string(what) + ": matrix is not square");
}

void require_same_shape(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw LinalgError("shape mismatch");
}

// Indices that order `v` descending, ties kept in input order.
std::vector<std::size_t> descending_order(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  return idx;
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> column_major)
    : rows_(rows), cols_(cols), data_(std::move(column_major)) {
  if (data_.size() != rows * cols) throw LinalgError("entry count does not match dimensions");
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> d) {
  CMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMatrix CMatrix::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
  const std::size_t nr = rows.size();
  const std::size_t nc = nr ? rows.begin()->size() : 0;
  CMatrix m(nr, nc);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != nc) throw LinalgError("ragged row literal");
    std::size_t j = 0;
    for (const cplx& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) out(j, i) = std::conj((*this)(i, j));
  return out;
}

CMatrix CMatrix::transpose() const {
  CMatrix out(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) out(j, i) = (*this)(i, j);
  return out;
}

CMatrix CMatrix::conj() const {
  CMatrix out = *this;
  for (cplx& v : out.data_) v = std::conj(v);
  return out;
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw LinalgError("block out of range");
  CMatrix out(nr, nc);
  for (std::size_t j = 0; j < nc; ++j)
    std::copy_n(data_.data() + r0 + (c0 + j) * rows_, nr, out.data() + j * nr);
  return out;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw LinalgError("block out of range");
  for (std::size_t j = 0; j < b.cols(); ++j)
    std::copy_n(b.data() + j * b.rows(), b.rows(), data_.data() + r0 + (c0 + j) * rows_);
}

cplx CMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::squared_norm() const {
  const double* d = reinterpret_cast<const double*>(data_.data());
  return kernels::active().dot(d, d, 2 * data_.size());
}

double CMatrix::norm() const { return std::sqrt(squared_norm()); }

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  require_same_shape(*this, o);
  kernels::active().axpy(1.0, reinterpret_cast<const double*>(o.data()),
                         reinterpret_cast<double*>(data()), 2 * size());
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  require_same_shape(*this, o);
  kernels::active().axpy(-1.0, reinterpret_cast<const double*>(o.data()),
                         reinterpret_cast<double*>(data()), 2 * size());
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (cplx& v : data_) v *= s;
  return *this;
}

CMatrix& CMatrix::operator*=(double s) {
  for (cplx& v : data_) v *= s;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator-(CMatrix a) { return a *= -1.0; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
CMatrix operator*(CMatrix a, double s) { return a *= s; }
CMatrix operator*(double s, CMatrix a) { return a *= s; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw LinalgError("matmul: inner dimensions differ");
  CMatrix c(a.rows(), b.cols());
  if (c.empty()) return c;
  if (a.cols() == 0) return c;
  kernels::active().gemm_nn(a.rows(), b.cols(), a.cols(), a.data(), a.rows(), b.data(), b.rows(),
                            c.data(), c.rows());
  return c;
}

CMatrix mul_adj_left(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) throw LinalgError("mul_adj_left: inner dimensions differ");
  CMatrix c(a.cols(), b.cols());
  if (c.empty() || a.rows() == 0) return c;
  kernels::active().gemm_hn(a.cols(), b.cols(), a.rows(), a.data(), a.rows(), b.data(), b.rows(),
                            c.data(), c.rows());
  return c;
}

CMatrix mul_adj_right(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.cols()) throw LinalgError("mul_adj_right: inner dimensions differ");
  CMatrix c(a.rows(), b.rows());
  if (c.empty() || a.cols() == 0) return c;
  kernels::active().gemm_nh(a.rows(), b.rows(), a.cols(), a.data(), a.rows(), b.data(), b.rows(),
                            c.data(), c.rows());
  return c;
}

CMatrix gram(const CMatrix& a) { return hermitian_part(mul_adj_right(a, a)); }

cplx inner(const CMatrix& a, const CMatrix& b) {
  require_same_shape(a, b);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a.data()[i]) * b.data()[i];
  return acc;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ja = 0; ja < a.cols(); ++ja)
    for (std::size_t ia = 0; ia < a.rows(); ++ia) {
      const cplx s = a(ia, ja);
      for (std::size_t jb = 0; jb < b.cols(); ++jb)
        for (std::size_t ib = 0; ib < b.rows(); ++ib)
          out(ia * b.rows() + ib, ja * b.cols() + jb) = s * b(ib, jb);
    }
  return out;
}

CMatrix hermitian_part(const CMatrix& a) {
  require_square(a, "hermitian_part");
  CMatrix out(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return out;
}

CMatrix add_identity(CMatrix a, double s) {
  require_square(a, "add_identity");
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += s;
  return a;
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  double diff = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) diff += std::norm(a(i, j) - std::conj(a(j, i)));
  return std::sqrt(diff) <= rel_tol * std::max(a.norm(), 1e-300);
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

HermitianEig hermitian_evd(const CMatrix& a) {
  require_square(a, "hermitian_evd");
  if (!is_hermitian(a)) throw LinalgError("hermitian_evd: input is not Hermitian");
  const CMatrix h = hermitian_part(a);
  Eigen::SelfAdjointEigenSolver<EMat> es(view(h));
  if (es.info() != Eigen::Success) throw LinalgError("hermitian_evd: no convergence");
  const auto& ev = es.eigenvalues();
  std::vector<double> raw(ev.data(), ev.data() + ev.size());
  const auto order = descending_order(raw);
  HermitianEig out{CMatrix(a.rows(), a.rows()), std::vector<double>(raw.size())};
  const EMat& vecs = es.eigenvectors();
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.values[k] = raw[order[k]];
    for (std::size_t i = 0; i < a.rows(); ++i)
      out.vectors(i, k) = vecs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(order[k]));
  }
  return out;
}

Svd svd(const CMatrix& a, bool full) {
  const unsigned opts = full ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                             : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::JacobiSVD<EMat> s(view(a), opts);
  const auto& sv = s.singularValues();
  // JacobiSVD already returns descending values; keep the contract explicit.
  std::vector<double> raw(sv.data(), sv.data() + sv.size());
  const auto order = descending_order(raw);
  const EMat& u = s.matrixU();
  const EMat& v = s.matrixV();
  Svd out{from_eigen(u), std::vector<double>(raw.size()), from_eigen(v)};
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.s[k] = raw[order[k]];
    for (std::size_t i = 0; i < out.U.rows(); ++i)
      out.U(i, k) = u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(order[k]));
    for (std::size_t i = 0; i < out.V.rows(); ++i)
      out.V(i, k) = v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(order[k]));
  }
  return out;
}

std::size_t numerical_rank(const CMatrix& a, double rel_tol) {
  if (a.empty()) return 0;
  Eigen::JacobiSVD<EMat> s(view(a));
  const auto& sv = s.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > rel_tol * sv(0)) ++r;
  return r;
}

bool is_hpd(const CMatrix& a) {
  if (a.rows() != a.cols() || a.empty()) return false;
  Eigen::SelfAdjointEigenSolver<EMat> es(view(hermitian_part(a)), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double hi = ev.maxCoeff();
  const double lo = ev.minCoeff();
  return hi > 0.0 && lo > 1e-12 * hi;
}

namespace {

Eigen::LLT<EMat> checked_cholesky(const CMatrix& a, const char* what) {
  require_square(a, what);
  Eigen::LLT<EMat> llt(view(hermitian_part(a)));
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(std::string(what) + ": not positive definite");
  const auto diag = llt.matrixLLT().diagonal().real();
  const double lo = diag.minCoeff();
  const double hi = diag.maxCoeff();
  if (!(lo * lo > 1e-12 * hi * hi))
    throw NotPositiveDefinite(std::string(what) + ": numerically singular");
  return llt;
}

}  // namespace

CMatrix solve_hpd(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) throw LinalgError("solve_hpd: dimension mismatch");
  const auto llt = checked_cholesky(a, "solve_hpd");
  return from_eigen(llt.solve(view(b)));
}

double logdet_hpd(const CMatrix& a) {
  const auto llt = checked_cholesky(a, "logdet_hpd");
  const auto diag = llt.matrixLLT().diagonal().real();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) acc += 2.0 * std::log2(diag(i));
  return acc;
}

CMatrix solve(const CMatrix& a, const CMatrix& b) {
  require_square(a, "solve");
  if (a.rows() != b.rows()) throw LinalgError("solve: dimension mismatch");
  Eigen::PartialPivLU<EMat> lu(view(a));
  return from_eigen(lu.solve(view(b)));
}

double log2_abs_det(const CMatrix& a) {
  require_square(a, "log2_abs_det");
  Eigen::PartialPivLU<EMat> lu(view(a));
  const auto& m = lu.matrixLU();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) acc += std::log2(std::abs(m(i, i)));
  return acc;
}

CMatrix commutation(std::size_t p, std::size_t q) {
  CMatrix t(p * q, p * q);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < q; ++b) t(a * q + b, b * p + a) = 1.0;
  return t;
}

}  // namespace anece
