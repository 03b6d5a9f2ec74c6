#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace anece {

using cplx = std::complex<double>;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public LinalgError {
 public:
  using LinalgError::LinalgError;
};

// Dense complex matrix, column-major.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> column_major);

  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const double> d);
  // Row-major literal, convenient for small fixed matrices.
  static CMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  std::span<cplx> values() { return data_; }
  std::span<const cplx> values() const { return data_; }
  std::span<const cplx> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conj() const;

  CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const CMatrix& b);
  CMatrix rows_range(std::size_t r0, std::size_t nr) const { return block(r0, 0, nr, cols_); }
  CMatrix cols_range(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }

  cplx trace() const;
  double squared_norm() const;  // Frobenius, squared
  double norm() const;          // Frobenius

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cplx s);
  CMatrix& operator*=(double s);

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a);
CMatrix operator*(CMatrix a, cplx s);
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(CMatrix a, double s);
CMatrix operator*(double s, CMatrix a);
CMatrix operator*(const CMatrix& a, const CMatrix& b);

CMatrix mul_adj_left(const CMatrix& a, const CMatrix& b);   // a^H b
CMatrix mul_adj_right(const CMatrix& a, const CMatrix& b);  // a b^H
CMatrix gram(const CMatrix& a);                             // a a^H, exactly Hermitian
cplx inner(const CMatrix& a, const CMatrix& b);             // tr(a^H b)

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix hermitian_part(const CMatrix& a);  // (a + a^H) / 2
CMatrix add_identity(CMatrix a, double s);  // a + s I
bool is_hermitian(const CMatrix& a, double rel_tol = 1e-12);
double max_abs_diff(const CMatrix& a, const CMatrix& b);

struct HermitianEig {
  CMatrix vectors;              // columns are eigenvectors
  std::vector<double> values;   // descending
};
// Rejects input that is not Hermitian to 1e-12 relative.
HermitianEig hermitian_evd(const CMatrix& a);

struct Svd {
  CMatrix U;
  std::vector<double> s;  // descending
  CMatrix V;
};
// Thin by default; full=true returns square U and V.
Svd svd(const CMatrix& a, bool full = false);

// Singular values above rel_tol * sigma_max.
std::size_t numerical_rank(const CMatrix& a, double rel_tol = 1e-9);

// Positive-definiteness criterion: lambda_min > 1e-12 * lambda_max.
bool is_hpd(const CMatrix& a);

// Solves A X = B for Hermitian positive-definite A (symmetrized first).
CMatrix solve_hpd(const CMatrix& a, const CMatrix& b);
// log2 |A| for Hermitian positive-definite A.
double logdet_hpd(const CMatrix& a);

// General square solve by partial-pivot LU.
CMatrix solve(const CMatrix& a, const CMatrix& b);
// log2 |det A| for a general square matrix.
double log2_abs_det(const CMatrix& a);

// Permutation T with T^T (X kron Y) T = Y kron X for X p x p, Y q x q.
CMatrix commutation(std::size_t p, std::size_t q);

}  // namespace anece
