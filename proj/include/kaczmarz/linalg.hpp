#pragma once

// Dense linear-algebra substrate. Storage is row-major; the heavy kernels
// (SVD, nonsymmetric eigenproblem, GEMM, TRSM) are delegated to LAPACK/BLAS.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#ifndef LAPACK_COMPLEX_CPP
#define LAPACK_COMPLEX_CPP
#endif
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#endif
#include <cblas.h>
#include <lapacke.h>

#include "kaczmarz/errors.hpp"

namespace kaczmarz {

using Complex = std::complex<double>;
using Vector = std::vector<double>;
using ComplexVector = std::vector<Complex>;

template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw InvalidArgument("Matrix: data size does not match dimensions");
  }
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InvalidArgument("Matrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<T> col(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  void set_col(std::size_t j, std::span<const T> c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using DenseMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;

// ---------------------------------------------------------------------------
// Vector helpers

inline double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline double norm2(std::span<const Complex> x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return std::sqrt(s);
}

inline Vector subtract(std::span<const double> x, std::span<const double> y) {
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

inline Vector add(std::span<const double> x, std::span<const double> y) {
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
  return r;
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline Vector scaled(double a, std::span<const double> x) {
  Vector r(x.begin(), x.end());
  for (auto& v : r) v *= a;
  return r;
}

inline bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

inline void require_finite(const DenseMatrix& a, const char* what) {
  if (a.rows() == 0 || a.cols() == 0)
    throw InvalidArgument(std::string(what) + ": empty matrix");
  if (!all_finite(a.values())) throw InvalidArgument(std::string(what) + ": non-finite entries");
}

inline double frobenius_norm(const DenseMatrix& a) { return norm2(a.values()); }
inline double frobenius_norm(const ComplexMatrix& a) { return norm2(a.values()); }

// y = A x
inline Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw InvalidArgument("matvec: dimension mismatch");
  Vector y(a.rows(), 0.0);
  cblas_dgemv(CblasRowMajor, CblasNoTrans, static_cast<int>(a.rows()), static_cast<int>(a.cols()),
              1.0, a.data(), static_cast<int>(a.cols()), x.data(), 1, 0.0, y.data(), 1);
  return y;
}

// y = A^T x
inline Vector matvec_t(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) throw InvalidArgument("matvec_t: dimension mismatch");
  Vector y(a.cols(), 0.0);
  cblas_dgemv(CblasRowMajor, CblasTrans, static_cast<int>(a.rows()), static_cast<int>(a.cols()),
              1.0, a.data(), static_cast<int>(a.cols()), x.data(), 1, 0.0, y.data(), 1);
  return y;
}

inline ComplexVector matvec(const ComplexMatrix& a, std::span<const Complex> x) {
  if (x.size() != a.cols()) throw InvalidArgument("matvec: dimension mismatch");
  ComplexVector y(a.rows());
  const Complex one{1.0, 0.0}, zero{0.0, 0.0};
  cblas_zgemv(CblasRowMajor, CblasNoTrans, static_cast<int>(a.rows()), static_cast<int>(a.cols()),
              &one, a.data(), static_cast<int>(a.cols()), x.data(), 1, &zero, y.data(), 1);
  return y;
}

enum class Op { none, transpose };

// C = op(A) op(B)
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, Op op_a = Op::none,
                          Op op_b = Op::none) {
  const std::size_t m = op_a == Op::none ? a.rows() : a.cols();
  const std::size_t k = op_a == Op::none ? a.cols() : a.rows();
  const std::size_t kb = op_b == Op::none ? b.rows() : b.cols();
  const std::size_t n = op_b == Op::none ? b.cols() : b.rows();
  if (k != kb) throw InvalidArgument("matmul: inner dimensions differ");
  DenseMatrix c(m, n);
  if (m == 0 || n == 0) return c;
  cblas_dgemm(CblasRowMajor, op_a == Op::none ? CblasNoTrans : CblasTrans,
              op_b == Op::none ? CblasNoTrans : CblasTrans, static_cast<int>(m),
              static_cast<int>(n), static_cast<int>(k), 1.0, a.data(), static_cast<int>(a.cols()),
              b.data(), static_cast<int>(b.cols()), 0.0, c.data(), static_cast<int>(n));
  return c;
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidArgument("matmul: inner dimensions differ");
  ComplexMatrix c(a.rows(), b.cols());
  const Complex one{1.0, 0.0}, zero{0.0, 0.0};
  cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(a.rows()),
              static_cast<int>(b.cols()), static_cast<int>(a.cols()), &one, a.data(),
              static_cast<int>(a.cols()), b.data(), static_cast<int>(b.cols()), &zero, c.data(),
              static_cast<int>(b.cols()));
  return c;
}

inline ComplexMatrix to_complex(const DenseMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.values().size(); ++i) c.data()[i] = a.data()[i];
  return c;
}

// ---------------------------------------------------------------------------
// Triangular solves

namespace detail {
inline void check_triangular_diag(const DenseMatrix& l) {
  if (l.rows() != l.cols()) throw InvalidArgument("triangular solve: matrix not square");
  for (std::size_t i = 0; i < l.rows(); ++i)
    if (l(i, i) == 0.0) throw NumericalError("singular triangular factor");
}
}  // namespace detail

/// Forward substitution for L x = b, L lower triangular (entries above the
/// diagonal are ignored).
inline Vector solve_lower(const DenseMatrix& l, std::span<const double> b) {
  detail::check_triangular_diag(l);
  if (b.size() != l.rows()) throw InvalidArgument("solve_lower: dimension mismatch");
  const std::size_t n = l.rows();
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = l.row(i);
    double s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= li[j] * x[j];
    x[i] = s / li[i];
  }
  return x;
}

/// Back substitution for U x = b, U upper triangular.
inline Vector solve_upper(const DenseMatrix& u, std::span<const double> b) {
  detail::check_triangular_diag(u);
  if (b.size() != u.rows()) throw InvalidArgument("solve_upper: dimension mismatch");
  const std::size_t n = u.rows();
  Vector x(b.begin(), b.end());
  for (std::size_t ii = n; ii-- > 0;) {
    const auto ui = u.row(ii);
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= ui[j] * x[j];
    x[ii] = s / ui[ii];
  }
  return x;
}

/// Solves L^T x = b for lower-triangular L without forming L^T.
inline Vector solve_lower_transposed(const DenseMatrix& l, std::span<const double> b) {
  detail::check_triangular_diag(l);
  if (b.size() != l.rows()) throw InvalidArgument("solve_lower_transposed: dimension mismatch");
  const std::size_t n = l.rows();
  Vector x(b.begin(), b.end());
  for (std::size_t ii = n; ii-- > 0;) {
    x[ii] /= l(ii, ii);
    const auto li = l.row(ii);
    for (std::size_t j = 0; j < ii; ++j) x[j] -= li[j] * x[ii];
  }
  return x;
}

/// Solves op(L) X = B column-wise for a lower-triangular L (BLAS trsm).
inline DenseMatrix solve_lower(const DenseMatrix& l, DenseMatrix b, Op op = Op::none) {
  detail::check_triangular_diag(l);
  if (b.rows() != l.rows()) throw InvalidArgument("solve_lower: dimension mismatch");
  if (b.cols() == 0) return b;
  cblas_dtrsm(CblasRowMajor, CblasLeft, CblasLower, op == Op::none ? CblasNoTrans : CblasTrans,
              CblasNonUnit, static_cast<int>(b.rows()), static_cast<int>(b.cols()), 1.0, l.data(),
              static_cast<int>(l.cols()), b.data(), static_cast<int>(b.cols()));
  return b;
}

// ---------------------------------------------------------------------------
// SVD

struct SvdResult {
  DenseMatrix U;  // m x r
  Vector S;       // r values, nonincreasing, positive
  DenseMatrix V;  // n x r
  double rank_tol = 0.0;
  std::size_t rank() const noexcept { return S.size(); }
};

/// Relative rank cut used when none is supplied: max(m, n) * eps.
inline double default_rank_tol(std::size_t m, std::size_t n) {
  return static_cast<double>(std::max(m, n)) * std::numeric_limits<double>::epsilon();
}

/// All min(m, n) singular values, nonincreasing.
inline Vector singular_values(const DenseMatrix& a) {
  require_finite(a, "singular_values");
  DenseMatrix work = a;
  const auto m = static_cast<lapack_int>(a.rows()), n = static_cast<lapack_int>(a.cols());
  Vector s(static_cast<std::size_t>(std::min(m, n)));
  const lapack_int info = LAPACKE_dgesdd(LAPACK_ROW_MAJOR, 'N', m, n, work.data(), n, s.data(),
                                         nullptr, m, nullptr, n);
  if (info != 0) throw NumericalError("singular_values: dgesdd failed to converge");
  return s;
}

inline Vector singular_values(const ComplexMatrix& a) {
  ComplexMatrix work = a;
  const auto m = static_cast<lapack_int>(a.rows()), n = static_cast<lapack_int>(a.cols());
  Vector s(static_cast<std::size_t>(std::min(m, n)));
  const lapack_int info = LAPACKE_zgesdd(LAPACK_ROW_MAJOR, 'N', m, n, work.data(), n, s.data(),
                                         nullptr, m, nullptr, n);
  if (info != 0) throw NumericalError("singular_values: zgesdd failed to converge");
  return s;
}

inline double spectral_norm(const DenseMatrix& a) { return singular_values(a).front(); }

/// 2-norm condition number; infinity for a numerically singular matrix.
template <class T>
double condition_number(const Matrix<T>& a) {
  const Vector s = singular_values(a);
  if (s.back() == 0.0) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

/// Thin SVD truncated at rank_tol * sigma_max (relative cut). When rank_tol is
/// not given, default_rank_tol(m, n) is used.
inline SvdResult svd(const DenseMatrix& a, std::optional<double> rank_tol = std::nullopt) {
  require_finite(a, "svd");
  const std::size_t m = a.rows(), n = a.cols(), p = std::min(m, n);
  const double tol = rank_tol.value_or(default_rank_tol(m, n));
  if (tol < 0.0) throw InvalidArgument("svd: rank_tol must be nonnegative");

  DenseMatrix work = a;
  Vector s(p);
  DenseMatrix u(m, p), vt(p, n);
  const lapack_int info = LAPACKE_dgesdd(
      LAPACK_ROW_MAJOR, 'S', static_cast<lapack_int>(m), static_cast<lapack_int>(n), work.data(),
      static_cast<lapack_int>(n), s.data(), u.data(), static_cast<lapack_int>(p), vt.data(),
      static_cast<lapack_int>(n));
  if (info != 0) throw NumericalError("svd: dgesdd failed to converge");
  if (s.front() == 0.0) throw NumericalError("rank zero");

  std::size_t r = 0;
  while (r < p && s[r] > tol * s.front()) ++r;
  if (r == 0) throw NumericalError("rank zero");

  SvdResult out;
  out.rank_tol = tol;
  out.S.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(r));
  out.U = DenseMatrix(m, r);
  out.V = DenseMatrix(n, r);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < r; ++j) out.U(i, j) = u(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < r; ++j) out.V(i, j) = vt(j, i);
  return out;
}

// ---------------------------------------------------------------------------
// Eigenproblems

struct EigResult {
  ComplexVector eigenvalues;  // descending modulus
  ComplexMatrix eigenvectors;  // column j pairs with eigenvalues[j]; empty if not requested
  double kappa = std::numeric_limits<double>::quiet_NaN();  // 2-norm cond of eigenvectors
};

/// Deterministic ordering: descending modulus, then descending real part, then
/// ascending imaginary part.
inline bool eigen_order(const Complex& a, const Complex& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() < b.imag();
}

/// General real eigenproblem (LAPACK dgeev). Eigenvectors are unit 2-norm.
inline EigResult eig_general(const DenseMatrix& m, bool want_vectors = true) {
  require_finite(m, "eig_general");
  if (m.rows() != m.cols()) throw InvalidArgument("eig_general: matrix not square");
  const auto n = static_cast<lapack_int>(m.rows());
  DenseMatrix work = m;
  Vector wr(m.rows()), wi(m.rows());
  DenseMatrix vr(want_vectors ? m.rows() : 1, want_vectors ? m.cols() : 1);
  double dummy = 0.0;
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', want_vectors ? 'V' : 'N', n, work.data(), n, wr.data(),
                    wi.data(), &dummy, n, vr.data(), n);
  if (info != 0) throw NumericalError("eig_general: dgeev failed to converge");

  const std::size_t sz = m.rows();
  ComplexVector values(sz);
  for (std::size_t i = 0; i < sz; ++i) values[i] = {wr[i], wi[i]};

  ComplexMatrix vectors;
  if (want_vectors) {
    vectors = ComplexMatrix(sz, sz);
    for (std::size_t j = 0; j < sz;) {
      if (wi[j] == 0.0) {
        for (std::size_t i = 0; i < sz; ++i) vectors(i, j) = vr(i, j);
        ++j;
      } else {
        // Conjugate pair stored as (re, im) in columns j, j+1.
        for (std::size_t i = 0; i < sz; ++i) {
          vectors(i, j) = {vr(i, j), vr(i, j + 1)};
          vectors(i, j + 1) = {vr(i, j), -vr(i, j + 1)};
        }
        j += 2;
      }
    }
  }

  std::vector<std::size_t> order(sz);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eigen_order(values[a], values[b]); });

  EigResult out;
  out.eigenvalues.resize(sz);
  for (std::size_t k = 0; k < sz; ++k) out.eigenvalues[k] = values[order[k]];
  if (want_vectors) {
    out.eigenvectors = ComplexMatrix(sz, sz);
    for (std::size_t k = 0; k < sz; ++k)
      for (std::size_t i = 0; i < sz; ++i) out.eigenvectors(i, k) = vectors(i, order[k]);
    out.kappa = condition_number(out.eigenvectors);
  }
  return out;
}

/// Eigenvalues of a symmetric matrix (lower triangle referenced), ascending.
inline Vector eig_symmetric(const DenseMatrix& m) {
  require_finite(m, "eig_symmetric");
  if (m.rows() != m.cols()) throw InvalidArgument("eig_symmetric: matrix not square");
  DenseMatrix work = m;
  Vector w(m.rows());
  const auto n = static_cast<lapack_int>(m.rows());
  const lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'L', n, work.data(), n, w.data());
  if (info != 0) throw NumericalError("eig_symmetric: dsyevd failed to converge");
  return w;
}

/// Generalized eigenvalues of the pencil (A, B): A x = mu B x (LAPACK dggev).
/// Infinite eigenvalues (beta == 0) are returned as complex infinity.
inline ComplexVector generalized_eigenvalues(const DenseMatrix& a, const DenseMatrix& b) {
  require_finite(a, "generalized_eigenvalues");
  require_finite(b, "generalized_eigenvalues");
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw InvalidArgument("generalized_eigenvalues: dimension mismatch");
  const auto n = static_cast<lapack_int>(a.rows());
  DenseMatrix wa = a, wb = b;
  Vector ar(a.rows()), ai(a.rows()), beta(a.rows());
  double dummy = 0.0;
  const lapack_int info = LAPACKE_dggev(LAPACK_ROW_MAJOR, 'N', 'N', n, wa.data(), n, wb.data(), n,
                                        ar.data(), ai.data(), beta.data(), &dummy, n, &dummy, n);
  if (info != 0) throw NumericalError("generalized_eigenvalues: dggev failed");
  ComplexVector mu(a.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mu.size(); ++i)
    mu[i] = beta[i] == 0.0 ? Complex{inf, 0.0} : Complex{ar[i] / beta[i], ai[i] / beta[i]};
  std::sort(mu.begin(), mu.end(), eigen_order);
  return mu;
}

// ---------------------------------------------------------------------------
// Dense solves

/// Solves A X = B by LU with partial pivoting. Throws NumericalError when A is
/// singular to working precision (reciprocal condition below eps).
template <class T>
Matrix<T> lu_solve(const Matrix<T>& a, Matrix<T> b) {
  if (a.rows() != a.cols() || b.rows() != a.rows())
    throw InvalidArgument("lu_solve: dimension mismatch");
  const auto n = static_cast<lapack_int>(a.rows());
  Matrix<T> lu = a;
  std::vector<lapack_int> piv(a.rows());
  double anorm = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double colsum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) colsum += std::abs(a(i, j));
    anorm = std::max(anorm, colsum);
  }
  lapack_int info = 0;
  double rcond = 0.0;
  if constexpr (std::is_same_v<T, double>) {
    info = LAPACKE_dgetrf(LAPACK_ROW_MAJOR, n, n, lu.data(), n, piv.data());
    if (info == 0) LAPACKE_dgecon(LAPACK_ROW_MAJOR, '1', n, lu.data(), n, anorm, &rcond);
  } else {
    info = LAPACKE_zgetrf(LAPACK_ROW_MAJOR, n, n, lu.data(), n, piv.data());
    if (info == 0) LAPACKE_zgecon(LAPACK_ROW_MAJOR, '1', n, lu.data(), n, anorm, &rcond);
  }
  if (info > 0 || rcond < std::numeric_limits<double>::epsilon())
    throw NumericalError("lu_solve: matrix is singular to working precision");
  const auto nrhs = static_cast<lapack_int>(b.cols());
  if constexpr (std::is_same_v<T, double>) {
    info = LAPACKE_dgetrs(LAPACK_ROW_MAJOR, 'N', n, nrhs, lu.data(), n, piv.data(), b.data(), nrhs);
  } else {
    info = LAPACKE_zgetrs(LAPACK_ROW_MAJOR, 'N', n, nrhs, lu.data(), n, piv.data(), b.data(), nrhs);
  }
  if (info != 0) throw NumericalError("lu_solve: getrs failed");
  return b;
}

template <class T>
std::vector<T> lu_solve(const Matrix<T>& a, std::span<const T> b) {
  Matrix<T> rhs(b.size(), 1, std::vector<T>(b.begin(), b.end()));
  Matrix<T> x = lu_solve(a, std::move(rhs));
  return {x.data(), x.data() + x.rows()};
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
  return lu_solve(a, Matrix<T>::identity(a.rows()));
}

// ---------------------------------------------------------------------------
// Least-norm solution

struct LeastNormResult {
  Vector x;
  double residual_norm = 0.0;     // ||A x - b||
  bool consistent = true;         // residual within the consistency tolerance
};

/// x = V diag(S)^-1 U^T b. `consistent` is false when the part of b outside
/// range(U) exceeds sqrt(eps)-level relative size (noisy or inconsistent b).
inline LeastNormResult least_norm_solution(const DenseMatrix& a, std::span<const double> b,
                                           const SvdResult& s) {
  if (b.size() != a.rows()) throw InvalidArgument("least_norm_solution: dimension mismatch");
  const Vector utb = matvec_t(s.U, b);
  Vector y(utb.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = utb[i] / s.S[i];
  LeastNormResult out;
  out.x = matvec(s.V, y);
  const Vector r = subtract(matvec(a, out.x), b);
  out.residual_norm = norm2(r);
  const double bn = norm2(b);
  out.consistent = out.residual_norm <= 1e-8 * std::max(bn, 1e-300);
  return out;
}

inline LeastNormResult least_norm_solution(const DenseMatrix& a, std::span<const double> b,
                                           std::optional<double> rank_tol = std::nullopt) {
  return least_norm_solution(a, b, svd(a, rank_tol));
}

}  // namespace kaczmarz
