#pragma once

// Iteration operators of Kaczmarz's method.
//
//   L   = strict lower triangle of A A^T + omega^-1 D,  D = diag(||a_i||^2)
//   G   = I - A^T L^-1 A            (standard sweep)
//   G^T = I - A^T L^-T A            (upward sweep)
//   G_s = G^T G = I - A^T S A,  S = (2/omega - 1) L^-T D L^-1   (symmetric)
//
// All dynamics from x0 = 0 live in V = range(A^T); the restricted operator is
// the r x r matrix V^T G V for the orthonormal basis V of the SVD.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"

namespace kaczmarz {

struct LFactor {
  DenseMatrix L;  // m x m lower triangular
  double omega = 1.0;
  Vector D_diag;  // ||a_i||^2
};

inline LFactor build_L(const DenseMatrix& a, double omega) {
  require_finite(a, "build_L");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidArgument("build_L: omega must be positive");
  const std::size_t m = a.rows();
  LFactor lf;
  lf.omega = omega;
  lf.D_diag.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    lf.D_diag[i] = dot(a.row(i), a.row(i));
    if (lf.D_diag[i] == 0.0) throw InvalidArgument("build_L: zero row " + std::to_string(i));
  }
  lf.L = matmul(a, a, Op::none, Op::transpose);
  for (std::size_t i = 0; i < m; ++i) {
    lf.L(i, i) = lf.D_diag[i] / omega;
    for (std::size_t j = i + 1; j < m; ++j) lf.L(i, j) = 0.0;
  }
  return lf;
}

namespace detail {
inline void check_apply(const LFactor& lf, const DenseMatrix& a, std::span<const double> x) {
  if (lf.L.rows() != a.rows() || x.size() != a.cols())
    throw InvalidArgument("operator apply: dimension mismatch");
}
}  // namespace detail

inline Vector apply_G(const LFactor& lf, const DenseMatrix& a, std::span<const double> x) {
  detail::check_apply(lf, a, x);
  return subtract(x, matvec_t(a, solve_lower(lf.L, matvec(a, x))));
}

inline Vector apply_Gt(const LFactor& lf, const DenseMatrix& a, std::span<const double> x) {
  detail::check_apply(lf, a, x);
  return subtract(x, matvec_t(a, solve_lower_transposed(lf.L, matvec(a, x))));
}

inline Vector apply_Gs(const LFactor& lf, const DenseMatrix& a, std::span<const double> x) {
  return apply_Gt(lf, a, apply_G(lf, a, x));
}

/// y -> S y with S = (2/omega - 1) L^-T D L^-1.
inline Vector apply_S(const LFactor& lf, std::span<const double> y) {
  Vector z = solve_lower(lf.L, y);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] *= lf.D_diag[i];
  z = solve_lower_transposed(lf.L, z);
  const double c = 2.0 / lf.omega - 1.0;
  for (auto& v : z) v *= c;
  return z;
}

/// Dense n x n G (or G^T G). For small problems and tests only.
inline DenseMatrix dense_G(const LFactor& lf, const DenseMatrix& a, bool symmetric = false) {
  const std::size_t n = a.cols();
  DenseMatrix g = DenseMatrix::identity(n);
  DenseMatrix y = solve_lower(lf.L, a);  // L^-1 A
  if (symmetric) {
    for (std::size_t i = 0; i < y.rows(); ++i)
      for (std::size_t j = 0; j < n; ++j) y(i, j) *= lf.D_diag[i];
    y = solve_lower(lf.L, std::move(y), Op::transpose);
    const double c = 2.0 / lf.omega - 1.0;
    for (auto& v : y.values()) v *= c;
  }
  const DenseMatrix aty = matmul(a, y, Op::transpose);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) -= aty(i, j);
  return g;
}

enum class OperatorKind { standard, symmetric };

struct RestrictedOperator {
  DenseMatrix Gv;  // r x r
  DenseMatrix V;   // n x r orthonormal basis of range(A^T)
  double omega = 1.0;
  OperatorKind kind = OperatorKind::standard;
  std::size_t rank() const noexcept { return Gv.rows(); }
};

namespace detail {

// M A V with M = L^-1 (standard) or S (symmetric); m x r.
inline DenseMatrix weighted_AV(const DenseMatrix& a, const LFactor& lf, const DenseMatrix& v,
                               OperatorKind kind) {
  DenseMatrix y = solve_lower(lf.L, matmul(a, v));
  if (kind == OperatorKind::symmetric) {
    for (std::size_t i = 0; i < y.rows(); ++i)
      for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) *= lf.D_diag[i];
    y = solve_lower(lf.L, std::move(y), Op::transpose);
    const double c = 2.0 / lf.omega - 1.0;
    for (auto& x : y.values()) x *= c;
  }
  return y;
}

}  // namespace detail

/// Gv = V^T G V = I - (A V)^T (M A V), with M = L^-1 or S.
inline RestrictedOperator restrict_to_V(const DenseMatrix& a, const LFactor& lf, const SvdResult& s,
                                        OperatorKind kind = OperatorKind::standard) {
  if (s.V.rows() != a.cols() || lf.L.rows() != a.rows())
    throw InvalidArgument("restrict_to_V: SVD or L from a different matrix");
  const DenseMatrix av = matmul(a, s.V);
  const DenseMatrix may = detail::weighted_AV(a, lf, s.V, kind);
  RestrictedOperator ro;
  ro.Gv = matmul(av, may, Op::transpose);
  for (auto& x : ro.Gv.values()) x = -x;
  for (std::size_t i = 0; i < ro.Gv.rows(); ++i) ro.Gv(i, i) += 1.0;
  ro.V = s.V;
  ro.omega = lf.omega;
  ro.kind = kind;
  return ro;
}

/// P = V^T A^T M (r x m): maps data to the right-hand side of the restricted
/// fixed-point equation (I - Gv) y = P b.
inline DenseMatrix data_map(const DenseMatrix& a, const LFactor& lf, const DenseMatrix& v,
                            OperatorKind kind) {
  // V^T A^T L^-1 = (L^-T A V)^T; V^T A^T S = (S A V)^T because S is symmetric.
  DenseMatrix y;
  if (kind == OperatorKind::standard)
    y = solve_lower(lf.L, matmul(a, v), Op::transpose);
  else
    y = detail::weighted_AV(a, lf, v, kind);
  return y.transpose();
}

/// Limit of the iteration from x0 = 0: V (I - Gv)^-1 V^T A^T M b. For
/// consistent b this is the least-norm solution; for noisy b it is the
/// Kaczmarz limit.
inline Vector kaczmarz_limit(const DenseMatrix& a, const LFactor& lf, const SvdResult& s,
                             std::span<const double> b, OperatorKind kind = OperatorKind::standard) {
  if (b.size() != a.rows()) throw InvalidArgument("kaczmarz_limit: dimension mismatch");
  const RestrictedOperator ro = restrict_to_V(a, lf, s, kind);
  const Vector rhs = matvec(data_map(a, lf, s.V, kind), b);
  DenseMatrix ig = ro.Gv;
  for (auto& x : ig.values()) x = -x;
  for (std::size_t i = 0; i < ig.rows(); ++i) ig(i, i) += 1.0;
  Vector y;
  try {
    y = lu_solve<double>(ig, std::span<const double>(rhs));
  } catch (const NumericalError&) {
    throw NumericalError("non-convergent mode");
  }
  return matvec(s.V, y);
}

inline Vector fixed_point(const DenseMatrix& a, std::span<const double> b, double omega = 1.0,
                          std::optional<double> rank_tol = std::nullopt) {
  return kaczmarz_limit(a, build_L(a, omega), svd(a, rank_tol), b);
}

/// Fixed-point map A# and truncated maps A_k# = (I - G^k) A# through the
/// eigendecomposition Gv = C Lambda C^-1, W = V C.
class SharpMaps {
 public:
  SharpMaps(const DenseMatrix& a, const LFactor& lf, const SvdResult& s,
            OperatorKind kind = OperatorKind::standard)
      : ro_(restrict_to_V(a, lf, s, kind)), P_(data_map(a, lf, s.V, kind)) {
    const std::size_t r = ro_.rank();
    I_minus_Gv_ = ro_.Gv;
    for (auto& x : I_minus_Gv_.values()) x = -x;
    for (std::size_t i = 0; i < r; ++i) I_minus_Gv_(i, i) += 1.0;

    EigResult e = eig_general(ro_.Gv, true);
    lambda_ = std::move(e.eigenvalues);
    C_ = std::move(e.eigenvectors);
    kappa_ = e.kappa;
    for (const auto& l : lambda_)
      if (std::abs(1.0 - l) <= 1e-14) throw NumericalError("non-convergent mode");
    // Xi = diag(1/(1 - lambda)) C^-1 P
    Xi_ = lu_solve(C_, to_complex(P_));
    for (std::size_t i = 0; i < r; ++i) {
      const Complex f = 1.0 / (1.0 - lambda_[i]);
      for (std::size_t j = 0; j < Xi_.cols(); ++j) Xi_(i, j) *= f;
    }
  }

  const RestrictedOperator& restricted() const noexcept { return ro_; }
  const ComplexVector& eigenvalues() const noexcept { return lambda_; }
  const ComplexMatrix& C() const noexcept { return C_; }
  const ComplexMatrix& Xi() const noexcept { return Xi_; }
  const DenseMatrix& P() const noexcept { return P_; }
  double kappa() const noexcept { return kappa_; }
  std::size_t rank() const noexcept { return ro_.rank(); }
  std::size_t m() const noexcept { return P_.cols(); }
  std::size_t n() const noexcept { return ro_.V.rows(); }

  /// A# e via a linear solve with I - Gv.
  Vector apply_A_sharp(std::span<const double> e) const {
    return matvec(ro_.V, coords_A_sharp(e));
  }

  /// xi = W^-1 A# e (coordinates in the eigenbasis).
  ComplexVector xi(std::span<const double> e) const {
    check(e);
    const ComplexVector ec(e.begin(), e.end());
    return matvec(Xi_, ec);
  }

  /// (I - G^k) A# e = W (I - Lambda^k) W^-1 A# e.
  Vector apply_Ak_sharp(std::span<const double> e, std::size_t k) const {
    ComplexVector z = xi(e);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] *= 1.0 - std::pow(lambda_[i], static_cast<int>(k));
    const ComplexVector y = matvec(C_, z);
    Vector yr(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yr[i] = y[i].real();
    return matvec(ro_.V, yr);
  }

  /// Same map evaluated with k powers of Gv instead of the eigenbasis.
  Vector apply_Ak_sharp_power(std::span<const double> e, std::size_t k) const {
    const Vector y = coords_A_sharp(e);
    Vector g = y;
    for (std::size_t j = 0; j < k; ++j) g = matvec(ro_.Gv, g);
    return matvec(ro_.V, subtract(y, g));
  }

 private:
  void check(std::span<const double> e) const {
    if (e.size() != P_.cols()) throw InvalidArgument("SharpMaps: data vector has wrong length");
  }
  Vector coords_A_sharp(std::span<const double> e) const {
    check(e);
    const Vector rhs = matvec(P_, e);
    return lu_solve<double>(I_minus_Gv_, std::span<const double>(rhs));
  }

  RestrictedOperator ro_;
  DenseMatrix P_;
  DenseMatrix I_minus_Gv_;
  ComplexVector lambda_;
  ComplexMatrix C_;
  ComplexMatrix Xi_;
  double kappa_ = 0.0;
};

/// The five equivalent convergence conditions. Each radius is the quantity
/// that must be below 1 (for (e): max |mu - 1| over the pencil spectrum).
struct ConvergenceConditions {
  double rho_a = 0.0, rho_b = 0.0, rho_c = 0.0, rho_d = 0.0, rho_e = 0.0;
  bool a = false, b = false, c = false, d = false, e = false;
  bool all_agree() const noexcept { return a == b && b == c && c == d && d == e; }
};

namespace detail {

// Drops the `count` entries closest to `anchor` (the null-space part).
inline ComplexVector drop_closest(ComplexVector v, std::size_t count, Complex anchor) {
  std::stable_sort(v.begin(), v.end(), [&](const Complex& x, const Complex& y) {
    return std::abs(x - anchor) < std::abs(y - anchor);
  });
  v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(count, v.size())));
  return v;
}

inline double max_dist(const ComplexVector& v, Complex c) {
  double r = 0.0;
  for (const auto& x : v) r = std::max(r, std::abs(x - c));
  return r;
}

}  // namespace detail

/// (a) rho of (A^T L^-1 A - I) on V; (b) L^-1 A A^T - I on U; (c) A A^T L^-1 - I
/// on L U; (d) pencil (A A^T - L, L) on U; (e) pencil (A A^T, L) inside the
/// unit disk shifted by 1. The m - r eigenvalues belonging to null(A^T) are
/// removed from the m x m problems.
inline ConvergenceConditions convergence_conditions(const DenseMatrix& a, double omega,
                                                    const SvdResult& s) {
  const LFactor lf = build_L(a, omega);
  const std::size_t m = a.rows(), r = s.rank(), null_dim = m - r;
  ConvergenceConditions cc;

  const RestrictedOperator ro = restrict_to_V(a, lf, s);
  const ComplexVector ev_a = eig_general(ro.Gv, false).eigenvalues;
  cc.rho_a = std::abs(ev_a.front());

  const DenseMatrix aat = matmul(a, a, Op::none, Op::transpose);
  const DenseMatrix linv_aat = solve_lower(lf.L, aat);
  const ComplexVector ev_b = detail::drop_closest(eig_general(linv_aat, false).eigenvalues, null_dim, 0.0);
  cc.rho_b = detail::max_dist(ev_b, 1.0);

  // A A^T L^-1 = (L^-T A A^T)^T
  const DenseMatrix aat_linv = solve_lower(lf.L, aat, Op::transpose).transpose();
  const ComplexVector ev_c = detail::drop_closest(eig_general(aat_linv, false).eigenvalues, null_dim, 0.0);
  cc.rho_c = detail::max_dist(ev_c, 1.0);

  DenseMatrix aat_minus_l = aat;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) aat_minus_l(i, j) -= lf.L(i, j);
  const ComplexVector ev_d =
      detail::drop_closest(generalized_eigenvalues(aat_minus_l, lf.L), null_dim, -1.0);
  cc.rho_d = detail::max_dist(ev_d, 0.0);

  const ComplexVector ev_e = detail::drop_closest(generalized_eigenvalues(aat, lf.L), null_dim, 0.0);
  cc.rho_e = detail::max_dist(ev_e, 1.0);

  cc.a = cc.rho_a < 1.0;
  cc.b = cc.rho_b < 1.0;
  cc.c = cc.rho_c < 1.0;
  cc.d = cc.rho_d < 1.0;
  cc.e = cc.rho_e < 1.0;
  return cc;
}

}  // namespace kaczmarz
