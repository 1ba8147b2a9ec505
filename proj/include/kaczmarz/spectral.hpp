#pragma once

// Spectral analysis of the restricted iteration operator: spectrum reports,
// zero eigenvalues from structural orthogonality, upper bounds on rho, the
// small-omega regime and the standard/symmetric relations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kaczmarz/errors.hpp"
#include "kaczmarz/linalg.hpp"
#include "kaczmarz/operator.hpp"

namespace kaczmarz {

inline constexpr double kNearDefectiveKappa = 1e12;

struct SpectrumReport {
  ComplexVector eigenvalues;  // descending modulus
  ComplexMatrix C;            // r x r eigenvectors of Gv (empty if not requested)
  ComplexMatrix W;            // n x r lifted eigenvectors V C (empty if not requested)
  double kappa_W = std::numeric_limits<double>::quiet_NaN();  // cond(C) = cond(W)
  double rho = 0.0;
  std::size_t zero_count = 0;
  double zero_tol = 1e-8;
  bool near_defective = false;
  bool top_is_complex_pair = false;
};

inline std::size_t count_zeros(const ComplexVector& ev, double zero_tol) {
  return static_cast<std::size_t>(
      std::count_if(ev.begin(), ev.end(), [&](const Complex& l) { return std::abs(l) <= zero_tol; }));
}

inline SpectrumReport spectrum(const RestrictedOperator& ro, double zero_tol = 1e-8,
                               bool with_vectors = true) {
  SpectrumReport sr;
  EigResult e = eig_general(ro.Gv, with_vectors);
  sr.eigenvalues = std::move(e.eigenvalues);
  sr.zero_tol = zero_tol;
  sr.rho = sr.eigenvalues.empty() ? 0.0 : std::abs(sr.eigenvalues.front());
  sr.zero_count = count_zeros(sr.eigenvalues, zero_tol);
  sr.top_is_complex_pair = !sr.eigenvalues.empty() && sr.eigenvalues.front().imag() != 0.0;
  if (with_vectors) {
    sr.C = std::move(e.eigenvectors);
    sr.W = matmul(to_complex(ro.V), sr.C);
    sr.kappa_W = e.kappa;
    sr.near_defective = !(e.kappa <= kNearDefectiveKappa);
  }
  return sr;
}

// ---------------------------------------------------------------------------
// Structural orthogonality

struct StructureReport {
  std::size_t leading_diag_block = 1;  // largest k with diagonal leading k x k block of A A^T
  std::size_t orth_pairs = 0;          // row pairs with disjoint supports
  std::size_t total_pairs = 0;
  double near_orth = 0.0;  // |a_1^T a_2|
};

/// Exact zeros of a_i^T a_j decided from the sparsity pattern: disjoint supports
/// give an exact zero, no floating-point dot product is involved.
inline StructureReport structural_orthogonality(const DenseMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols(), words = (n + 63) / 64;
  std::vector<std::uint64_t> bits(m * words, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (a(i, j) != 0.0) bits[i * words + j / 64] |= std::uint64_t{1} << (j % 64);

  auto disjoint = [&](const std::uint64_t* x, const std::uint64_t* y) {
    for (std::size_t w = 0; w < words; ++w)
      if (x[w] & y[w]) return false;
    return true;
  };

  StructureReport rep;
  std::vector<std::uint64_t> uni(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(words));
  std::size_t k = 1;
  while (k < m && disjoint(uni.data(), &bits[k * words])) {
    for (std::size_t w = 0; w < words; ++w) uni[w] |= bits[k * words + w];
    ++k;
  }
  rep.leading_diag_block = m == 0 ? 0 : k;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      ++rep.total_pairs;
      if (disjoint(&bits[i * words], &bits[j * words])) ++rep.orth_pairs;
    }
  if (m >= 2) rep.near_orth = std::abs(dot(a.row(0), a.row(1)));
  return rep;
}

// ---------------------------------------------------------------------------
// Bounds

struct BoundsReport {
  double omega = 1.0;
  double rho_actual = 0.0;
  double norm_G = 0.0;  // ||G|_V||
  double sigma_min = 0.0;
  double norm_L = 0.0;
  double bound_L = 0.0;   // 1 - sigma_min^2 / ||L||
  double nu = 0.0;        // lambda_min((L^-1 + L^-T) / 2)
  double bound_nu = 0.0;  // 1 - nu sigma_min^2
  std::optional<double> bf_bound;
  double be_bound = 0.0;
  bool assumption_met = false;  // rho attained by a simple, real, positive eigenvalue
};

/// nu(L^-1): the smallest eigenvalue of the symmetric part of L^-1, i.e. the
/// minimum real part of its field of values. Forms L^-1 explicitly (m^2 memory).
inline double nu_Linv(const LFactor& lf) {
  const std::size_t m = lf.L.rows();
  const DenseMatrix linv = solve_lower(lf.L, DenseMatrix::identity(m));
  DenseMatrix h(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) h(i, j) = 0.5 * (linv(i, j) + linv(j, i));
  return eig_symmetric(h).front();
}

/// kappa * |a_1^T a_2| * ||L_1^-1 e_1||, with L_1 the omega = 1 factor.
inline double bauer_fike_bound(const DenseMatrix& a, const LFactor& lf1, double kappa_X) {
  if (a.rows() < 2) return 0.0;
  Vector e1(a.rows(), 0.0);
  e1[0] = 1.0;
  return kappa_X * std::abs(dot(a.row(0), a.row(1))) * norm2(solve_lower(lf1.L, e1));
}

/// Condition number of the eigenvector matrix X of L_1^-1 A A^T.
inline double kappa_eigvec_L1inv_AAT(const DenseMatrix& a) {
  const LFactor lf1 = build_L(a, 1.0);
  const DenseMatrix m = solve_lower(lf1.L, matmul(a, a, Op::none, Op::transpose));
  return eig_general(m, true).kappa;
}

inline double backward_error_bound(const DenseMatrix& a, double omega) {
  if (!(omega > 0.0)) throw InvalidArgument("backward_error_bound: omega must be positive");
  double mx = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) mx = std::max(mx, dot(a.row(i), a.row(i)));
  return std::abs(1.0 - 1.0 / omega) * mx;
}

/// Approximation of kappa(lambda) for the zero eigenvalue at omega = 1, with
/// respect to perturbations of the second pencil argument. At omega = 1 the
/// pencil (A A^T, L_1) has eigenvalue 1 with right eigenvector e_1 and left
/// eigenvector e_m, so kappa = ||e_m|| ||e_1|| / |e_m^T L_1 e_1| = 1/|a_m^T a_1|.
/// Infinite when a_1 and a_m are orthogonal (multiple eigenvalue).
inline double kappa_zero_eigenvalue(const DenseMatrix& a) {
  if (a.rows() < 2) return 1.0 / dot(a.row(0), a.row(0));
  const double c = std::abs(dot(a.row(a.rows() - 1), a.row(0)));
  return c == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / c;
}

inline BoundsReport rho_bounds(const DenseMatrix& a, const SvdResult& s, const LFactor& lf,
                               const RestrictedOperator& ro, bool with_bauer_fike = false) {
  BoundsReport br;
  br.omega = lf.omega;
  const ComplexVector ev = eig_general(ro.Gv, false).eigenvalues;
  br.rho_actual = std::abs(ev.front());
  const double scale = std::max(br.rho_actual, 1e-300);
  br.assumption_met = ev.front().imag() == 0.0 && ev.front().real() > 0.0 &&
                      (ev.size() < 2 || std::abs(ev[1]) < br.rho_actual * (1.0 - 1e-12) ||
                       std::abs(ev[1] - ev.front()) > 1e-12 * scale);
  br.norm_G = spectral_norm(ro.Gv);
  br.sigma_min = s.S.back();
  br.norm_L = spectral_norm(lf.L);
  br.bound_L = 1.0 - br.sigma_min * br.sigma_min / br.norm_L;
  br.nu = nu_Linv(lf);
  br.bound_nu = 1.0 - br.nu * br.sigma_min * br.sigma_min;
  br.be_bound = backward_error_bound(a, lf.omega);
  if (with_bauer_fike) br.bf_bound = bauer_fike_bound(a, build_L(a, 1.0), kappa_eigvec_L1inv_AAT(a));
  return br;
}

// ---------------------------------------------------------------------------
// Small-omega regime

struct ScanPoint {
  double omega = 0.0;
  double rho = 0.0;
  double max_im = 0.0;
  std::size_t zero_count = 0;
  std::size_t n_nonpos_real = 0;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  double im_tol = 1e-3;
  // Largest scanned omega below the first omega whose spectrum has
  // max |Im| > im_tol. Empty if the first point already exceeds it; equal to
  // the last scanned omega if none does.
  std::optional<double> omega0;
};

inline ScanPoint scan_point(const DenseMatrix& a, const SvdResult& s, double omega, double zero_tol) {
  const RestrictedOperator ro = restrict_to_V(a, build_L(a, omega), s);
  const ComplexVector ev = eig_general(ro.Gv, false).eigenvalues;
  ScanPoint p;
  p.omega = omega;
  p.rho = std::abs(ev.front());
  p.zero_count = count_zeros(ev, zero_tol);
  for (const auto& l : ev) {
    p.max_im = std::max(p.max_im, std::abs(l.imag()));
    if (l.real() <= 0.0) ++p.n_nonpos_real;
  }
  return p;
}

inline ScanResult small_omega_scan(const DenseMatrix& a, const SvdResult& s,
                                   std::span<const double> omegas, double im_tol = 1e-3,
                                   double zero_tol = 1e-8) {
  for (double w : omegas)
    if (!(w > 0.0 && w < 2.0)) throw InvalidArgument("omega grid must lie in (0, 2)");
  if (!std::is_sorted(omegas.begin(), omegas.end()))
    throw InvalidArgument("omega grid must be ascending");
  ScanResult res;
  res.im_tol = im_tol;
  for (double w : omegas) res.points.push_back(scan_point(a, s, w, zero_tol));
  std::optional<double> prev;
  bool crossed = false;
  for (const auto& p : res.points) {
    if (p.max_im > im_tol) {
      res.omega0 = prev;
      crossed = true;
      break;
    }
    prev = p.omega;
  }
  if (!crossed) res.omega0 = prev;
  return res;
}

/// I - omega V^T A^T D^-1 A V: the part of Gv that is first order in omega.
inline DenseMatrix first_order_operator(const DenseMatrix& a, const SvdResult& s, double omega) {
  DenseMatrix av = matmul(a, s.V);
  DenseMatrix dav = av;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double di = dot(a.row(i), a.row(i));
    for (std::size_t j = 0; j < dav.cols(); ++j) dav(i, j) /= di;
  }
  DenseMatrix g = matmul(av, dav, Op::transpose);
  for (auto& x : g.values()) x *= -omega;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += 1.0;
  return g;
}

// ---------------------------------------------------------------------------
// Standard versus symmetric Kaczmarz

struct SymmetricRelations {
  double rho_G = 0.0;
  double rho_Gs = 0.0;
  double norm_G_sq = 0.0;
  double difference = 0.0;  // rho_Gs - ||G|_V||^2
  double max_all = 0.0;     // max(rho_G, rho_Gs, ||G|_V||)
};

inline SymmetricRelations symmetric_relations(const RestrictedOperator& ro_G,
                                              const RestrictedOperator& ro_Gs) {
  if (ro_G.kind != OperatorKind::standard || ro_Gs.kind != OperatorKind::symmetric)
    throw InvalidArgument("symmetric_relations: expected (standard, symmetric) operators");
  SymmetricRelations r;
  r.rho_G = std::abs(eig_general(ro_G.Gv, false).eigenvalues.front());
  r.rho_Gs = std::abs(eig_general(ro_Gs.Gv, false).eigenvalues.front());
  const double ng = spectral_norm(ro_G.Gv);
  r.norm_G_sq = ng * ng;
  r.difference = r.rho_Gs - r.norm_G_sq;
  r.max_all = std::max({r.rho_G, r.rho_Gs, ng});
  return r;
}

/// Bisection for the alpha at which ||[[d1, alpha], [0, d2]]|| = 1, with
/// 0 <= d2 <= d1 < 1; the norm is increasing in alpha.
inline double norm_threshold_2x2(double d1, double d2, double tol = 1e-10) {
  if (!(d1 < 1.0 && d2 < 1.0 && d1 >= 0.0 && d2 >= 0.0))
    throw InvalidArgument("norm_threshold_2x2: diagonal entries must lie in [0, 1)");
  auto norm = [&](double alpha) { return spectral_norm(DenseMatrix{{d1, alpha}, {0.0, d2}}); };
  double lo = 0.0, hi = 1.0;
  while (norm(hi) < 1.0) hi *= 2.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (norm(mid) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace kaczmarz
