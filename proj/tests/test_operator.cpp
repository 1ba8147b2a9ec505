#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace kaczmarz;
using testutil::random_matrix;
using testutil::random_vector;

namespace {

DenseMatrix column_apply(const DenseMatrix& a, const LFactor& lf,
                         Vector (*op)(const LFactor&, const DenseMatrix&, std::span<const double>)) {
  const std::size_t n = a.cols();
  DenseMatrix g(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector e(n, 0.0);
    e[j] = 1.0;
    g.set_col(j, op(lf, a, e));
  }
  return g;
}

double max_abs_diff(const DenseMatrix& x, const DenseMatrix& y) {
  double d = 0.0;
  for (std::size_t k = 0; k < x.values().size(); ++k) d = std::max(d, std::abs(x.values()[k] - y.values()[k]));
  return d;
}

ComplexVector nonzero(const ComplexVector& v, double tol) {
  ComplexVector out;
  for (const auto& x : v)
    if (std::abs(x) > tol) out.push_back(x);
  return out;
}

}  // namespace

TEST(BuildL, OrthogonalRowsGiveDiagonal) {
  const DenseMatrix a = testutil::orthogonal_rows(5, 9, 1);
  const LFactor lf = build_L(a, 1.0);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      EXPECT_NEAR(lf.L(i, j), i == j ? lf.D_diag[i] : 0.0, 1e-15);
}

TEST(BuildL, TwoRowDefinition) {
  const DenseMatrix a{{1, 2, 0}, {3, -1, 4}};
  const LFactor lf = build_L(a, 1.0);
  EXPECT_DOUBLE_EQ(lf.L(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(lf.L(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(lf.L(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(lf.L(1, 1), 26.0);
}

TEST(BuildL, SymmetricPartIdentity) {
  const DenseMatrix a = random_matrix(9, 6, 2);
  const double w = 0.5;
  const LFactor lf = build_L(a, w);
  const DenseMatrix aat = testutil::naive_matmul(a, a.transpose());
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 9; ++j) {
      const double expected = aat(i, j) + (i == j ? (2.0 / w - 1.0) * lf.D_diag[i] : 0.0);
      EXPECT_NEAR(lf.L(i, j) + lf.L(j, i), expected, 1e-12 * (1 + std::abs(expected)));
    }
}

TEST(BuildL, SymmetricPartPositiveDefinite) {
  const DenseMatrix a = random_matrix(12, 7, 3);
  for (double w : {0.1, 0.9, 1.5, 1.95}) {
    const LFactor lf = build_L(a, w);
    DenseMatrix s(12, 12);
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j) s(i, j) = lf.L(i, j) + lf.L(j, i);
    EXPECT_GT(eig_symmetric(s).front(), 0.0) << "omega " << w;
  }
}

TEST(BuildL, Errors) {
  EXPECT_THROW(build_L(DenseMatrix{{1, 0}, {0, 0}}, 1.0), InvalidArgument);
  EXPECT_THROW(build_L(DenseMatrix{{1, 0}}, 0.0), InvalidArgument);
  EXPECT_NO_THROW(build_L(DenseMatrix{{1, 0}}, 3.0));
}

TEST(ApplyG, NullSpaceUnchanged) {
  const DenseMatrix a = random_matrix(4, 7, 4);
  const SvdResult s = svd(a);
  // Component of a random vector orthogonal to range(A^T).
  Vector x = random_vector(7, 5);
  const Vector proj = matvec(s.V, matvec_t(s.V, x));
  x = subtract(x, proj);
  const Vector gx = apply_G(build_L(a, 1.3), a, x);
  EXPECT_LT(norm2(subtract(gx, x)), 1e-13 * norm2(x));
}

TEST(ApplyG, ZeroEigenvectorsAtOmegaOne) {
  const std::vector<TestProblem> problems{gravity(64, 0.03), baart(32), paralleltomo(16, 16, 16)};
  for (const auto& p : problems) {
    const LFactor lf = build_L(p.A, 1.0);
    const Vector a1(p.A.row(0).begin(), p.A.row(0).end());
    const Vector am(p.A.row(p.m() - 1).begin(), p.A.row(p.m() - 1).end());
    EXPECT_LE(norm2(apply_G(lf, p.A, a1)), 1e-12 * norm2(a1)) << p.name;
    EXPECT_LE(norm2(apply_Gt(lf, p.A, am)), 1e-12 * norm2(am)) << p.name;
  }
}

TEST(ApplyG, ErrorRecursionMatchesSweeps) {
  const DenseMatrix a = random_matrix(15, 10, 6);
  const Vector xbar = random_vector(10, 7);
  const Vector b = matvec(a, xbar);
  const LFactor lf = build_L(a, 0.8);
  Vector x(10, 0.0), f = scaled(-1.0, xbar);
  for (int k = 0; k < 5; ++k) {
    x = sweep_standard(a, b, x, 0.8);
    f = apply_G(lf, a, f);
    EXPECT_LT(norm2(subtract(subtract(x, xbar), f)), 1e-10 * norm2(xbar));
  }
}

TEST(ApplyGt, AdjointIdentity) {
  const DenseMatrix a = random_matrix(11, 8, 8);
  const LFactor lf = build_L(a, 1.4);
  const Vector x = random_vector(8, 9), y = random_vector(8, 10);
  const double lhs = dot(apply_Gt(lf, a, x), y), rhs = dot(x, apply_G(lf, a, y));
  EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(lhs)));
}

TEST(ApplyGt, UpsweepOnErrors) {
  // Symmetric sweep error = G^T G error.
  const DenseMatrix a = random_matrix(9, 9, 11);
  const Vector xbar = random_vector(9, 12);
  const Vector b = matvec(a, xbar);
  const LFactor lf = build_L(a, 1.2);
  const Vector x0 = random_vector(9, 13);
  const Vector x1 = sweep_symmetric(a, b, x0, 1.2);
  const Vector f1 = apply_Gs(lf, a, subtract(x0, xbar));
  EXPECT_LT(norm2(subtract(subtract(x1, xbar), f1)), 1e-10 * norm2(x0));
}

TEST(ApplyGt, CompositionMatchesClosedForm) {
  const DenseMatrix a = random_matrix(7, 10, 14);
  for (double w : {0.6, 1.0, 1.6}) {
    const LFactor lf = build_L(a, w);
    const DenseMatrix composed = column_apply(a, lf, apply_Gs);
    // Independent closed form I - (2/w - 1) A^T L^-T D L^-1 A.
    const DenseMatrix linv = testutil::gauss_jordan_inverse(lf.L);
    DenseMatrix dl = linv;
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j) dl(i, j) *= lf.D_diag[i];
    const DenseMatrix s = testutil::naive_matmul(linv.transpose(), dl);
    DenseMatrix gs = testutil::naive_matmul(testutil::naive_matmul(a.transpose(), s), a);
    for (auto& v : gs.values()) v *= -(2.0 / w - 1.0);
    for (std::size_t i = 0; i < 10; ++i) gs(i, i) += 1.0;
    EXPECT_LT(max_abs_diff(composed, gs), 1e-10);
    EXPECT_LT(max_abs_diff(dense_G(lf, a, true), gs), 1e-10);
    EXPECT_LT(max_abs_diff(dense_G(lf, a), column_apply(a, lf, apply_G)), 1e-12);
  }
}

TEST(Restriction, FullRankSquareKeepsSpectrum) {
  const DenseMatrix a = random_matrix(8, 8, 15);
  const LFactor lf = build_L(a, 0.9);
  const SvdResult s = svd(a);
  ASSERT_EQ(s.rank(), 8u);
  const ComplexVector gv = eig_general(restrict_to_V(a, lf, s).Gv, false).eigenvalues;
  const ComplexVector g = eig_general(dense_G(lf, a), false).eigenvalues;
  EXPECT_LT(testutil::multiset_distance(gv, g), 1e-10);
}

TEST(Restriction, RankDeficientDropsUnitEigenvalues) {
  // Duplicate column: null(A) is one-dimensional, G carries an extra eigenvalue 1.
  DenseMatrix base = random_matrix(6, 5, 16);
  DenseMatrix a(6, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 5; ++j) a(i, j) = base(i, j);
    a(i, 5) = base(i, 0);
  }
  const LFactor lf = build_L(a, 1.1);
  const SvdResult s = svd(a);
  ASSERT_EQ(s.rank(), 5u);
  const ComplexVector full = eig_general(dense_G(lf, a), false).eigenvalues;
  const ComplexVector restricted = eig_general(restrict_to_V(a, lf, s).Gv, false).eigenvalues;
  std::size_t ones_full = 0, ones_restricted = 0;
  for (const auto& l : full) ones_full += std::abs(l - 1.0) < 1e-10;
  for (const auto& l : restricted) ones_restricted += std::abs(l - 1.0) < 1e-10;
  EXPECT_EQ(ones_full, 1u);
  EXPECT_EQ(ones_restricted, 0u);
  ComplexVector full_minus_one;
  bool removed = false;
  for (const auto& l : full) {
    if (!removed && std::abs(l - 1.0) < 1e-10) {
      removed = true;
      continue;
    }
    full_minus_one.push_back(l);
  }
  EXPECT_LT(testutil::multiset_distance(full_minus_one, restricted), 1e-10);
}

TEST(Restriction, GravityRho) {
  const TestProblem p = gravity(128, 0.02);
  const ComplexVector ev =
      eig_general(restrict_to_V(p.A, build_L(p.A, 1.0), svd(p.A)).Gv, false).eigenvalues;
  const double gap = 1.0 - std::abs(ev.front());
  EXPECT_GT(gap, 0.5e-4);
  EXPECT_LT(gap, 2e-4);
}

TEST(Restriction, RhoBelowOneForGeneratedProblems) {
  const std::vector<TestProblem> problems{gravity(64, 0.05), baart(32), paralleltomo(12, 12, 12)};
  for (const auto& p : problems) {
    const SvdResult s = svd(p.A);
    for (double w : {0.1, 0.5, 1.0, 1.5, 1.9}) {
      const LFactor lf = build_L(p.A, w);
      for (auto kind : {OperatorKind::standard, OperatorKind::symmetric}) {
        const double rho = std::abs(eig_general(restrict_to_V(p.A, lf, s, kind).Gv, false).eigenvalues.front());
        // Rounding can push rho a few ulps past 1 on severely ill-conditioned problems.
        EXPECT_LT(rho, 1.0 + 1e-12) << p.name << " omega " << w;
      }
    }
  }
}

TEST(Lemma, NonzeroSpectraOfProductsAgree) {
  for (auto [m, n] : {std::pair{8, 5}, std::pair{5, 8}}) {
    const DenseMatrix a = random_matrix(m, n, 17 + m);
    const LFactor lf = build_L(a, 1.0);
    const DenseMatrix linv = testutil::gauss_jordan_inverse(lf.L);
    const DenseMatrix atla = testutil::naive_matmul(testutil::naive_matmul(a.transpose(), linv), a);
    const DenseMatrix laat = testutil::naive_matmul(linv, testutil::naive_matmul(a, a.transpose()));
    const ComplexVector x = nonzero(eig_general(atla, false).eigenvalues, 1e-10);
    const ComplexVector y = nonzero(eig_general(laat, false).eigenvalues, 1e-10);
    ASSERT_EQ(x.size(), static_cast<std::size_t>(std::min(m, n)));
    EXPECT_LT(testutil::multiset_distance(x, y), 1e-8);
  }
}

TEST(Conditions, EquivalentOnBattery) {
  std::vector<DenseMatrix> mats{random_matrix(6, 6, 20), random_matrix(8, 5, 21), random_matrix(5, 8, 22),
                                gravity(24, 0.05).A, testutil::orthogonal_rows(4, 6, 23)};
  // Rank-deficient: repeated row.
  DenseMatrix rep = random_matrix(6, 4, 24);
  for (std::size_t j = 0; j < 4; ++j) rep(5, j) = rep(1, j);
  mats.push_back(rep);
  for (const auto& a : mats) {
    const SvdResult s = svd(a);
    for (double w : {0.05, 0.5, 1.0, 1.5, 1.99, 2.01, 2.5, 4.0}) {
      const ConvergenceConditions cc = convergence_conditions(a, w, s);
      EXPECT_TRUE(cc.all_agree()) << a.rows() << "x" << a.cols() << " omega " << w << ": " << cc.rho_a
                                  << ' ' << cc.rho_b << ' ' << cc.rho_c << ' ' << cc.rho_d << ' '
                                  << cc.rho_e;
      EXPECT_EQ(cc.a, w < 2.0) << "omega " << w;
    }
  }
}

TEST(FixedPoint, ZeroData) {
  const TestProblem p = gravity(16, 0.1);
  const Vector x = fixed_point(p.A, Vector(16, 0.0));
  EXPECT_EQ(norm2(x), 0.0);
}

TEST(FixedPoint, MatchesLeastNormAndIsOmegaIndependent) {
  const TestProblem p = gravity(32, 0.06);
  const Vector xs = least_norm_solution(p.A, p.b_bar).x;
  EXPECT_LT(testutil::rel_diff(fixed_point(p.A, p.b_bar, 1.0), xs), 1e-8);
  EXPECT_LT(testutil::rel_diff(fixed_point(p.A, p.b_bar, 0.7), fixed_point(p.A, p.b_bar, 1.3)), 1e-8);
}

TEST(FixedPoint, NoisyLimitMatchesLongRun) {
  const DenseMatrix a = random_matrix(10, 6, 25);
  const Vector b = random_vector(10, 26);  // inconsistent
  const Vector limit = fixed_point(a, b, 0.9);
  SweepIterator it(a, b, {0.9, SweepVariant::standard, 0});
  for (int k = 0; k < 3000; ++k) it.step();
  EXPECT_LT(testutil::rel_diff(it.x(), limit), 1e-8);
}

TEST(SharpMaps, BoundaryIterationCounts) {
  const DenseMatrix a = random_matrix(9, 7, 27);
  const LFactor lf = build_L(a, 1.2);
  const SharpMaps sm(a, lf, svd(a));
  const Vector e = random_vector(9, 28);
  EXPECT_LT(norm2(sm.apply_Ak_sharp(e, 0)), 1e-14);
  // One sweep from x0 = 0 with data e.
  const Vector one = sweep_standard(a, e, Vector(7, 0.0), 1.2);
  EXPECT_LT(testutil::rel_diff(sm.apply_Ak_sharp(e, 1), one), 1e-8);
  // Several sweeps, both evaluation routes.
  SweepIterator it(a, e, {1.2, SweepVariant::standard, 0});
  for (std::size_t k = 1; k <= 12; ++k) {
    it.step();
    EXPECT_LT(testutil::rel_diff(sm.apply_Ak_sharp(e, k), it.x()), 1e-8) << k;
    EXPECT_LT(testutil::rel_diff(sm.apply_Ak_sharp_power(e, k), it.x()), 1e-8) << k;
  }
  EXPECT_LT(testutil::rel_diff(sm.apply_Ak_sharp(e, 4000), sm.apply_A_sharp(e)), 1e-8);
}

TEST(SharpMaps, ConsistentDataGivesLeastNorm) {
  const DenseMatrix a = random_matrix(6, 10, 29);
  const Vector b = matvec(a, random_vector(10, 30));
  const SharpMaps sm(a, build_L(a, 1.0), svd(a));
  EXPECT_LT(testutil::rel_diff(sm.apply_A_sharp(b), least_norm_solution(a, b).x), 1e-10);
}

TEST(SharpMaps, SymmetricKind) {
  const DenseMatrix a = random_matrix(8, 6, 31);
  const Vector e = random_vector(8, 32);
  const SharpMaps sm(a, build_L(a, 0.7), svd(a), OperatorKind::symmetric);
  SweepIterator it(a, e, {0.7, SweepVariant::symmetric, 0});
  for (std::size_t k = 1; k <= 6; ++k) {
    it.step();
    EXPECT_LT(testutil::rel_diff(sm.apply_Ak_sharp(e, k), it.x()), 1e-8) << k;
  }
}
