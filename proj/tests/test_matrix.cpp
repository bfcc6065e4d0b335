#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sics/matrix.hpp"

using namespace sics;

namespace {

SymMatrix mat2(double a, double b, double c) {
  Dense d(2, 2);
  d << a, b, b, c;
  return SymMatrix::from_dense(d);
}

} // namespace

TEST(SymMatrix, WritesMirror) {
  SymMatrix m(3);
  m.set(0, 2, 1.5);
  EXPECT_EQ(m(2, 0), 1.5);
  m.add(2, 0, 0.5);
  EXPECT_EQ(m(0, 2), 2.0);
  m.add(1, 1, 3.0);
  EXPECT_EQ(m(1, 1), 3.0);
}

TEST(SymMatrix, FromDenseRejectsAsymmetryAndNonFinite) {
  Dense d(2, 2);
  d << 1, 2, 3, 1;
  EXPECT_THROW(SymMatrix::from_dense(d), InvalidInput);
  d << 1, NAN, NAN, 1;
  EXPECT_THROW(SymMatrix::from_dense(d), InvalidInput);
  EXPECT_THROW(SymMatrix::from_dense(Dense(2, 3)), InvalidInput);
}

TEST(Coord, ColumnMajorOrderAndIndex) {
  const Coord a{0, 2}, b{1, 2}, c{0, 1};
  EXPECT_LT(c, a);
  EXPECT_LT(a, b);
  EXPECT_EQ(a.linear_index(3), 6);
  EXPECT_EQ(make_coord(2, 1), b);
  EXPECT_THROW(make_coord(1, 1), InvalidInput);
}

TEST(Cholesky, Identity) {
  const auto l = cholesky(SymMatrix::identity(3));
  EXPECT_TRUE(l.lower().isApprox(Dense::Identity(3, 3)));
}

TEST(Cholesky, TwoByTwoReconstructs) {
  const auto x = mat2(4, 2, 3);
  const auto l = cholesky(x);
  Dense expected(2, 2);
  expected << 2, 0, 1, std::sqrt(2.0);
  EXPECT_LE((l.lower() - expected).cwiseAbs().maxCoeff(), 1e-15);
  const Dense rec = l.lower() * l.lower().transpose();
  EXPECT_LE((rec - x.dense()).norm() / x.dense().norm(), 1e-10 * 2);
}

TEST(Cholesky, IndefiniteIsRejected) {
  EXPECT_THROW(cholesky(mat2(1, 2, 1)), NotPositiveDefinite);
  EXPECT_FALSE(try_cholesky(mat2(1, 2, 1)).has_value());
  // Singular: the second pivot is exactly zero.
  EXPECT_FALSE(try_cholesky(mat2(1, 1, 1)).has_value());
}

TEST(Cholesky, RandomReconstruction) {
  Rng rng(11);
  for (Index n : {1, 5, 40}) {
    const auto x = SymMatrix::from_dense(oracle::random_spd(n, rng), 1e-12);
    const auto l = cholesky(x);
    const Dense rec = l.lower() * l.lower().transpose();
    EXPECT_LE((rec - x.dense()).norm() / x.dense().norm(), 1e-10 * static_cast<double>(n));
    EXPECT_GT(l.min_pivot(), 0.0);
  }
}

TEST(LogDet, Examples) {
  EXPECT_DOUBLE_EQ(log_det(cholesky(SymMatrix::identity(5))), 0.0);
  const std::vector<double> two(3, 2.0);
  EXPECT_NEAR(log_det(cholesky(SymMatrix::diagonal(two))), 3.0 * std::log(2.0), 1e-14);
  EXPECT_NEAR(log_det(cholesky(mat2(4, 2, 3))), std::log(8.0), 1e-14);
}

TEST(LogDet, MatchesDenseDeterminant) {
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const Dense a = oracle::random_spd(6, rng);
    EXPECT_NEAR(log_det(cholesky(SymMatrix::from_dense(a))), std::log(oracle::det(a)), 1e-11);
  }
}

TEST(InverseFromCholesky, Examples) {
  EXPECT_EQ(inverse_from_cholesky(cholesky(SymMatrix::identity(4))).dense(),
            Dense::Identity(4, 4));
  const std::vector<double> d{2.0, 4.0};
  const auto inv = inverse_from_cholesky(cholesky(SymMatrix::diagonal(d)));
  EXPECT_DOUBLE_EQ(inv(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(inv(1, 1), 0.25);
  EXPECT_EQ(inv(0, 1), 0.0);
  const auto inv2 = inverse_from_cholesky(cholesky(mat2(4, 2, 3)));
  EXPECT_NEAR(inv2(0, 0), 3.0 / 8, 1e-15);
  EXPECT_NEAR(inv2(0, 1), -2.0 / 8, 1e-15);
  EXPECT_NEAR(inv2(1, 1), 4.0 / 8, 1e-15);
}

TEST(InverseFromCholesky, ResidualBoundUpToCond1e8) {
  Rng rng(5);
  for (double cond : {1e2, 1e5, 1e8}) {
    const Index n = 12;
    // Q diag(spectrum) Q^T with a log-spaced spectrum of the given condition number.
    const Eigen::HouseholderQR<Dense> qr(oracle::random_symmetric(n, rng));
    const Dense q = qr.householderQ();
    Eigen::VectorXd eig(n);
    for (Index i = 0; i < n; ++i) eig(i) = std::pow(cond, -static_cast<double>(i) / (n - 1));
    const auto x = SymMatrix::symmetrized(q * eig.asDiagonal() * q.transpose());
    const auto y = inverse_from_cholesky(cholesky(x));
    const double resid = (x.dense() * y.dense() - Dense::Identity(n, n)).cwiseAbs().maxCoeff();
    EXPECT_LE(resid, 1e-9 * n) << "cond " << cond;
  }
}

TEST(Objective, Examples) {
  const auto i3 = SymMatrix::identity(3);
  EXPECT_DOUBLE_EQ(objective(i3, i3, cholesky(i3)), 3.0);

  const auto sigma = mat2(1, 0.5, 1);
  const auto x = inverse_from_cholesky(cholesky(sigma));
  EXPECT_NEAR(objective(sigma, x, cholesky(x)), 2.0 + std::log(0.75), 1e-14);
  EXPECT_NEAR(objective(sigma, x, cholesky(x)), 1.7123179, 1e-7);

  const std::vector<double> sd{2.0, 3.0}, xd{0.5, 1.0 / 3.0};
  const auto s2 = SymMatrix::diagonal(sd), x2 = SymMatrix::diagonal(xd);
  EXPECT_NEAR(objective(s2, x2, cholesky(x2)), 2.0 + std::log(6.0), 1e-14);
}

TEST(Objective, PermutationInvariant) {
  Rng rng(17);
  const Index n = 7;
  const Dense s = oracle::random_spd(n, rng), x = oracle::random_spd(n, rng);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[1], perm[4]);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(n);
  for (Index i = 0; i < n; ++i) p.indices()(i) = perm[static_cast<std::size_t>(i)];
  const auto sp = SymMatrix::symmetrized(p.transpose() * s * p);
  const auto xp = SymMatrix::symmetrized(p.transpose() * x * p);
  const auto s0 = SymMatrix::symmetrized(s), x0 = SymMatrix::symmetrized(x);
  EXPECT_NEAR(objective(s0, x0, cholesky(x0)), objective(sp, xp, cholesky(xp)), 1e-12);
}

TEST(Gradient, Examples) {
  const auto i2 = SymMatrix::identity(2);
  EXPECT_EQ(max_abs(gradient(i2, i2)), 0.0);
  const auto sigma = mat2(1, 0.5, 1);
  const auto g = gradient(sigma, i2);
  EXPECT_EQ(g(0, 0), 0.0);
  EXPECT_EQ(g(0, 1), 0.5);
  // Diagonal initialization: Y = diag(Sigma) zeroes the gradient diagonal.
  const std::vector<double> diag{1.0, 1.0};
  EXPECT_EQ(gradient(sigma, SymMatrix::diagonal(diag))(1, 1), 0.0);
}

TEST(Gradient, VanishesAtInverse) {
  Rng rng(23);
  for (int k = 0; k < 10; ++k) {
    const auto sigma = SymMatrix::from_dense(oracle::random_spd(8, rng, 0.2));
    const auto x = inverse_from_cholesky(cholesky(sigma));
    const auto y = inverse_from_cholesky(cholesky(x));
    EXPECT_LE(max_abs(gradient(sigma, y)), 1e-9);
  }
}

TEST(HessianApply, Examples) {
  Rng rng(1);
  const auto d = SymMatrix::from_dense(oracle::random_symmetric(4, rng));
  EXPECT_LE(max_abs(Dense(hessian_apply(SymMatrix::identity(4), d).dense() - d.dense())), 0.0);

  const std::vector<double> yd{2.0, 3.0};
  const auto y = SymMatrix::diagonal(yd);
  Dense ones = Dense::Ones(2, 2);
  const auto h = hessian_apply(y, SymMatrix::from_dense(ones));
  Dense expected(2, 2);
  expected << 4, 6, 6, 9;
  EXPECT_EQ(h.dense(), expected);
}

TEST(HessianApply, MatchesKroneckerAndIsSymmetric) {
  Rng rng(29);
  for (int k = 0; k < 50; ++k) {
    const Index n = 1 + k % 6;
    const Dense y = oracle::random_spd(n, rng);
    const Dense d = oracle::random_symmetric(n, rng);
    const Dense fast = hessian_apply(y, d);
    EXPECT_LE((fast - oracle::kron_hessian_apply(y, d)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((fast - fast.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(OffdiagNnz, CountsBothTriangles) {
  SymMatrix x = SymMatrix::identity(4);
  EXPECT_EQ(offdiag_nnz(x), 0);
  x.set(0, 3, 0.1);
  x.set(1, 2, -0.2);
  EXPECT_EQ(offdiag_nnz(x), 4);
}
