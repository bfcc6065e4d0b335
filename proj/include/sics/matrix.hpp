#ifndef SICS_MATRIX_HPP
#define SICS_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "sics/error.hpp"

namespace sics {

using Index = Eigen::Index;
using Dense = Eigen::MatrixXd;

/**
 * Dense symmetric n x n matrix.
 *
 * Storage is the full square array; every write goes to both (i,j) and (j,i),
 * and matrices built from arithmetic results are symmetrized by averaging, so
 * entry(i,j) == entry(j,i) holds bit-for-bit.
 */
class SymMatrix {
public:
  SymMatrix() = default;

  explicit SymMatrix(Index n) : a_(Dense::Zero(n, n)) {}

  static SymMatrix identity(Index n) {
    SymMatrix m(n);
    m.a_.diagonal().setOnes();
    return m;
  }

  static SymMatrix diagonal(std::span<const double> d) {
    SymMatrix m(static_cast<Index>(d.size()));
    for (Index i = 0; i < m.size(); ++i) m.a_(i, i) = d[static_cast<std::size_t>(i)];
    return m;
  }

  /// Validates a square, finite array and stores its symmetric part.
  /// Throws InvalidInput when |a_ij - a_ji| exceeds `sym_tol * max(1, |a_ij|)`.
  static SymMatrix from_dense(const Dense& a, double sym_tol = 1e-12) {
    if (a.rows() != a.cols())
      throw InvalidInput("matrix is not square");
    if (!a.allFinite())
      throw InvalidInput("matrix has non-finite entries");
    for (Index j = 0; j < a.cols(); ++j)
      for (Index i = 0; i < j; ++i) {
        const double scale = std::max(1.0, std::abs(a(i, j)));
        if (std::abs(a(i, j) - a(j, i)) > sym_tol * scale)
          throw InvalidInput("matrix is not symmetric at (" + std::to_string(i + 1) + "," +
                             std::to_string(j + 1) + ")");
      }
    return symmetrized(a);
  }

  /// Stores (a + a^T) / 2 without validation; for results of symmetric arithmetic.
  static SymMatrix symmetrized(const Dense& a) {
    SymMatrix m;
    m.a_ = a;
    const Index n = a.rows();
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < j; ++i) {
        const double v = 0.5 * (a(i, j) + a(j, i));
        m.a_(i, j) = v;
        m.a_(j, i) = v;
      }
    return m;
  }

  Index size() const noexcept { return a_.rows(); }

  double operator()(Index i, Index j) const { return a_(i, j); }

  void set(Index i, Index j, double v) {
    a_(i, j) = v;
    a_(j, i) = v;
  }

  /// Adds v at (i,j) and, off the diagonal, at (j,i) as well.
  void add(Index i, Index j, double v) {
    a_(i, j) += v;
    if (i != j) a_(j, i) += v;
  }

  const Dense& dense() const noexcept { return a_; }

  bool operator==(const SymMatrix& o) const {
    return a_.rows() == o.a_.rows() && a_ == o.a_;
  }

private:
  Dense a_;
};

/// Canonical off-diagonal position (r, c) with r < c, zero-based.
struct Coord {
  Index r = 0;
  Index c = 1;

  /// Column-major linear index of the upper-triangle entry, X_ij = X[(j-1)n + i].
  Index linear_index(Index n) const noexcept { return c * n + r; }

  friend bool operator==(const Coord&, const Coord&) = default;
  friend std::strong_ordering operator<=>(const Coord& a, const Coord& b) {
    if (auto cmp = a.c <=> b.c; cmp != 0) return cmp;
    return a.r <=> b.r;
  }
};

inline Coord make_coord(Index i, Index j) {
  if (i == j) throw InvalidInput("diagonal position is not a coordinate");
  return i < j ? Coord{i, j} : Coord{j, i};
}

/// Lower-triangular Cholesky factor of a positive definite SymMatrix.
class CholeskyFactor {
public:
  CholeskyFactor() = default;

  Index size() const noexcept { return llt_.rows(); }

  Dense lower() const { return llt_.matrixL(); }

  double pivot(Index i) const { return llt_.matrixLLT()(i, i); }

  double min_pivot() const { return llt_.matrixLLT().diagonal().minCoeff(); }

  const Eigen::LLT<Dense>& llt() const noexcept { return llt_; }

private:
  friend std::optional<CholeskyFactor> try_cholesky(const SymMatrix&);
  Eigen::LLT<Dense> llt_;
};

/// Factorizes X, or returns nullopt when some pivot is <= 0.
inline std::optional<CholeskyFactor> try_cholesky(const SymMatrix& x) {
  CholeskyFactor f;
  f.llt_.compute(x.dense());
  if (f.llt_.info() != Eigen::Success) return std::nullopt;
  return f;
}

inline CholeskyFactor cholesky(const SymMatrix& x) {
  auto f = try_cholesky(x);
  if (!f) throw NotPositiveDefinite("matrix is not positive definite");
  return *std::move(f);
}

inline bool is_positive_definite(const SymMatrix& x) { return try_cholesky(x).has_value(); }

inline double log_det(const CholeskyFactor& l) {
  double s = 0.0;
  for (Index i = 0; i < l.size(); ++i) s += std::log(l.pivot(i));
  return 2.0 * s;
}

inline SymMatrix inverse_from_cholesky(const CholeskyFactor& l) {
  return SymMatrix::symmetrized(l.llt().solve(Dense::Identity(l.size(), l.size())));
}

/// Frobenius inner product <A, B>.
inline double inner(const Dense& a, const Dense& b) { return (a.array() * b.array()).sum(); }

inline double inner(const SymMatrix& a, const SymMatrix& b) { return inner(a.dense(), b.dense()); }

/// Largest absolute entry.
inline double max_abs(const Dense& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

inline double max_abs(const SymMatrix& a) { return max_abs(a.dense()); }

/// f(X) = <Sigma, X> - log det X, with log det taken from the factor of X.
inline double objective(const SymMatrix& sigma, const SymMatrix& x, const CholeskyFactor& l) {
  if (sigma.size() != x.size() || l.size() != x.size())
    throw InvalidInput("dimension mismatch in objective");
  return inner(sigma, x) - log_det(l);
}

/// G = Sigma - Y where Y is the inverse of the current iterate.
inline SymMatrix gradient(const SymMatrix& sigma, const SymMatrix& y) {
  if (sigma.size() != y.size()) throw InvalidInput("dimension mismatch in gradient");
  return SymMatrix::symmetrized(sigma.dense() - y.dense());
}

/// Y D Y, i.e. (Y kron Y) vec(D), without forming the Kronecker product.
inline Dense hessian_apply(const Dense& y, const Dense& d) {
  Dense yd = y * d;
  Dense out = yd * y;
  return out;
}

inline SymMatrix hessian_apply(const SymMatrix& y, const SymMatrix& d) {
  if (y.size() != d.size()) throw InvalidInput("dimension mismatch in hessian_apply");
  return SymMatrix::symmetrized(hessian_apply(y.dense(), d.dense()));
}

/// Number of nonzero off-diagonal entries (both triangles).
inline Index offdiag_nnz(const SymMatrix& x) {
  Index k = 0;
  for (Index j = 0; j < x.size(); ++j)
    for (Index i = 0; i < j; ++i)
      if (x(i, j) != 0.0) k += 2;
  return k;
}

} // namespace sics

#endif // SICS_MATRIX_HPP
