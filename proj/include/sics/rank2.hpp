#ifndef SICS_RANK2_HPP
#define SICS_RANK2_HPP

#include "sics/matrix.hpp"

namespace sics {

/// Smallest value of the determinant ratio accepted by a rank-2 update.
inline constexpr double kDetFactorFloor = 1e-14;

/// The 2x2 principal minor of Y at a coordinate, which is all a symmetric
/// perturbation X + t * E_rc ever sees of the inverse.
struct Rank2Context {
  Coord coord;
  double yrr = 1.0;
  double ycc = 1.0;
  double yrc = 0.0;
  double delta = 1.0; // yrr * ycc - yrc^2

  static Rank2Context at(const SymMatrix& y, Coord j) {
    Rank2Context ctx;
    ctx.coord = j;
    ctx.yrr = y(j.r, j.r);
    ctx.ycc = y(j.c, j.c);
    ctx.yrc = y(j.r, j.c);
    ctx.delta = ctx.yrr * ctx.ycc - ctx.yrc * ctx.yrc;
    return ctx;
  }
};

/// det(X + theta * E) / det(X) = 1 + 2 Yrc theta - delta theta^2.
inline double det_factor(const Rank2Context& ctx, double theta) {
  return 1.0 + 2.0 * ctx.yrc * theta - ctx.delta * theta * theta;
}

/**
 * Inverse of T = X + varpi * E_coord from Y = X^{-1} in O(n^2):
 *
 *   T^{-1} = Y - varpi / phi * [y_r y_c] W [y_c y_r]^T,
 *   W = [[1 + varpi Yrc, -varpi Ycc], [-varpi Yrr, 1 + varpi Yrc]],
 *
 * with phi = det_factor(varpi). Throws NotPositiveDefiniteUpdate when
 * phi <= kDetFactorFloor, i.e. T leaves the positive definite cone.
 */
inline SymMatrix smw_inverse_update(const SymMatrix& y, Coord coord, double varpi) {
  const auto ctx = Rank2Context::at(y, coord);
  const double phi = det_factor(ctx, varpi);
  if (!(phi > kDetFactorFloor))
    throw NotPositiveDefiniteUpdate("rank-2 update leaves the positive definite cone");
  if (varpi == 0.0) return y;

  const double scale = varpi / phi;
  const double w_cross = 1.0 + varpi * ctx.yrc;
  const double w_rr = -varpi * ctx.ycc; // multiplies y_r y_r^T
  const double w_cc = -varpi * ctx.yrr; // multiplies y_c y_c^T

  const Dense& a = y.dense();
  const Index n = y.size();
  Dense out(n, n);
  for (Index j = 0; j < n; ++j) {
    const double yrj = a(coord.r, j);
    const double ycj = a(coord.c, j);
    for (Index i = 0; i <= j; ++i) {
      const double yri = a(coord.r, i);
      const double yci = a(coord.c, i);
      const double corr =
          w_cross * (yri * ycj + yci * yrj) + w_rr * yri * yrj + w_cc * yci * ycj;
      const double v = a(i, j) - scale * corr;
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return SymMatrix::symmetrized(out);
}

/// Inverse of X - current_value * E_coord, the removal of a support entry.
inline SymMatrix remove_coordinate(const SymMatrix& y, Coord coord, double current_value) {
  return smw_inverse_update(y, coord, -current_value);
}

} // namespace sics

#endif // SICS_RANK2_HPP
