#ifndef SICS_LINE_MINIMIZER_HPP
#define SICS_LINE_MINIMIZER_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "sics/matrix.hpp"
#include "sics/parallel.hpp"
#include "sics/rank2.hpp"
#include "sics/support.hpp"

namespace sics {

/// Candidates closer than this in objective change are ties.
inline constexpr double kTieTolerance = 1e-12;

struct LineResult {
  double theta_star = 0.0;
  /// f(V + theta* E) - f(V); the constant <Sigma,V> - log det V cancels.
  double delta_f = 0.0;
  bool feasible = true;
  /// The closed form's minus-sign root was infeasible and the other root was used.
  bool branch_flipped = false;
};

/**
 * Exact minimizer of f(t) = 2 t s - log(1 + 2 Yrc t - O t^2) over the interval
 * where the log argument is positive, O = Yrr Ycc - Yrc^2.
 *
 * The stationarity condition is the quadratic s O t^2 - (2 s Yrc + O) t + (Yrc - s) = 0.
 * Both roots are formed without cancellation and the one inside the feasible
 * interval is returned; f is strictly convex there, so exactly one qualifies.
 */
inline LineResult theta_star(double sigma_rc, double yrr, double ycc, double yrc) {
  const double o = yrr * ycc - yrc * yrc;
  if (!(o > 0.0)) throw DegenerateCurvature("2x2 minor of the inverse is not positive definite");

  auto phi_minus_one = [&](double t) { return 2.0 * yrc * t - o * t * t; };

  LineResult res;
  if (sigma_rc == 0.0) {
    res.theta_star = yrc / o;
  } else {
    const double b = 2.0 * sigma_rc * yrc + o;
    const double s = std::sqrt(o * o + 4.0 * sigma_rc * sigma_rc * yrr * ycc);
    double minus = 0.0;
    double plus = 0.0;
    if (b >= 0.0) {
      minus = 2.0 * (yrc - sigma_rc) / (b + s);
      plus = (b + s) / (2.0 * sigma_rc * o);
    } else {
      minus = (b - s) / (2.0 * sigma_rc * o);
      plus = 2.0 * (yrc - sigma_rc) / (b - s);
    }
    const double phi_m = 1.0 + phi_minus_one(minus);
    const double phi_p = 1.0 + phi_minus_one(plus);
    if (phi_m > 0.0 && std::isfinite(minus)) {
      res.theta_star = minus;
    } else {
      res.branch_flipped = true;
      res.theta_star = (std::isfinite(plus) && phi_p > phi_m) ? plus : minus;
    }
  }
  const double arg = phi_minus_one(res.theta_star);
  if (!(1.0 + arg > 0.0)) {
    res.feasible = false;
    res.delta_f = std::numeric_limits<double>::infinity();
    return res;
  }
  res.delta_f = 2.0 * res.theta_star * sigma_rc - std::log1p(arg);
  return res;
}

inline LineResult theta_star(double sigma_rc, const Rank2Context& ctx) {
  return theta_star(sigma_rc, ctx.yrr, ctx.ycc, ctx.yrc);
}

struct Addition {
  Coord coord;
  LineResult line;
};

/// Best single-coordinate step over Z, regardless of whether it improves.
/// Returns nullopt only when Z is empty.
inline std::optional<Addition> scan_additions(const SymMatrix& sigma, const SymMatrix& y,
                                              const Support& support) {
  std::optional<Addition> best;
  support.for_each_zero([&](Coord j) {
    const auto line = theta_star(sigma(j.r, j.c), y(j.r, j.r), y(j.c, j.c), y(j.r, j.c));
    if (!line.feasible) return;
    if (!best || line.delta_f < best->line.delta_f - kTieTolerance) best = Addition{j, line};
  });
  return best;
}

/// Coordinate of Z whose one-dimensional step decreases f the most, or
/// nullopt when no step decreases f by more than `tol_improve` (absolute).
inline std::optional<Addition> best_addition(const SymMatrix& sigma, const SymMatrix& y,
                                             const Support& support, double tol_improve) {
  auto best = scan_additions(sigma, y, support);
  if (!best || !(best->line.delta_f < -tol_improve)) return std::nullopt;
  return best;
}

struct Swap {
  Coord drop;
  Coord add;
  LineResult line;       // step on `add`, taken from V = X - X_drop E_drop
  double removal_delta;  // f(V) - f(X)
  double total_delta;    // f(V + theta* E_add) - f(X)
};

struct SwapScan {
  std::optional<Swap> best;
  /// Support entries whose removal would leave the positive definite cone.
  std::vector<Coord> skipped_drops;
  std::size_t branch_flips = 0;
};

/**
 * Evaluates every (drop, add) pair with drop in the support and add in Z.
 * Each drop costs one O(n^2) inverse update and an O(1) line minimization per
 * add, so a full scan is O(|S| n^2).
 *
 * The winner is chosen in two levels, per drop then across drops, both in
 * column-major order with kTieTolerance ties going to the earlier candidate.
 * Drops are scanned in parallel; the reduction makes the result independent of
 * the worker count.
 */
inline SwapScan scan_swaps(const SymMatrix& sigma, const SymMatrix& x, const SymMatrix& y,
                           const Support& support) {
  const auto& drops = support.coords();
  struct PerDrop {
    std::optional<Swap> best;
    bool skipped = false;
    std::size_t flips = 0;
  };
  std::vector<PerDrop> results(drops.size());

  parallel_for(drops.size(), [&](std::size_t k) {
    const Coord i = drops[k];
    const double xi = x(i.r, i.c);
    const auto ctx = Rank2Context::at(y, i);
    const double phi = det_factor(ctx, -xi);
    auto& out = results[k];
    if (!(phi > kDetFactorFloor)) {
      out.skipped = true;
      return;
    }
    const SymMatrix v_inv = remove_coordinate(y, i, xi);
    const double removal = -2.0 * xi * sigma(i.r, i.c) - std::log(phi);
    support.for_each_zero([&](Coord j) {
      const double vrr = v_inv(j.r, j.r), vcc = v_inv(j.c, j.c), vrc = v_inv(j.r, j.c);
      if (!(vrr * vcc - vrc * vrc > 0.0)) return;
      const auto line = theta_star(sigma(j.r, j.c), vrr, vcc, vrc);
      if (line.branch_flipped) ++out.flips;
      if (!line.feasible) return;
      const double total = removal + line.delta_f;
      if (!out.best || total < out.best->total_delta - kTieTolerance)
        out.best = Swap{i, j, line, removal, total};
    });
  });

  SwapScan scan;
  for (std::size_t k = 0; k < drops.size(); ++k) {
    const auto& r = results[k];
    if (r.skipped) scan.skipped_drops.push_back(drops[k]);
    scan.branch_flips += r.flips;
    if (r.best && (!scan.best || r.best->total_delta < scan.best->total_delta - kTieTolerance))
      scan.best = r.best;
  }
  return scan;
}

/// scan_swaps, keeping the winner only if it decreases f by more than
/// `tol_improve` (absolute).
inline SwapScan best_swap(const SymMatrix& sigma, const SymMatrix& x, const SymMatrix& y,
                          const Support& support, double tol_improve) {
  auto scan = scan_swaps(sigma, x, y, support);
  if (scan.best && !(scan.best->total_delta < -tol_improve)) scan.best.reset();
  return scan;
}

} // namespace sics

#endif // SICS_LINE_MINIMIZER_HPP
