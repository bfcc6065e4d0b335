#ifndef SICS_CWOA_HPP
#define SICS_CWOA_HPP

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sics/line_minimizer.hpp"
#include "sics/matrix.hpp"
#include "sics/newton.hpp"
#include "sics/rank2.hpp"
#include "sics/support.hpp"

namespace sics {

struct CwoaConfig {
  Index sparsity = 0;          // budget on off-diagonal nonzeros
  NewtonConfig newton;
  int refresh_every = 50;      // rank-2 updates between inverse refreshes
  int max_swap_sweeps = -1;    // cap on accepted swaps; negative means 10 n
  double tol_improve = 1e-10;  // relative, scaled by 1 + |f|
  bool enable_swaps = true;    // false gives the greedy-only ablation

  /// Symmetric pairs the budget allows.
  Index capacity() const noexcept { return sparsity / 2; }

  void validate() const {
    if (sparsity < 0) throw InvalidInput("sparsity must be non-negative");
    if (refresh_every < 1) throw InvalidInput("refresh_every must be >= 1");
    if (!(tol_improve >= 0.0)) throw InvalidInput("tol_improve must be non-negative");
    newton.validate();
  }
};

struct SolverState {
  SymMatrix x;
  SymMatrix y;  // cached X^{-1}
  CholeskyFactor l;
  double f = 0.0;
  Support support;
  int updates_since_refresh = 0;
};

enum class Stage { Greedy, Swap };

inline const char* to_string(Stage s) { return s == Stage::Greedy ? "greedy" : "swap"; }

struct IterationRecord {
  int iter = 0;
  Stage stage = Stage::Greedy;
  std::optional<Coord> added;
  std::optional<Coord> dropped;
  double theta = 0.0;
  double objective = 0.0;
  Index support_pairs = 0;
  int newton_iters = 0;
  Index nnz_off = 0;        // off-diagonal nonzeros of X after the step
  double min_pivot = 0.0;   // smallest Cholesky pivot of X after the step
  double elapsed_ms = 0.0;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  bool greedy_saturated = false;
  bool swap_limit_reached = false;
  std::size_t skipped_drops = 0;  // removals that would leave the PD cone
  std::size_t branch_flips = 0;   // closed-form minus root infeasible
  std::size_t newton_unconverged = 0;
  std::size_t refreshes = 0;

  /// Timing-free view used for determinism checks.
  bool same_path(const RunTrace& o) const {
    if (records.size() != o.records.size()) return false;
    for (std::size_t k = 0; k < records.size(); ++k) {
      const auto& a = records[k];
      const auto& b = o.records[k];
      if (a.iter != b.iter || a.stage != b.stage || a.added != b.added ||
          a.dropped != b.dropped || a.theta != b.theta || a.objective != b.objective ||
          a.support_pairs != b.support_pairs || a.newton_iters != b.newton_iters ||
          a.nnz_off != b.nnz_off || a.min_pivot != b.min_pivot)
        return false;
    }
    return greedy_saturated == o.greedy_saturated && swap_limit_reached == o.swap_limit_reached &&
           skipped_drops == o.skipped_drops && branch_flips == o.branch_flips;
  }
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// Recomputes factor and inverse from X and checks the cached values.
inline void refresh(SolverState& st, const SymMatrix& sigma) {
  const SymMatrix y_cached = st.y;
  st.l = cholesky(st.x);
  st.y = inverse_from_cholesky(st.l);
  st.updates_since_refresh = 0;
  const Index n = st.x.size();
  const double drift = max_abs(Dense(st.x.dense() * y_cached.dense() - Dense::Identity(n, n)));
  if (drift > 1e-6) throw SolverError("cached inverse drifted from X by " + std::to_string(drift));
  const double f_fresh = objective(sigma, st.x, st.l);
  if (std::abs(f_fresh - st.f) > 1e-9 * std::max(1.0, std::abs(f_fresh)))
    throw SolverError("tracked objective drifted from f(X)");
}

inline void apply_rank2(SolverState& st, const SymMatrix& sigma, const CwoaConfig& cfg, Coord j,
                        double varpi, RunTrace& trace) {
  st.y = smw_inverse_update(st.y, j, varpi);
  st.x.add(j.r, j.c, varpi);
  if (++st.updates_since_refresh >= cfg.refresh_every) {
    refresh(st, sigma);
    ++trace.refreshes;
  }
}

inline int resolve(SolverState& st, const SymMatrix& sigma, const CwoaConfig& cfg,
                   RunTrace& trace) {
  auto res = solve_restricted(sigma, st.x, st.support, cfg.newton);
  if (res.trace.status != NewtonStatus::Converged) ++trace.newton_unconverged;
  // The Newton iterates never increase f; keep the tracked value when the
  // from-scratch start point rounds above it.
  st.f = std::min(st.f, res.f);
  st.x = std::move(res.x);
  st.y = std::move(res.y);
  st.l = std::move(res.l);
  st.updates_since_refresh = 0;
  return static_cast<int>(res.trace.iterations.size());
}

} // namespace detail

/// X0 = diag(1 / Sigma_ii), the minimizer over diagonal matrices.
inline SolverState initialize(const SymMatrix& sigma) {
  const Index n = sigma.size();
  if (n < 1) throw InvalidInput("empty covariance matrix");
  SolverState st;
  st.x = SymMatrix(n);
  st.y = SymMatrix(n);
  st.f = static_cast<double>(n);
  for (Index i = 0; i < n; ++i) {
    const double s = sigma(i, i);
    if (!(s > 0.0))
      throw NonPositiveDiagonal("Sigma(" + std::to_string(i + 1) + "," + std::to_string(i + 1) +
                                ") is not positive");
    st.x.set(i, i, 1.0 / s);
    st.y.set(i, i, s);
    st.f += std::log(s);
  }
  st.l = cholesky(st.x);
  st.support = Support(n);
  return st;
}

/**
 * Adds one coordinate at a time while the budget has room: picks the best
 * single-coordinate step over Z, applies it as a rank-2 update, then re-solves
 * the restricted problem warm-started from there. Stops early, setting
 * trace.greedy_saturated, when no coordinate improves f.
 */
inline int greedy_stage(SolverState& st, const SymMatrix& sigma, const CwoaConfig& cfg,
                        RunTrace& trace, detail::Clock::time_point t0 = detail::Clock::now()) {
  int added = 0;
  while (static_cast<Index>(st.support.size()) < cfg.capacity()) {
    const auto best =
        best_addition(sigma, st.y, st.support, cfg.tol_improve * (1.0 + std::abs(st.f)));
    if (!best) {
      trace.greedy_saturated = true;
      break;
    }
    if (best->line.branch_flipped) ++trace.branch_flips;
    st.f += best->line.delta_f;
    detail::apply_rank2(st, sigma, cfg, best->coord, best->line.theta_star, trace);
    st.support.insert(best->coord);
    const int newton_iters = detail::resolve(st, sigma, cfg, trace);

    IterationRecord rec;
    rec.iter = static_cast<int>(trace.records.size()) + 1;
    rec.stage = Stage::Greedy;
    rec.added = best->coord;
    rec.theta = best->line.theta_star;
    rec.objective = st.f;
    rec.support_pairs = static_cast<Index>(st.support.size());
    rec.newton_iters = newton_iters;
    rec.nnz_off = offdiag_nnz(st.x);
    rec.min_pivot = st.l.min_pivot();
    rec.elapsed_ms = detail::ms_since(t0);
    trace.records.push_back(rec);
    ++added;
  }
  return added;
}

/**
 * Performs up to `max_swaps` improving (drop, add) exchanges, each followed by
 * a warm-started restricted re-solve. Acceptance uses the one-dimensional
 * change f_{i,j} - f(X); the re-solve can only lower f further.
 */
inline int swap_stage(SolverState& st, const SymMatrix& sigma, const CwoaConfig& cfg,
                      RunTrace& trace, int max_swaps,
                      detail::Clock::time_point t0 = detail::Clock::now()) {
  int swaps = 0;
  while (swaps < max_swaps) {
    auto scan = best_swap(sigma, st.x, st.y, st.support, cfg.tol_improve * (1.0 + std::abs(st.f)));
    trace.skipped_drops += scan.skipped_drops.size();
    trace.branch_flips += scan.branch_flips;
    if (!scan.best) break;
    const Swap& sw = *scan.best;

    // f is advanced before each update so a refresh inside compares like with like.
    st.f += sw.removal_delta;
    detail::apply_rank2(st, sigma, cfg, sw.drop, -st.x(sw.drop.r, sw.drop.c), trace);
    st.x.set(sw.drop.r, sw.drop.c, 0.0);  // exact zero off the support
    st.f += sw.total_delta - sw.removal_delta;
    detail::apply_rank2(st, sigma, cfg, sw.add, sw.line.theta_star, trace);
    st.support.erase(sw.drop);
    st.support.insert(sw.add);
    const int newton_iters = detail::resolve(st, sigma, cfg, trace);

    IterationRecord rec;
    rec.iter = static_cast<int>(trace.records.size()) + 1;
    rec.stage = Stage::Swap;
    rec.added = sw.add;
    rec.dropped = sw.drop;
    rec.theta = sw.line.theta_star;
    rec.objective = st.f;
    rec.support_pairs = static_cast<Index>(st.support.size());
    rec.newton_iters = newton_iters;
    rec.nnz_off = offdiag_nnz(st.x);
    rec.min_pivot = st.l.min_pivot();
    rec.elapsed_ms = detail::ms_since(t0);
    trace.records.push_back(rec);
    ++swaps;
  }
  return swaps;
}

struct SolveResult {
  SymMatrix x;
  double f = 0.0;
  SolverState state;
  RunTrace trace;
  double wall_ms = 0.0;
};

/// Greedy pursuit until the budget is full or nothing improves, then one
/// swap at a time with the greedy stage re-entered after each swap, until no
/// improving swap remains.
inline SolveResult solve(const SymMatrix& sigma, const CwoaConfig& cfg) {
  cfg.validate();
  const auto t0 = detail::Clock::now();
  SolveResult out;
  out.state = initialize(sigma);
  auto& st = out.state;
  auto& trace = out.trace;
  const int swap_cap = cfg.max_swap_sweeps >= 0 ? cfg.max_swap_sweeps
                                                : static_cast<int>(10 * sigma.size());
  int swaps = 0;
  while (true) {
    greedy_stage(st, sigma, cfg, trace, t0);
    if (!cfg.enable_swaps || st.support.empty()) break;
    if (swaps >= swap_cap) {
      // Only flagged when another improving swap actually exists.
      if (best_swap(sigma, st.x, st.y, st.support, cfg.tol_improve * (1.0 + std::abs(st.f))).best)
        trace.swap_limit_reached = true;
      break;
    }
    if (swap_stage(st, sigma, cfg, trace, 1, t0) == 0) break;
    ++swaps;
  }
  out.x = st.x;
  out.f = st.f;
  out.wall_ms = detail::ms_since(t0);
  return out;
}

struct FamilyCheck {
  std::string name;
  bool checked = false;  // false when the family is empty
  bool pass = true;
  double worst = 0.0;     // N0: max |gradient|; N1/N2: most negative change in f
  std::string candidate;  // 1-based description of the worst candidate
};

struct CertificateReport {
  double objective = 0.0;
  Index support_pairs = 0;
  double tol = 0.0;
  FamilyCheck stationarity;  // N0
  FamilyCheck addition;      // N1
  FamilyCheck swap;          // N2

  bool pass() const { return stationarity.pass && addition.pass && swap.pass; }
};

namespace detail {
inline std::string coord_label(Coord j) {
  return "(" + std::to_string(j.r + 1) + "," + std::to_string(j.c + 1) + ")";
}
} // namespace detail

/**
 * Checks the three neighbourhoods a coordinate-wise minimum must beat:
 * re-optimizing the current support (N0, restricted gradient), adding one
 * coordinate while the budget has room (N1), and exchanging one support
 * coordinate for one zero coordinate (N2).
 *
 * Throws InvalidInput when X is not positive definite or exceeds the budget.
 */
inline CertificateReport certify(const SymMatrix& sigma, const SymMatrix& x, Index s, double tol) {
  if (sigma.size() != x.size()) throw InvalidInput("dimension mismatch in certify");
  const auto l = try_cholesky(x);
  if (!l) throw InvalidInput("precision matrix is not positive definite");
  if (offdiag_nnz(x) > s)
    throw InvalidInput("precision matrix has " + std::to_string(offdiag_nnz(x)) +
                       " off-diagonal nonzeros, budget is " + std::to_string(s));
  const Support support = Support::of(x);
  const SymMatrix y = inverse_from_cholesky(*l);

  CertificateReport rep;
  rep.objective = objective(sigma, x, *l);
  rep.support_pairs = static_cast<Index>(support.size());
  rep.tol = tol;

  auto& n0 = rep.stationarity;
  n0.name = "stationarity";
  n0.checked = true;
  for (Index i = 0; i < x.size(); ++i) {
    const double g = std::abs(sigma(i, i) - y(i, i));
    if (g > n0.worst) {
      n0.worst = g;
      n0.candidate = "(" + std::to_string(i + 1) + "," + std::to_string(i + 1) + ")";
    }
  }
  for (const auto& j : support) {
    const double g = std::abs(sigma(j.r, j.c) - y(j.r, j.c));
    if (g > n0.worst) {
      n0.worst = g;
      n0.candidate = detail::coord_label(j);
    }
  }
  n0.pass = n0.worst <= tol;

  auto& n1 = rep.addition;
  n1.name = "addition";
  if (static_cast<Index>(support.size()) < s / 2) {
    if (auto best = scan_additions(sigma, y, support)) {
      n1.checked = true;
      n1.worst = best->line.delta_f;
      n1.candidate = "add " + detail::coord_label(best->coord);
      n1.pass = n1.worst >= -tol;
    }
  }

  auto& n2 = rep.swap;
  n2.name = "swap";
  if (!support.empty()) {
    const auto scan = scan_swaps(sigma, x, y, support);
    if (scan.best) {
      n2.checked = true;
      n2.worst = scan.best->total_delta;
      n2.candidate = "drop " + detail::coord_label(scan.best->drop) + " add " +
                     detail::coord_label(scan.best->add);
      n2.pass = n2.worst >= -tol;
    }
  }
  return rep;
}

} // namespace sics

#endif // SICS_CWOA_HPP
