#ifndef SICS_NEWTON_HPP
#define SICS_NEWTON_HPP

#include <cmath>
#include <string>
#include <vector>

#include "sics/matrix.hpp"
#include "sics/support.hpp"

namespace sics {

struct NewtonConfig {
  int t_in = 5;            // CG iterations per direction
  int t_out = 100;         // Newton iterations
  double eta = 0.1;        // backtracking ratio
  double omega = 0.25;     // sufficient-decrease constant
  double grad_tol = 1e-8;  // scaled by 1 + max|Sigma|
  int max_backtracks = 60;

  void validate() const {
    if (!(t_in >= 1)) throw InvalidInput("t_in must be >= 1");
    if (!(t_out >= 1)) throw InvalidInput("t_out must be >= 1");
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidInput("eta must lie in (0, 1)");
    if (!(omega > 0.0 && omega < 0.5)) throw InvalidInput("omega must lie in (0, 0.5)");
    if (!(grad_tol > 0.0)) throw InvalidInput("grad_tol must be positive");
    if (!(max_backtracks >= 1)) throw InvalidInput("max_backtracks must be >= 1");
  }
};

/// Restricted gradient: Sigma - X^{-1} on the diagonal and the support.
inline double restricted_grad_norm(const SymMatrix& sigma, const SymMatrix& y,
                                   const Support& support) {
  double g = 0.0;
  for (Index i = 0; i < sigma.size(); ++i) g = std::max(g, std::abs(sigma(i, i) - y(i, i)));
  for (const auto& j : support) g = std::max(g, std::abs(sigma(j.r, j.c) - y(j.r, j.c)));
  return g;
}

/// 1.0 on free positions (diagonal and support), 0.0 on Z.
inline Dense free_positions(const Support& support) {
  return support.free_mask().cast<double>();
}

struct CgResult {
  Dense direction;
  int iterations = 0;
  bool breakdown = false;
};

/**
 * Truncated linear CG for the Newton direction
 *
 *   min_D <D, G> + 1/2 vec(D)^T (Y kron Y) vec(D)   s.t.  D_Z = 0,
 *
 * with the Hessian applied as Y P Y and the Z entries of both D and the
 * residual cleared after every update. `free` is 1 on free positions and 0 on Z.
 */
inline CgResult cg_direction(const Dense& y, const Dense& g, const Dense& free, int t_in) {
  const Index n = y.rows();
  CgResult res;
  res.direction = Dense::Zero(n, n);
  Dense& d = res.direction;

  Dense r = (-g).cwiseProduct(free);
  Dense p = r;
  double r_old = inner(r, r);
  const double r_first = r_old;
  if (r_old == 0.0) return res;

  for (int it = 0; it < t_in; ++it) {
    const Dense b = hessian_apply(y, p);
    const double pb = inner(p, b);
    if (!(pb > 0.0)) {
      res.breakdown = true;
      break;
    }
    const double alpha = r_old / pb;
    d += alpha * p;
    r -= alpha * b;
    d = d.cwiseProduct(free);
    r = r.cwiseProduct(free);
    const double r_new = inner(r, r);
    p = r + (r_new / r_old) * p;
    r_old = r_new;
    res.iterations = it + 1;
    // Residual at round-off level; further steps only add noise.
    if (r_new <= 1e-32 * r_first) break;
  }
  d = 0.5 * (d + d.transpose());
  return res;
}

inline CgResult cg_direction(const SymMatrix& y, const SymMatrix& g, const Support& support,
                             int t_in) {
  return cg_direction(y.dense(), g.dense(), free_positions(support), t_in);
}

namespace detail {

/// x - log(1 + x), accurate for small |x|.
inline double log1p_gap(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return x2 * (0.5 - x / 3.0 + x2 / 4.0 - x2 * x / 5.0);
  }
  return x - std::log1p(x);
}

} // namespace detail

struct ArmijoResult {
  double alpha = 1.0;
  SymMatrix x_next;
  CholeskyFactor l_next;
  double f_next = 0.0;
  int backtracks = 0;
};

/**
 * Backtracking over alpha in {1, eta, eta^2, ...}: accepts the first alpha for
 * which X + alpha D has a Cholesky factor and
 *
 *   f(X + alpha D) <= f(X) + alpha * omega * <G, D>.
 *
 * The change in f is evaluated as alpha <G,D> + sum_i (alpha l_i - log(1 + alpha l_i))
 * over the eigenvalues l_i of L^{-1} D L^{-T}. This equals the difference of the
 * two objective values but stays accurate when that difference is far below
 * the rounding level of f itself. One eigen-decomposition serves every trial.
 */
inline ArmijoResult armijo_step(const SymMatrix& sigma, const SymMatrix& x,
                                const CholeskyFactor& l_x, const Dense& d, const SymMatrix& g,
                                double f_x, const NewtonConfig& cfg) {
  (void)sigma; // enters only through G = Sigma - X^{-1}
  const double gd = inner(g.dense(), d);
  if (!(gd < 0.0)) throw LineSearchFailed("direction is not a descent direction");

  const auto& llt = l_x.llt();
  const Dense half = llt.matrixL().solve(d);
  Dense m = llt.matrixL().solve(Dense(half.transpose()));
  m = 0.5 * (m + m.transpose());
  const Eigen::VectorXd lam = Eigen::SelfAdjointEigenSolver<Dense>(m, Eigen::EigenvaluesOnly).eigenvalues();
  const double lam_min = lam.minCoeff();

  double alpha = 1.0;
  for (int k = 0; k <= cfg.max_backtracks; ++k, alpha *= cfg.eta) {
    if (!(1.0 + alpha * lam_min > 0.0)) continue;
    double change = alpha * gd;
    for (Index i = 0; i < lam.size(); ++i) change += detail::log1p_gap(alpha * lam(i));
    if (!(change <= alpha * cfg.omega * gd)) continue;

    SymMatrix trial = SymMatrix::symmetrized(x.dense() + alpha * d);
    auto l_trial = try_cholesky(trial);
    if (!l_trial) continue;
    return ArmijoResult{alpha, std::move(trial), *std::move(l_trial), f_x + change, k};
  }
  throw LineSearchFailed("no acceptable step after " + std::to_string(cfg.max_backtracks) +
                         " backtracks");
}

struct NewtonIteration {
  double objective = 0.0;  // f at the start of the iteration
  double grad_norm = 0.0;  // restricted gradient inf-norm at the start
  double dir_norm = 0.0;   // ||D||_F
  double descent = 0.0;    // <G, D>
  double alpha = 0.0;
  int backtracks = 0;
  int cg_iterations = 0;
  bool cg_breakdown = false;
};

enum class NewtonStatus { Converged, MaxIterations, Stalled };

inline const char* to_string(NewtonStatus s) {
  switch (s) {
  case NewtonStatus::Converged: return "converged";
  case NewtonStatus::MaxIterations: return "max_iterations";
  case NewtonStatus::Stalled: return "stalled";
  }
  return "unknown";
}

struct NewtonTrace {
  std::vector<NewtonIteration> iterations;
  double final_objective = 0.0;
  double final_grad_norm = 0.0;
  NewtonStatus status = NewtonStatus::Converged;
};

struct NewtonResult {
  SymMatrix x;
  SymMatrix y;
  CholeskyFactor l;
  double f = 0.0;
  NewtonTrace trace;
};

/**
 * Minimizes f over positive definite X vanishing on Z (the off-diagonal
 * complement of `support`). Stops once the restricted gradient inf-norm is at
 * most grad_tol * (1 + max|Sigma|) or after t_out iterations, in which case the
 * last iterate is returned with status MaxIterations.
 */
inline NewtonResult solve_restricted(const SymMatrix& sigma, const SymMatrix& x0,
                                     const Support& support, const NewtonConfig& cfg) {
  cfg.validate();
  if (sigma.size() != x0.size() || support.dim() != x0.size())
    throw InvalidInput("dimension mismatch in solve_restricted");
  for (Index c = 0; c < x0.size(); ++c)
    for (Index r = 0; r < c; ++r)
      if (x0(r, c) != 0.0 && !support.contains({r, c}))
        throw InvalidInput("initial point is nonzero outside the support");

  NewtonResult res;
  res.x = x0;
  res.l = cholesky(x0);
  res.y = inverse_from_cholesky(res.l);
  res.f = objective(sigma, x0, res.l);

  const Dense free = free_positions(support);
  const double tol = cfg.grad_tol * (1.0 + max_abs(sigma));
  auto& trace = res.trace;
  trace.status = NewtonStatus::MaxIterations;

  for (int t = 0; t < cfg.t_out; ++t) {
    const SymMatrix g = gradient(sigma, res.y);
    const double gnorm = restricted_grad_norm(sigma, res.y, support);
    if (gnorm <= tol) {
      trace.status = NewtonStatus::Converged;
      break;
    }
    auto cg = cg_direction(res.y.dense(), g.dense(), free, cfg.t_in);
    const double gd = inner(g.dense(), cg.direction);
    NewtonIteration rec;
    rec.objective = res.f;
    rec.grad_norm = gnorm;
    rec.dir_norm = cg.direction.norm();
    rec.descent = gd;
    rec.cg_iterations = cg.iterations;
    rec.cg_breakdown = cg.breakdown;
    if (!(gd < 0.0)) {
      trace.iterations.push_back(rec);
      trace.status = NewtonStatus::Stalled;
      break;
    }
    auto step = armijo_step(sigma, res.x, res.l, cg.direction, g, res.f, cfg);
    rec.alpha = step.alpha;
    rec.backtracks = step.backtracks;
    trace.iterations.push_back(rec);

    res.x = std::move(step.x_next);
    res.l = std::move(step.l_next);
    res.y = inverse_from_cholesky(res.l);
    res.f = step.f_next;
  }
  trace.final_objective = res.f;
  trace.final_grad_norm = restricted_grad_norm(sigma, res.y, support);
  if (trace.status == NewtonStatus::MaxIterations && trace.final_grad_norm <= tol)
    trace.status = NewtonStatus::Converged;
  return res;
}

} // namespace sics

#endif // SICS_NEWTON_HPP
