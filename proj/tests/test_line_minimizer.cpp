#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sics/line_minimizer.hpp"

using namespace sics;

namespace {

struct Tuple {
  double sigma, yrr, ycc, yrc;
  double o() const { return yrr * ycc - yrc * yrc; }
};

Tuple random_tuple(Rng& rng) {
  Tuple t;
  t.sigma = rng.uniform(-2.0, 2.0);
  t.yrr = rng.uniform(0.1, 3.0);
  t.ycc = rng.uniform(0.1, 3.0);
  t.yrc = rng.uniform(-0.95, 0.95) * std::sqrt(t.yrr * t.ycc);
  return t;
}

double line_f(const Tuple& t, double theta) {
  return oracle::line_objective(t.sigma, t.yrc, t.o(), theta);
}

double central_diff(const Tuple& t, double theta) {
  const auto [lo, hi] = oracle::feasible_interval(t.yrc, t.o());
  const double h = 1e-5 * std::min(1.0, std::min(theta - lo, hi - theta));
  return (line_f(t, theta + h) - line_f(t, theta - h)) / (2.0 * h);
}

/// Support made of the given coordinates on top of a diagonally dominant X.
SymMatrix sparse_pd(Index n, const std::vector<Coord>& coords, Rng& rng) {
  SymMatrix x(n);
  for (const auto& j : coords) x.set(j.r, j.c, rng.uniform(-0.4, 0.4));
  for (Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Index k = 0; k < n; ++k)
      if (k != i) row += std::abs(x(i, k));
    x.set(i, i, 0.5 + row + rng.uniform(0.0, 1.0));
  }
  return x;
}

} // namespace

TEST(ThetaStar, AlreadyStationary) {
  const auto r = theta_star(0.0, 1.0, 1.0, 0.0);
  EXPECT_EQ(r.theta_star, 0.0);
  EXPECT_EQ(r.delta_f, 0.0);
  EXPECT_TRUE(r.feasible);
}

TEST(ThetaStar, UnitMinor) {
  // Golden-section on 2 t s - log(1 - t^2), s = 0.5: t* = 1 - sqrt(2),
  // minimum -0.22598715591349733 (frozen).
  const auto r = theta_star(0.5, 1.0, 1.0, 0.0);
  EXPECT_NEAR(r.theta_star, 1.0 - std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.delta_f, -0.22598715591349733, 1e-12);
  const Tuple t{0.5, 1.0, 1.0, 0.0};
  EXPECT_LE(std::abs(central_diff(t, r.theta_star)), 1e-10);
  const auto [tg, fg] = oracle::golden_section([&](double x) { return line_f(t, x); }, -1.0, 1.0);
  EXPECT_NEAR(r.delta_f, fg, 1e-12);
  EXPECT_NEAR(r.theta_star, tg, 1e-7);
}

TEST(ThetaStar, ZeroSigmaClosedForm) {
  const auto r = theta_star(0.0, 2.0, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(r.theta_star, 0.5 / 1.75);
  EXPECT_LT(r.delta_f, 0.0);
}

TEST(ThetaStar, DegenerateMinorThrows) {
  EXPECT_THROW(theta_star(0.1, 1.0, 1.0, 1.0), DegenerateCurvature);
  EXPECT_THROW(theta_star(0.1, 1.0, 1.0, 2.0), DegenerateCurvature);
}

TEST(ThetaStar, MatchesGoldenSectionAndIsStationary) {
  Rng rng(2024);
  for (int k = 0; k < 1000; ++k) {
    const Tuple t = random_tuple(rng);
    const auto r = theta_star(t.sigma, t.yrr, t.ycc, t.yrc);
    ASSERT_TRUE(r.feasible);
    EXPECT_FALSE(r.branch_flipped);
    const auto [lo, hi] = oracle::feasible_interval(t.yrc, t.o());
    const auto [tg, fg] = oracle::golden_section([&](double x) { return line_f(t, x); }, lo, hi);
    EXPECT_LE(std::abs(line_f(t, r.theta_star) - fg), 1e-10);
    EXPECT_NEAR(r.delta_f, line_f(t, r.theta_star), 1e-12);
    const double fprime0 = 2.0 * t.sigma - 2.0 * t.yrc;
    EXPECT_LE(std::abs(central_diff(t, r.theta_star)), 1e-8 * (1.0 + std::abs(fprime0)));
    EXPECT_GT(1.0 + 2.0 * t.yrc * r.theta_star - t.o() * r.theta_star * r.theta_star, 0.0);
    EXPECT_LE(r.delta_f, 0.0);
  }
}

TEST(ThetaStar, SignSymmetryAtZeroCross) {
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const double s = rng.uniform(-3.0, 3.0), a = rng.uniform(0.1, 4.0), b = rng.uniform(0.1, 4.0);
    EXPECT_NEAR(theta_star(s, a, b, 0.0).delta_f, theta_star(-s, a, b, 0.0).delta_f, 1e-12);
  }
}

TEST(ThetaStar, ZeroChangeIffGradientEntryVanishes) {
  EXPECT_EQ(theta_star(0.3, 1.0, 2.0, 0.3).delta_f, 0.0);
  EXPECT_LT(theta_star(0.3, 1.0, 2.0, 0.2).delta_f, 0.0);
}

TEST(BestAddition, NoneAtIdentity) {
  const auto i4 = SymMatrix::identity(4);
  EXPECT_FALSE(best_addition(i4, i4, Support(4), 1e-10).has_value());
}

TEST(BestAddition, PicksLargestCorrelation) {
  Dense s = Dense::Identity(4, 4);
  s(0, 1) = s(1, 0) = 0.2;
  s(0, 2) = s(2, 0) = -0.6;  // largest |Sigma_rc|, at (1,3)
  s(1, 3) = s(3, 1) = 0.3;
  s(2, 3) = s(3, 2) = 0.1;
  const auto sigma = SymMatrix::from_dense(s);
  const auto y = SymMatrix::identity(4);  // Y at X0 = diag(1 / Sigma_ii)
  const auto best = best_addition(sigma, y, Support(4), 1e-10);
  ASSERT_TRUE(best.has_value());
  EXPECT_EQ(best->coord, (Coord{0, 2}));
}

TEST(BestAddition, TiesGoToSmallestColumnMajorIndex) {
  Dense s = Dense::Identity(3, 3);
  s(1, 2) = s(2, 1) = 0.4;  // linear index 7
  s(0, 2) = s(2, 0) = -0.4; // linear index 6, same |Sigma_rc|
  const auto best = best_addition(SymMatrix::from_dense(s), SymMatrix::identity(3), Support(3), 0.0);
  ASSERT_TRUE(best.has_value());
  EXPECT_EQ(best->coord, (Coord{0, 2}));
}

TEST(BestAddition, SkipsSupportCoordinates) {
  Dense s = Dense::Identity(3, 3);
  s(0, 1) = s(1, 0) = 0.5;
  s(1, 2) = s(2, 1) = 0.2;
  Support sup(3);
  sup.insert({0, 1});
  const auto best = best_addition(SymMatrix::from_dense(s), SymMatrix::identity(3), sup, 0.0);
  ASSERT_TRUE(best.has_value());
  EXPECT_EQ(best->coord, (Coord{1, 2}));
}

TEST(BestAddition, EqualsExhaustiveFromScratchArgmin) {
  Rng rng(55);
  for (int inst = 0; inst < 6; ++inst) {
    const Index n = 4 + 2 * inst;  // up to 14
    const Dense sigma = oracle::random_spd(n, rng);
    std::vector<Coord> coords{{0, 1}, {1, 3}};
    const auto x = sparse_pd(n, coords, rng);
    Support sup(n);
    for (auto j : coords) sup.insert(j);
    const Dense yd = x.dense().inverse();
    const double f0 = oracle::objective(sigma, x.dense());

    Coord arg{};
    double best = std::numeric_limits<double>::infinity();
    sup.for_each_zero([&](Coord j) {
      const double o = yd(j.r, j.r) * yd(j.c, j.c) - yd(j.r, j.c) * yd(j.r, j.c);
      const auto [lo, hi] = oracle::feasible_interval(yd(j.r, j.c), o);
      const auto [t, fmin] = oracle::golden_section(
          [&](double th) { return oracle::objective(sigma, oracle::perturb(x.dense(), j, th)); }, lo,
          hi);
      (void)t;
      if (fmin - f0 < best - 1e-9) {
        best = fmin - f0;
        arg = j;
      }
    });
    const auto y = inverse_from_cholesky(cholesky(x));
    const auto got = best_addition(SymMatrix::from_dense(sigma), y, sup, 0.0);
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(got->coord, arg) << "n=" << n;
    EXPECT_NEAR(got->line.delta_f, best, 1e-9);
  }
}

TEST(BestSwap, EmptySupport) {
  const auto i3 = SymMatrix::identity(3);
  EXPECT_FALSE(best_swap(i3, i3, i3, Support(3), 0.0).best.has_value());
}

TEST(BestSwap, IncrementalChangeMatchesFromScratch) {
  Rng rng(77);
  for (int inst = 0; inst < 10; ++inst) {
    const Index n = 5 + static_cast<Index>(rng.below(16));  // 5..20
    const auto sigma = SymMatrix::from_dense(oracle::random_spd(n, rng));
    std::vector<Coord> coords{{0, n - 1}, {1, 2}, {2, n - 2}};
    const auto x = sparse_pd(n, coords, rng);
    Support sup(n);
    for (auto j : coords) sup.insert(j);
    const auto y = inverse_from_cholesky(cholesky(x));
    const auto scan = scan_swaps(sigma, x, y, sup);
    ASSERT_TRUE(scan.best.has_value());
    const auto& sw = *scan.best;
    Dense moved = x.dense();
    moved(sw.drop.r, sw.drop.c) = moved(sw.drop.c, sw.drop.r) = 0.0;
    moved = oracle::perturb(moved, sw.add, sw.line.theta_star);
    const double scratch =
        oracle::objective(sigma.dense(), moved) - oracle::objective(sigma.dense(), x.dense());
    EXPECT_NEAR(sw.total_delta, scratch, 1e-9) << "n=" << n;
  }
}

TEST(BestSwap, EqualsExhaustiveFromScratchArgmin) {
  Rng rng(91);
  for (int inst = 0; inst < 4; ++inst) {
    const Index n = 5;
    const Dense sigma = oracle::random_spd(n, rng, 0.1);
    std::vector<Coord> coords{{0, 1}, {2, 4}};
    const auto x = sparse_pd(n, coords, rng);
    Support sup(n);
    for (auto j : coords) sup.insert(j);
    const double f0 = oracle::objective(sigma, x.dense());

    double best = std::numeric_limits<double>::infinity();
    Coord best_drop{}, best_add{};
    for (const auto& i : coords) {
      Dense v = x.dense();
      v(i.r, i.c) = v(i.c, i.r) = 0.0;
      if (!oracle::is_spd(v)) continue;
      const Dense vi = v.inverse();
      sup.for_each_zero([&](Coord j) {
        const double o = vi(j.r, j.r) * vi(j.c, j.c) - vi(j.r, j.c) * vi(j.r, j.c);
        const auto [lo, hi] = oracle::feasible_interval(vi(j.r, j.c), o);
        const auto [t, fmin] = oracle::golden_section(
            [&](double th) { return oracle::objective(sigma, oracle::perturb(v, j, th)); }, lo, hi);
        (void)t;
        if (fmin - f0 < best - 1e-9) {
          best = fmin - f0;
          best_drop = i;
          best_add = j;
        }
      });
    }
    const auto y = inverse_from_cholesky(cholesky(x));
    const auto scan = scan_swaps(SymMatrix::from_dense(sigma), x, y, sup);
    ASSERT_TRUE(scan.best.has_value());
    EXPECT_EQ(scan.best->drop, best_drop);
    EXPECT_EQ(scan.best->add, best_add);
    EXPECT_NEAR(scan.best->total_delta, best, 1e-9);
  }
}

TEST(BestSwap, SkipsInfeasibleRemoval) {
  // A triangle held positive definite by all three entries: dropping (1,2) or
  // (1,3) leaves det = 1 - 0.49 - 0.9025 < 0, dropping (2,3) stays PD.
  Dense x = Dense::Identity(4, 4);
  x(0, 1) = x(1, 0) = 0.7;
  x(0, 2) = x(2, 0) = 0.7;
  x(1, 2) = x(2, 1) = 0.95;
  ASSERT_TRUE(oracle::is_spd(x));
  const auto xs = SymMatrix::from_dense(x);
  const auto sup = Support::of(xs);
  ASSERT_EQ(sup.size(), 3u);
  const auto y = inverse_from_cholesky(cholesky(xs));
  Rng rng(3);
  const auto sigma = SymMatrix::from_dense(oracle::random_spd(4, rng));
  const auto scan = scan_swaps(sigma, xs, y, sup);
  ASSERT_EQ(scan.skipped_drops.size(), 2u);
  EXPECT_EQ(scan.skipped_drops[0], (Coord{0, 1}));
  EXPECT_EQ(scan.skipped_drops[1], (Coord{0, 2}));
  ASSERT_TRUE(scan.best.has_value());
  EXPECT_EQ(scan.best->drop, (Coord{1, 2}));
}
