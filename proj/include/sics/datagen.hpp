#ifndef SICS_DATAGEN_HPP
#define SICS_DATAGEN_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sics/matrix.hpp"

namespace sics {

/// Name recorded in run metadata for the generator below.
inline constexpr const char* kGeneratorName = "mt19937_64/box-muller-v1";

/**
 * Seeded source of uniforms and normals with a platform-independent stream.
 * The engine's output is fixed by the standard; the conversions to doubles are
 * done here because the std distributions are implementation-defined.
 */
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on the open interval (0, 1), 53 random bits.
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal, cosine branch of Box-Muller; consumes two uniforms.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % bound;
  }

private:
  std::mt19937_64 eng_;
};

/// Mean-centred sample covariance with the 1/(m-1) normalization.
inline SymMatrix empirical_covariance(const Dense& samples) {
  if (samples.rows() < 2) throw DegenerateSamples("need at least two samples");
  if (samples.cols() < 1) throw DegenerateSamples("samples have no columns");
  if (!samples.allFinite()) throw DegenerateSamples("samples contain non-finite values");
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Dense centred = samples.rowwise() - mean;
  const Dense cov = (centred.transpose() * centred) / static_cast<double>(samples.rows() - 1);
  return SymMatrix::symmetrized(cov);
}

inline Dense gaussian_samples(Index n, Index m, std::uint64_t seed) {
  Rng rng(seed);
  Dense z(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) z(i, j) = rng.normal();
  return z;
}

/// Empirical covariance of m standard-normal draws in n dimensions.
inline SymMatrix gaussian_covariance(Index n, Index m, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("n must be >= 2");
  if (m < 2) throw InvalidInput("m must be >= 2");
  return empirical_covariance(gaussian_samples(n, m, seed));
}

struct StructuredInstance {
  SymMatrix sigma;
  SymMatrix x_true;
  double diagonal_loading = 0.0;  // added to Sigma's diagonal to restore PD
};

/**
 * Planted sparse precision matrix and a noisy covariance built from it.
 *
 * X_true starts at I, receives p/2 symmetric pairs with values uniform in
 * [-0.5, 0.5] at distinct random coordinates, and then each diagonal entry is
 * raised by its absolute off-diagonal row sum plus 0.1 (strict diagonal
 * dominance). Sigma = X_true^{-1} + noise_sd * N with N symmetric standard
 * normal; if that is not positive definite, the diagonal is loaded by doubling
 * amounts starting at 1e-3 times the mean diagonal until it is.
 */
inline StructuredInstance sparse_structured_covariance(Index n, Index p, double noise_sd,
                                                       std::uint64_t seed) {
  if (n < 2) throw InvalidInput("n must be >= 2");
  if (p < 0 || p % 2 != 0) throw InvalidInput("p must be a non-negative even number");
  if (p > n * (n - 1)) throw InvalidInput("p exceeds the number of off-diagonal entries");
  if (!(noise_sd >= 0.0)) throw InvalidInput("noise_sd must be non-negative");

  Rng rng(seed);
  // Partial Fisher-Yates over the column-major list of upper-triangle slots.
  std::vector<Coord> slots;
  slots.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index c = 1; c < n; ++c)
    for (Index r = 0; r < c; ++r) slots.push_back({r, c});
  const std::size_t pairs = static_cast<std::size_t>(p / 2);
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(slots.size() - k));
    std::swap(slots[k], slots[pick]);
  }

  Dense xt = Dense::Identity(n, n);
  for (std::size_t k = 0; k < pairs; ++k) {
    double v = 0.0;
    while (v == 0.0) v = rng.uniform(-0.5, 0.5);
    xt(slots[k].r, slots[k].c) = v;
    xt(slots[k].c, slots[k].r) = v;
  }
  for (Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Index j = 0; j < n; ++j)
      if (j != i) row += std::abs(xt(i, j));
    xt(i, i) += row + 0.1;
  }

  StructuredInstance out;
  out.x_true = SymMatrix::symmetrized(xt);
  Dense sig = inverse_from_cholesky(cholesky(out.x_true)).dense();
  if (noise_sd > 0.0) {
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i <= j; ++i) {
        const double e = noise_sd * rng.normal();
        sig(i, j) += e;
        if (i != j) sig(j, i) += e;
      }
  }
  SymMatrix sigma = SymMatrix::symmetrized(sig);
  const double base = 1e-3 * sig.diagonal().cwiseAbs().mean();
  double load = 0.0;
  for (double step = base; !is_positive_definite(sigma) || sigma.dense().diagonal().minCoeff() <= 0.0;
       step *= 2.0) {
    load += step;
    sigma = SymMatrix::symmetrized(sig + load * Dense::Identity(n, n));
  }
  out.sigma = std::move(sigma);
  out.diagonal_loading = load;
  return out;
}

} // namespace sics

#endif // SICS_DATAGEN_HPP
