#ifndef SICS_SUPPORT_HPP
#define SICS_SUPPORT_HPP

#include <algorithm>
#include <vector>

#include "sics/matrix.hpp"

namespace sics {

/**
 * Set of off-diagonal coordinates allowed to be nonzero, kept sorted in
 * column-major order. Membership is O(1) through a dense mask; the complement
 * (the zero set Z) is enumerated on demand in the same order.
 */
class Support {
public:
  Support() = default;
  explicit Support(Index n) : n_(n), mask_(static_cast<std::size_t>(n * n), 0) {}

  /// Off-diagonal nonzero pattern of X.
  static Support of(const SymMatrix& x) {
    Support s(x.size());
    for (Index c = 0; c < x.size(); ++c)
      for (Index r = 0; r < c; ++r)
        if (x(r, c) != 0.0) s.insert({r, c});
    return s;
  }

  Index dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return coords_.size(); }
  bool empty() const noexcept { return coords_.empty(); }

  /// Number of off-diagonal coordinates outside the support.
  std::size_t zero_count() const noexcept {
    return static_cast<std::size_t>(n_ * (n_ - 1) / 2) - coords_.size();
  }

  bool contains(Coord j) const { return mask_[slot(j)] != 0; }

  void insert(Coord j) {
    check(j);
    if (contains(j)) return;
    mask_[slot(j)] = 1;
    coords_.insert(std::lower_bound(coords_.begin(), coords_.end(), j), j);
  }

  void erase(Coord j) {
    check(j);
    if (!contains(j)) return;
    mask_[slot(j)] = 0;
    coords_.erase(std::lower_bound(coords_.begin(), coords_.end(), j));
  }

  const std::vector<Coord>& coords() const noexcept { return coords_; }
  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }

  /// Calls fn(Coord) for every coordinate of Z in column-major order.
  template <typename Fn>
  void for_each_zero(Fn&& fn) const {
    for (Index c = 1; c < n_; ++c)
      for (Index r = 0; r < c; ++r)
        if (mask_[static_cast<std::size_t>(c * n_ + r)] == 0) fn(Coord{r, c});
  }

  /// Marks the free positions of the restricted problem: the diagonal and
  /// both triangles of every support coordinate.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> free_mask() const {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n_, n_, false);
    for (Index i = 0; i < n_; ++i) m(i, i) = true;
    for (const auto& j : coords_) {
      m(j.r, j.c) = true;
      m(j.c, j.r) = true;
    }
    return m;
  }

  friend bool operator==(const Support& a, const Support& b) {
    return a.n_ == b.n_ && a.coords_ == b.coords_;
  }

private:
  std::size_t slot(Coord j) const { return static_cast<std::size_t>(j.c * n_ + j.r); }

  void check(Coord j) const {
    if (!(0 <= j.r && j.r < j.c && j.c < n_))
      throw InvalidInput("coordinate out of range");
  }

  Index n_ = 0;
  std::vector<unsigned char> mask_;
  std::vector<Coord> coords_;
};

} // namespace sics

#endif // SICS_SUPPORT_HPP
