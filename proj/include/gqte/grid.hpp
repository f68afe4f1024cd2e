#pragma once

#include <cstddef>
#include <vector>

#include "gqte/errors.hpp"

namespace gqte {

// Strictly increasing evaluation percentiles, all inside (0,1).
class PercentGrid {
 public:
  explicit PercentGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw InputError("PercentGrid: empty grid");
    double prev = 0.0;
    for (double p : points_) {
      if (!(p > prev && p < 1.0)) {
        throw InputError("PercentGrid: points must be strictly increasing inside (0,1)");
      }
      prev = p;
    }
  }

  // i/(n+1) for i = 1..n: both the default reporting grids and the plotting
  // positions attached to a sorted sample of size n.
  static PercentGrid equispaced(int n) {
    if (n < 1) throw InputError("PercentGrid: need at least one point");
    std::vector<double> pts(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) pts[static_cast<std::size_t>(i - 1)] = i / (n + 1.0);
    return PercentGrid(std::move(pts));
  }
  static PercentGrid plotting_positions(int n) { return equispaced(n); }

  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<double> points_;
};

}  // namespace gqte
