#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gqte/errors.hpp"

namespace gqte {

inline double mean_of(const std::vector<double>& x) {
  if (x.empty()) throw InputError("mean_of: empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double sample_sd(const std::vector<double>& x) {
  if (x.size() < 2) throw InputError("sample_sd: need at least two values");
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

// Linear-interpolation quantile of an already sorted sample (the convention
// used throughout for empirical percentiles and credible bands).
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw InputError("percentile_sorted: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("percentile_sorted: q outside [0,1]");
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= n) return sorted[n - 1];
  const double w = h - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

inline double percentile_of(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  return percentile_sorted(x, q);
}

}  // namespace gqte
