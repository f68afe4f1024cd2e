#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "gqte/density.hpp"
#include "gqte/model.hpp"
#include "gqte/normal.hpp"
#include "gqte/rng.hpp"

namespace gqte::test {

inline std::vector<double> sample_from(const CaseDensity& f, int n, std::uint64_t seed,
                                       std::uint64_t stream = 0) {
  RngEngine eng = make_engine(seed, stream);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out) v = f.sample(eng);
  return out;
}

// Synthetic pair whose true quantile-ratio smoother is b0 + b1 * Phi^{-1}(p)
// under the log link: y1 log-normal(mu1, sigma1), y2 log-normal(mu1 - b0,
// sigma1 - b1).
inline TwoSampleData lognormal_pair(int n1, int n2, double mu1, double sigma1, double b0,
                                    double b1, std::uint64_t seed) {
  const CaseDensity f1 = CaseDensity::log_normal(mu1, sigma1);
  const CaseDensity f2 = CaseDensity::log_normal(mu1 - b0, sigma1 - b1);
  return TwoSampleData(sample_from(f1, n1, seed, 1), sample_from(f2, n2, seed, 2));
}

// One-sample Kolmogorov-Smirnov statistic against a reference cdf.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - (static_cast<double>(i) + 1.0) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace gqte::test
