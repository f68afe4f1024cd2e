#pragma once

#include <boost/math/special_functions/erf.hpp>
#include <cmath>

#include "gqte/errors.hpp"

namespace gqte {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kSqrt2Pi = 2.5066282746310005024;

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / kSqrt2Pi;
}

inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / kSqrt2);
}

// Inverse standard normal cdf, accurate in both tails.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0,1)");
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace gqte
