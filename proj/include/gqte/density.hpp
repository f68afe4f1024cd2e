#pragma once

#include <string>
#include <vector>

#include "gqte/errors.hpp"
#include "gqte/rng.hpp"

namespace gqte {

// Parametric families available for the reference sample's density f1. All
// have positive support. Parameters are packed per family:
//   Uniform            [theta]                support (0, theta]
//   LogNormal          [mu, sigma]
//   Pareto             [tail_index, scale]    support [scale, inf)
//   Gamma              [shape, rate]
//   GammaScaleMixture  [rate, w_1..w_J]       sum_j w_j Ga(j, rate), integer shapes
class CaseDensity {
 public:
  enum class Kind { Uniform, LogNormal, Pareto, Gamma, GammaScaleMixture };

  static CaseDensity uniform(double theta);
  static CaseDensity log_normal(double mu, double sigma);
  static CaseDensity pareto(double tail_index, double scale);
  static CaseDensity gamma(double shape, double rate);
  static CaseDensity gamma_scale_mixture(std::vector<double> weights, double rate);
  static CaseDensity from_params(Kind kind, const std::vector<double>& params);

  static const char* kind_name(Kind kind);
  static Kind kind_from_name(const std::string& name);

  Kind kind() const noexcept { return kind_; }
  const char* name() const noexcept { return kind_name(kind_); }
  const std::vector<double>& params() const noexcept { return params_; }
  int mixture_size() const;  // J; GammaScaleMixture only

  double pdf(double y) const;
  double log_pdf(double y) const;  // -inf outside support
  double cdf(double y) const;
  double quantile(double p) const;
  double sample(RngEngine& eng) const;  // inverse-cdf draw

 private:
  CaseDensity(Kind kind, std::vector<double> params)
      : kind_(kind), params_(std::move(params)) {}
  Kind kind_;
  std::vector<double> params_;
};

// Quantile density q(p) = 1 / f(Q(p)).
double quantile_density(const CaseDensity& f, double p);

// Maximum-likelihood refit of the same family to a sample (the mixture keeps
// its J and is fit by EM; Pareto's scale endpoint is set to the sample
// minimum, the endpoint MLE).
CaseDensity fit_mle(const CaseDensity& prototype, const std::vector<double>& y);

// Conjugate-prior hyperparameters attached to the gamma-scale-mixture family:
// rate ~ Ga(rate_shape, rate_rate) and weights ~ Dirichlet(1/J).
struct GsmPriorDefaults {
  static constexpr int kMixtureSize = 40;
  static constexpr double kRateShape = 845.0;
  static constexpr double kRateRate = 1300.0;
};

// Gaussian-kernel density estimate with a fixed bandwidth.
class KernelDensityEstimate {
 public:
  KernelDensityEstimate(std::vector<double> sample, double bandwidth);
  static double silverman_bandwidth(const std::vector<double>& sample);
  static KernelDensityEstimate with_silverman(std::vector<double> sample);

  double operator()(double y) const;
  double bandwidth() const noexcept { return bandwidth_; }

 private:
  std::vector<double> sample_;
  double bandwidth_;
};

}  // namespace gqte
