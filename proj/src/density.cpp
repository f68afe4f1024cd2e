#include "gqte/density.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gqte/normal.hpp"
#include "gqte/stats.hpp"

namespace gqte {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
  if (!ok) throw InputError(msg);
}

double gsm_log_pdf(const std::vector<double>& params, double y) {
  // params = [rate, w_1..w_J]; log-sum-exp over the component log densities.
  if (!(y > 0.0)) return kNegInf;
  const double rate = params[0];
  const double logy = std::log(y);
  const double lograte = std::log(rate);
  double best = kNegInf;
  std::vector<double> terms;
  terms.reserve(params.size() - 1);
  for (std::size_t j = 1; j < params.size(); ++j) {
    const double w = params[j];
    if (w <= 0.0) {
      terms.push_back(kNegInf);
      continue;
    }
    const double shape = static_cast<double>(j);
    const double t = std::log(w) + shape * lograte + (shape - 1.0) * logy - rate * y -
                     std::lgamma(shape);
    terms.push_back(t);
    best = std::max(best, t);
  }
  if (best == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - best);
  return best + std::log(acc);
}

double gsm_cdf(const std::vector<double>& params, double y) {
  if (!(y > 0.0)) return 0.0;
  const double rate = params[0];
  double acc = 0.0;
  for (std::size_t j = 1; j < params.size(); ++j) {
    acc += params[j] * boost::math::gamma_p(static_cast<double>(j), rate * y);
  }
  return std::min(acc, 1.0);
}

double gsm_mean(const std::vector<double>& params) {
  double m = 0.0;
  for (std::size_t j = 1; j < params.size(); ++j) m += params[j] * static_cast<double>(j);
  return m / params[0];
}

// Bracketed bisection of a monotone cdf; shared by the mixture quantile.
double invert_cdf(const std::vector<double>& params, double p) {
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * gsm_mean(params));
  int grow = 0;
  while (gsm_cdf(params, hi) < p) {
    hi *= 2.0;
    if (++grow > 200) throw NumericError("mixture quantile: failed to bracket");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gsm_cdf(params, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-10 * std::max(1.0, lo)) return 0.5 * (lo + hi);
  }
  throw NumericError("mixture quantile: bisection did not converge in 200 steps");
}

// Shape MLE for the gamma family: Newton on log(k) - digamma(k) = s.
double gamma_shape_mle(double s) {
  if (!(s > 0.0)) throw NumericError("gamma fit: degenerate sample");
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int it = 0; it < 100; ++it) {
    const double f = std::log(k) - boost::math::digamma(k) - s;
    const double fp = 1.0 / k - boost::math::trigamma(k);
    const double step = f / fp;
    k -= step;
    if (!(k > 0.0)) throw NumericError("gamma fit: shape update left the domain");
    if (std::abs(step) < 1e-12 * std::max(1.0, k)) break;
  }
  return k;
}

// EM for the gamma-scale mixture with fixed J: responsibilities in the E
// step, closed-form weight and rate updates in the M step.
CaseDensity gsm_em_fit(int J, const std::vector<double>& y) {
  const std::size_t n = y.size();
  const double ybar = mean_of(y);
  std::vector<double> w(static_cast<std::size_t>(J), 1.0 / J);
  double rate = 0.5 * (J + 1) / ybar;

  std::vector<double> logy(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(y[i] > 0.0, "mixture fit: sample must be positive");
    logy[i] = std::log(y[i]);
  }
  std::vector<double> lgam(static_cast<std::size_t>(J) + 1, 0.0);
  for (int j = 1; j <= J; ++j) lgam[static_cast<std::size_t>(j)] = std::lgamma(j);

  double prev_ll = kNegInf;
  std::vector<double> resp(static_cast<std::size_t>(J));
  for (int it = 0; it < 500; ++it) {
    const double lograte = std::log(rate);
    std::vector<double> wsum(static_cast<std::size_t>(J), 0.0);
    double jsum = 0.0;
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = kNegInf;
      for (int j = 1; j <= J; ++j) {
        const std::size_t jj = static_cast<std::size_t>(j - 1);
        double t = w[jj] > 0.0 ? std::log(w[jj]) + j * lograte + (j - 1.0) * logy[i] -
                                     rate * y[i] - lgam[static_cast<std::size_t>(j)]
                               : kNegInf;
        resp[jj] = t;
        best = std::max(best, t);
      }
      double norm = 0.0;
      for (int j = 0; j < J; ++j) {
        resp[static_cast<std::size_t>(j)] = std::exp(resp[static_cast<std::size_t>(j)] - best);
        norm += resp[static_cast<std::size_t>(j)];
      }
      ll += best + std::log(norm);
      for (int j = 0; j < J; ++j) {
        const double r = resp[static_cast<std::size_t>(j)] / norm;
        wsum[static_cast<std::size_t>(j)] += r;
        jsum += r * (j + 1.0);
      }
    }
    for (int j = 0; j < J; ++j) w[static_cast<std::size_t>(j)] = wsum[static_cast<std::size_t>(j)] / n;
    rate = jsum / (n * ybar);
    if (std::abs(ll - prev_ll) < 1e-10 * (1.0 + std::abs(ll))) break;
    prev_ll = ll;
  }
  // EM can drive weights to exact zero, which a Dirichlet(1/J) prior then
  // scores at -inf. Floor and renormalize so the fit is a usable chain start.
  double total = 0.0;
  for (double& v : w) {
    v = std::max(v, 1e-10);
    total += v;
  }
  for (double& v : w) v /= total;
  return CaseDensity::gamma_scale_mixture(std::move(w), rate);
}

}  // namespace

CaseDensity CaseDensity::uniform(double theta) {
  require(theta > 0.0, "uniform: theta must be positive");
  return CaseDensity(Kind::Uniform, {theta});
}

CaseDensity CaseDensity::log_normal(double mu, double sigma) {
  require(sigma > 0.0, "log-normal: sigma must be positive");
  return CaseDensity(Kind::LogNormal, {mu, sigma});
}

CaseDensity CaseDensity::pareto(double tail_index, double scale) {
  require(tail_index > 0.0, "pareto: tail index must be positive");
  require(scale > 0.0, "pareto: scale must be positive");
  return CaseDensity(Kind::Pareto, {tail_index, scale});
}

CaseDensity CaseDensity::gamma(double shape, double rate) {
  require(shape > 0.0, "gamma: shape must be positive");
  require(rate > 0.0, "gamma: rate must be positive");
  return CaseDensity(Kind::Gamma, {shape, rate});
}

CaseDensity CaseDensity::gamma_scale_mixture(std::vector<double> weights, double rate) {
  require(rate > 0.0, "gamma-scale-mixture: rate must be positive");
  require(!weights.empty(), "gamma-scale-mixture: need at least one weight");
  double sum = 0.0;
  for (double w : weights) {
    require(w >= 0.0, "gamma-scale-mixture: weights must be nonnegative");
    sum += w;
  }
  require(std::abs(sum - 1.0) <= 1e-12, "gamma-scale-mixture: weights must sum to one");
  std::vector<double> params;
  params.reserve(weights.size() + 1);
  params.push_back(rate);
  params.insert(params.end(), weights.begin(), weights.end());
  return CaseDensity(Kind::GammaScaleMixture, std::move(params));
}

CaseDensity CaseDensity::from_params(Kind kind, const std::vector<double>& params) {
  switch (kind) {
    case Kind::Uniform:
      require(params.size() == 1, "uniform: expected one parameter");
      return uniform(params[0]);
    case Kind::LogNormal:
      require(params.size() == 2, "log-normal: expected two parameters");
      return log_normal(params[0], params[1]);
    case Kind::Pareto:
      require(params.size() == 2, "pareto: expected two parameters");
      return pareto(params[0], params[1]);
    case Kind::Gamma:
      require(params.size() == 2, "gamma: expected two parameters");
      return gamma(params[0], params[1]);
    case Kind::GammaScaleMixture: {
      require(params.size() >= 2, "gamma-scale-mixture: expected rate plus weights");
      std::vector<double> w(params.begin() + 1, params.end());
      return gamma_scale_mixture(std::move(w), params[0]);
    }
  }
  throw InputError("unknown density kind");
}

const char* CaseDensity::kind_name(Kind kind) {
  switch (kind) {
    case Kind::Uniform: return "uniform";
    case Kind::LogNormal: return "lognormal";
    case Kind::Pareto: return "pareto";
    case Kind::Gamma: return "gamma";
    case Kind::GammaScaleMixture: return "gsm";
  }
  return "?";
}

CaseDensity::Kind CaseDensity::kind_from_name(const std::string& name) {
  if (name == "uniform") return Kind::Uniform;
  if (name == "lognormal") return Kind::LogNormal;
  if (name == "pareto") return Kind::Pareto;
  if (name == "gamma") return Kind::Gamma;
  if (name == "gsm") return Kind::GammaScaleMixture;
  throw InputError("unknown density family '" + name + "'");
}

int CaseDensity::mixture_size() const {
  if (kind_ != Kind::GammaScaleMixture) throw InputError("mixture_size: not a mixture");
  return static_cast<int>(params_.size()) - 1;
}

double CaseDensity::pdf(double y) const {
  switch (kind_) {
    case Kind::Uniform:
      return (y >= 0.0 && y <= params_[0]) ? 1.0 / params_[0] : 0.0;
    case Kind::LogNormal: {
      if (!(y > 0.0)) return 0.0;
      const double z = (std::log(y) - params_[0]) / params_[1];
      return normal_pdf(z) / (y * params_[1]);
    }
    case Kind::Pareto: {
      const double a = params_[0], b = params_[1];
      if (y < b) return 0.0;
      return a * std::pow(b / y, a) / y;
    }
    case Kind::Gamma: {
      if (!(y > 0.0)) return 0.0;
      const double k = params_[0], r = params_[1];
      return std::exp(k * std::log(r) + (k - 1.0) * std::log(y) - r * y - std::lgamma(k));
    }
    case Kind::GammaScaleMixture: {
      const double lp = gsm_log_pdf(params_, y);
      return lp == kNegInf ? 0.0 : std::exp(lp);
    }
  }
  return 0.0;
}

double CaseDensity::log_pdf(double y) const {
  switch (kind_) {
    case Kind::Uniform:
      return (y >= 0.0 && y <= params_[0]) ? -std::log(params_[0]) : kNegInf;
    case Kind::LogNormal: {
      if (!(y > 0.0)) return kNegInf;
      const double z = (std::log(y) - params_[0]) / params_[1];
      return -0.5 * z * z - std::log(y * params_[1] * kSqrt2Pi);
    }
    case Kind::Pareto: {
      const double a = params_[0], b = params_[1];
      if (y < b) return kNegInf;
      return std::log(a) + a * std::log(b) - (a + 1.0) * std::log(y);
    }
    case Kind::Gamma: {
      if (!(y > 0.0)) return kNegInf;
      const double k = params_[0], r = params_[1];
      return k * std::log(r) + (k - 1.0) * std::log(y) - r * y - std::lgamma(k);
    }
    case Kind::GammaScaleMixture:
      return gsm_log_pdf(params_, y);
  }
  return kNegInf;
}

double CaseDensity::cdf(double y) const {
  switch (kind_) {
    case Kind::Uniform:
      return std::clamp(y / params_[0], 0.0, 1.0);
    case Kind::LogNormal:
      return y > 0.0 ? normal_cdf((std::log(y) - params_[0]) / params_[1]) : 0.0;
    case Kind::Pareto: {
      const double a = params_[0], b = params_[1];
      return y >= b ? 1.0 - std::pow(b / y, a) : 0.0;
    }
    case Kind::Gamma:
      return y > 0.0 ? boost::math::gamma_p(params_[0], params_[1] * y) : 0.0;
    case Kind::GammaScaleMixture:
      return gsm_cdf(params_, y);
  }
  return 0.0;
}

double CaseDensity::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0,1)");
  switch (kind_) {
    case Kind::Uniform:
      return params_[0] * p;
    case Kind::LogNormal:
      return std::exp(params_[0] + params_[1] * normal_quantile(p));
    case Kind::Pareto:
      return params_[1] * std::pow(1.0 - p, -1.0 / params_[0]);
    case Kind::Gamma:
      return boost::math::gamma_p_inv(params_[0], p) / params_[1];
    case Kind::GammaScaleMixture:
      return invert_cdf(params_, p);
  }
  return 0.0;
}

double CaseDensity::sample(RngEngine& eng) const { return quantile(runif01(eng)); }

double quantile_density(const CaseDensity& f, double p) {
  const double fq = f.pdf(f.quantile(p));
  if (!(fq > 0.0)) throw SingularityError("quantile_density: density is zero at Q(p)");
  return 1.0 / fq;
}

CaseDensity fit_mle(const CaseDensity& prototype, const std::vector<double>& y) {
  if (y.empty()) throw InputError("fit_mle: empty sample");
  for (double v : y) require(v > 0.0 && std::isfinite(v), "fit_mle: sample must be positive");
  switch (prototype.kind()) {
    case CaseDensity::Kind::Uniform:
      return CaseDensity::uniform(*std::max_element(y.begin(), y.end()));
    case CaseDensity::Kind::LogNormal: {
      std::vector<double> ly(y.size());
      std::transform(y.begin(), y.end(), ly.begin(), [](double v) { return std::log(v); });
      const double mu = mean_of(ly);
      double ss = 0.0;
      for (double v : ly) ss += (v - mu) * (v - mu);
      const double sigma = std::sqrt(ss / static_cast<double>(ly.size()));
      if (!(sigma > 0.0)) throw NumericError("log-normal fit: degenerate sample");
      return CaseDensity::log_normal(mu, sigma);
    }
    case CaseDensity::Kind::Pareto: {
      const double b = *std::min_element(y.begin(), y.end());
      double s = 0.0;
      for (double v : y) s += std::log(v / b);
      if (!(s > 0.0)) throw NumericError("pareto fit: degenerate sample");
      return CaseDensity::pareto(static_cast<double>(y.size()) / s, b);
    }
    case CaseDensity::Kind::Gamma: {
      const double ybar = mean_of(y);
      double logbar = 0.0;
      for (double v : y) logbar += std::log(v);
      logbar /= static_cast<double>(y.size());
      const double k = gamma_shape_mle(std::log(ybar) - logbar);
      return CaseDensity::gamma(k, k / ybar);
    }
    case CaseDensity::Kind::GammaScaleMixture:
      return gsm_em_fit(prototype.mixture_size(), y);
  }
  throw InputError("fit_mle: unknown family");
}

KernelDensityEstimate::KernelDensityEstimate(std::vector<double> sample, double bandwidth)
    : sample_(std::move(sample)), bandwidth_(bandwidth) {
  if (sample_.empty()) throw InputError("kde: empty sample");
  if (!(bandwidth_ > 0.0)) throw InputError("kde: bandwidth must be positive");
}

double KernelDensityEstimate::silverman_bandwidth(const std::vector<double>& sample) {
  if (sample.size() < 2) throw InputError("kde: need at least two values for a bandwidth");
  std::vector<double> sorted(sample);
  std::sort(sorted.begin(), sorted.end());
  const double sd = sample_sd(sorted);
  const double iqr = percentile_sorted(sorted, 0.75) - percentile_sorted(sorted, 0.25);
  const double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) throw InputError("kde: sample spread is zero");
  return 0.9 * spread * std::pow(static_cast<double>(sample.size()), -0.2);
}

KernelDensityEstimate KernelDensityEstimate::with_silverman(std::vector<double> sample) {
  const double h = silverman_bandwidth(sample);
  return KernelDensityEstimate(std::move(sample), h);
}

double KernelDensityEstimate::operator()(double y) const {
  double acc = 0.0;
  for (double x : sample_) acc += normal_pdf((y - x) / bandwidth_);
  return acc / (bandwidth_ * static_cast<double>(sample_.size()));
}

}  // namespace gqte
