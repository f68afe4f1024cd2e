#include "gqte/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gqte/parallel.hpp"

namespace gqte {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// One Newton solve for Q2(p) = y. The quantile density 1/f2(Q2(p)) is the
// exact derivative of Q2, so steps are p + (y - Q2(p)) * f2. Steps that leave
// (0,1) are halved until they land inside. Two refinements keep tail points
// honest: convergence also accepts residuals at the resolution limit of the
// percentile itself (one ulp of p moves Q2 by about eps*p/f2, which can
// exceed any fixed tolerance for large y), and a residual pointing past a
// clamp boundary proves the root is unreachable since Q2 is increasing.
double solve_one(const ModelSpec& spec, const Eigen::VectorXd& beta, double y, double p0,
                 const SolveOptions& opts, std::ptrdiff_t index) {
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  double p = std::clamp(p0, opts.clamp, 1.0 - opts.clamp);
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const double q2 = model_quantile2(spec, beta, p);
    const double resid = y - q2;
    if (std::abs(resid) < opts.tol) return p;
    if ((p >= 1.0 - opts.clamp && resid > 0.0) || (p <= opts.clamp && resid < 0.0)) {
      throw ConvergenceError("percentile solve: root beyond the percentile range", index);
    }
    const double f2 = f2_density_quantile(spec, beta, q2, p);
    if (!(f2 > 0.0) || !std::isfinite(f2)) {
      throw ConvergenceError("percentile solve: vanishing induced density", index);
    }
    if (std::abs(resid) <= 4.0 * kEps * p / f2) return p;
    if (std::abs(resid) < best) {
      best = std::abs(resid);
      stalled = 0;
    } else if (++stalled >= 8) {
      throw ConvergenceError("percentile solve: stalled without converging", index);
    }
    double step = resid * f2;
    double next = p + step;
    while (next <= 0.0 || next >= 1.0) {
      step *= 0.5;
      next = p + step;
      if (step == 0.0) break;
    }
    p = std::clamp(next, opts.clamp, 1.0 - opts.clamp);
  }
  throw ConvergenceError("percentile solve: no convergence within iteration cap", index);
}

void check_beta(const ModelSpec& spec, const Eigen::VectorXd& beta) {
  if (beta.size() != spec.basis.columns()) {
    throw InputError("beta length must equal basis df+1");
  }
}

std::vector<double> validated_sample(std::vector<double> y, const char* which) {
  if (y.empty()) throw InputError(std::string(which) + ": empty sample");
  for (double v : y) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InputError(std::string(which) + ": values must be positive finite reals");
    }
  }
  std::sort(y.begin(), y.end());
  return y;
}

}  // namespace

TwoSampleData::TwoSampleData(std::vector<double> a, std::vector<double> b)
    : y1(validated_sample(std::move(a), "y1")), y2(validated_sample(std::move(b), "y2")) {}

ModelSpec::ModelSpec(CaseDensity f, LinkFunction l, SmootherBasis b)
    : f1(std::move(f)), link(l), basis(std::move(b)) {}

double q1_from_q2(const ModelSpec& spec, const Eigen::VectorXd& beta, double q2, double p) {
  check_beta(spec, beta);
  return q2 * spec.link.inverse(spec.basis.value(p, beta));
}

double model_quantile2(const ModelSpec& spec, const Eigen::VectorXd& beta, double p) {
  const double ratio = spec.link.inverse(spec.basis.value(p, beta));
  if (!(ratio > 0.0)) throw SingularityError("model quantile: nonpositive quantile ratio");
  return spec.f1.quantile(p) / ratio;
}

bool constraint_satisfied(const ModelSpec& spec, const Eigen::VectorXd& beta, double p) {
  check_beta(spec, beta);
  const double z = spec.basis.value(p, beta);
  const double slope = spec.basis.slope(p, beta);
  const double q1 = spec.f1.quantile(p);
  const double fq1 = spec.f1.pdf(q1) * q1;
  // fq1 == 0 makes the bound infinite; only the ratio-positivity part remains.
  if (spec.link.kind() == LinkFunction::Kind::Identity) {
    if (!(z > 0.0)) return false;
    return fq1 > 0.0 ? slope / z <= 1.0 / fq1 : true;
  }
  return fq1 > 0.0 ? slope <= 1.0 / fq1 : true;
}

bool constraint_satisfied(const ModelSpec& spec, const Eigen::VectorXd& beta,
                          const PercentGrid& grid) {
  for (double p : grid.points()) {
    if (!constraint_satisfied(spec, beta, p)) return false;
  }
  return true;
}

double f2_density_quantile(const ModelSpec& spec, const Eigen::VectorXd& beta, double q2,
                           double p) {
  check_beta(spec, beta);
  const double z = spec.basis.value(p, beta);
  const double ratio = spec.link.inverse(z);
  if (!(ratio > 0.0)) throw SingularityError("induced density: nonpositive quantile ratio");
  const double f1v = spec.f1.pdf(q2 * ratio);
  const double numer = f1v * ratio;
  const double denom = 1.0 - f1v * spec.basis.slope(p, beta) * q2 * spec.link.inverse_deriv(z);
  if (denom <= 1e-12) {
    throw SingularityError("induced density: denominator collapsed");
  }
  return numer / denom;
}

std::vector<double> solve_percentiles_serial(const ModelSpec& spec, const Eigen::VectorXd& beta,
                                             const std::vector<double>& y2_sorted,
                                             const SolveOptions& opts,
                                             const std::vector<double>* warm_start) {
  check_beta(spec, beta);
  const std::size_t n = y2_sorted.size();
  if (warm_start && warm_start->size() != n) {
    throw InputError("solve_percentiles: warm start size mismatch");
  }
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double p0 = warm_start ? (*warm_start)[j] : (j + 1) / static_cast<double>(n + 1);
    out[j] = solve_one(spec, beta, y2_sorted[j], p0, opts, static_cast<std::ptrdiff_t>(j));
  }
  return out;
}

std::vector<double> solve_percentiles(const ModelSpec& spec, const Eigen::VectorXd& beta,
                                      const std::vector<double>& y2_sorted,
                                      const SolveOptions& opts,
                                      const std::vector<double>* warm_start) {
  check_beta(spec, beta);
  const std::size_t n = y2_sorted.size();
  if (warm_start && warm_start->size() != n) {
    throw InputError("solve_percentiles: warm start size mismatch");
  }
  std::vector<double> out(n);
  parallel_for(static_cast<std::ptrdiff_t>(n), [&](std::ptrdiff_t j) {
    const double p0 = warm_start ? (*warm_start)[static_cast<std::size_t>(j)]
                                 : (j + 1) / static_cast<double>(n + 1);
    out[static_cast<std::size_t>(j)] =
        solve_one(spec, beta, y2_sorted[static_cast<std::size_t>(j)], p0, opts, j);
  });
  return out;
}

double log_f1_sum(const CaseDensity& f1, const std::vector<double>& y1) {
  double acc = 0.0;
  for (double y : y1) {
    const double lp = f1.log_pdf(y);
    if (lp == kNegInf) return kNegInf;
    acc += lp;
  }
  return acc;
}

double log_f2_sum(const ModelSpec& spec, const Eigen::VectorXd& beta,
                  const std::vector<double>& y2_sorted, std::vector<double>* percentiles_io) {
  const PercentGrid audit = PercentGrid::equispaced(kConstraintAuditPoints);
  if (!constraint_satisfied(spec, beta, audit)) return kNegInf;

  std::vector<double> ps;
  try {
    const std::vector<double>* warm =
        (percentiles_io && percentiles_io->size() == y2_sorted.size()) ? percentiles_io : nullptr;
    ps = solve_percentiles(spec, beta, y2_sorted, {}, warm);
  } catch (const ConvergenceError&) {
    return kNegInf;
  } catch (const SingularityError&) {
    return kNegInf;
  }

  const std::size_t n = ps.size();
  std::vector<double> terms(n);
  try {
    parallel_for(static_cast<std::ptrdiff_t>(n), [&](std::ptrdiff_t j) {
      const double p = ps[static_cast<std::size_t>(j)];
      if (!constraint_satisfied(spec, beta, p)) {
        terms[static_cast<std::size_t>(j)] = kNegInf;
        return;
      }
      const double q2 = model_quantile2(spec, beta, p);
      const double f2 = f2_density_quantile(spec, beta, q2, p);
      terms[static_cast<std::size_t>(j)] = f2 > 0.0 ? std::log(f2) : kNegInf;
    });
  } catch (const SingularityError&) {
    return kNegInf;
  }

  double acc = 0.0;
  for (double t : terms) {  // summed in index order: bit-stable for any thread count
    if (t == kNegInf) return kNegInf;
    acc += t;
  }
  if (percentiles_io) *percentiles_io = std::move(ps);
  return acc;
}

double log_likelihood(const ModelSpec& spec, const Eigen::VectorXd& beta,
                      const TwoSampleData& data) {
  const double part1 = log_f1_sum(spec.f1, data.y1);
  if (part1 == kNegInf) return kNegInf;
  const double part2 = log_f2_sum(spec, beta, data.y2, nullptr);
  if (part2 == kNegInf) return kNegInf;
  return part1 + part2;
}

double log_likelihood_serial(const ModelSpec& spec, const Eigen::VectorXd& beta,
                             const TwoSampleData& data) {
  const double part1 = log_f1_sum(spec.f1, data.y1);
  if (part1 == kNegInf) return kNegInf;

  const PercentGrid audit = PercentGrid::equispaced(kConstraintAuditPoints);
  if (!constraint_satisfied(spec, beta, audit)) return kNegInf;
  std::vector<double> ps;
  try {
    ps = solve_percentiles_serial(spec, beta, data.y2);
  } catch (const ConvergenceError&) {
    return kNegInf;
  } catch (const SingularityError&) {
    return kNegInf;
  }
  double acc = 0.0;
  for (double p : ps) {
    if (!constraint_satisfied(spec, beta, p)) return kNegInf;
    double f2 = 0.0;
    try {
      f2 = f2_density_quantile(spec, beta, model_quantile2(spec, beta, p), p);
    } catch (const SingularityError&) {
      return kNegInf;
    }
    if (!(f2 > 0.0)) return kNegInf;
    acc += std::log(f2);
  }
  return part1 + acc;
}

}  // namespace gqte
