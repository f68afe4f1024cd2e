#include "gqte/df_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gqte/parallel.hpp"
#include "gqte/sampler.hpp"

namespace gqte {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double l1_discrepancy(const ModelSpec& spec, const Eigen::VectorXd& beta,
                      const TwoSampleData& data, const ReferenceDensity& reference) {
  if (!constraint_satisfied(spec, beta, PercentGrid::equispaced(kConstraintAuditPoints))) {
    return kInf;
  }
  std::vector<double> percentiles;
  try {
    percentiles = solve_percentiles(spec, beta, data.y2);
  } catch (const ConvergenceError&) {
    return kInf;
  } catch (const SingularityError&) {
    return kInf;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < percentiles.size(); ++i) {
    const double q2 = data.y2[i];
    try {
      if (!constraint_satisfied(spec, beta, percentiles[i])) return kInf;
      acc += std::abs(f2_density_quantile(spec, beta, q2, percentiles[i]) - reference(q2));
    } catch (const SingularityError&) {
      return kInf;
    } catch (const DomainError&) {
      return kInf;
    }
  }
  return acc;
}

double l1_discrepancy(const ModelSpec& spec, const Eigen::VectorXd& beta,
                      const TwoSampleData& data) {
  const KernelDensityEstimate kde = KernelDensityEstimate::with_silverman(data.y2);
  return l1_discrepancy(spec, beta, data, [&kde](double y) { return kde(y); });
}

DfSelection select_df(const TwoSampleData& data, const CaseDensity& f1, const LinkFunction& link,
                      SmootherBasis::Family family, int df_max) {
  if (df_max < 1) throw InputError("select_df: df_max must be >= 1");
  const CaseDensity f1_hat = fit_mle(f1, data.y1);
  const KernelDensityEstimate kde = KernelDensityEstimate::with_silverman(data.y2);
  const int n = std::min(data.n1(), data.n2());

  DfSelection out;
  out.discrepancies.assign(static_cast<std::size_t>(df_max), kInf);
  parallel_for(static_cast<std::size_t>(df_max), [&](std::size_t idx) {
    const int df = static_cast<int>(idx) + 1;
    try {
      const SmootherBasis basis = SmootherBasis::for_sample_size(family, df, n);
      const ModelSpec spec(f1_hat, link, basis);
      const OlsFit ols = ols_init(data, link, basis);
      out.discrepancies[idx] =
          l1_discrepancy(spec, ols.beta, data, [&kde](double y) { return kde(y); });
    } catch (const InputError&) {
      // affine bases only admit df 1; undersized samples reject large df
    } catch (const NumericError&) {
    }
  });

  int best = 0;
  for (int df = 1; df <= df_max; ++df) {
    const double d = out.discrepancies[static_cast<std::size_t>(df - 1)];
    if (!std::isfinite(d)) continue;
    if (best == 0 || d < out.discrepancies[static_cast<std::size_t>(best - 1)]) best = df;
  }
  if (best == 0) {
    throw SelectionError("select_df: no feasible candidate in 1.." + std::to_string(df_max));
  }
  out.df = best;
  return out;
}

}  // namespace gqte
