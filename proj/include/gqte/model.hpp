#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gqte/basis.hpp"
#include "gqte/density.hpp"
#include "gqte/errors.hpp"
#include "gqte/grid.hpp"
#include "gqte/link.hpp"

namespace gqte {

// Two sorted samples of strictly positive reals. Sample 1 plays the reference
// role (its density is modeled parametrically); sample 2's density is induced
// through the quantile-ratio smoother.
struct TwoSampleData {
  std::vector<double> y1;
  std::vector<double> y2;

  TwoSampleData(std::vector<double> a, std::vector<double> b);
  int n1() const noexcept { return static_cast<int>(y1.size()); }
  int n2() const noexcept { return static_cast<int>(y2.size()); }
};

struct ModelSpec {
  CaseDensity f1;
  LinkFunction link;
  SmootherBasis basis;

  ModelSpec(CaseDensity f, LinkFunction l, SmootherBasis b);
  ModelSpec with_f1(CaseDensity f) const { return ModelSpec(std::move(f), link, basis); }
};

// Number of equispaced percentiles on which the smoothing constraint is
// audited (in addition to every solved percentile).
inline constexpr int kConstraintAuditPoints = 199;

// Q1(p) recovered from a known Q2(p) through the smoother.
double q1_from_q2(const ModelSpec& spec, const Eigen::VectorXd& beta, double q2, double p);

// Model quantile of sample 2: Q2(p) = Q1(p) / h^{-1}(X(p) beta).
double model_quantile2(const ModelSpec& spec, const Eigen::VectorXd& beta, double p);

// Admissibility of beta at percentile p: the induced-density denominator must
// stay nonnegative there. Evaluated in the reduced per-link form
//   identity:  X'(p)b / X(p)b <= 1 / (f1(Q1(p)) Q1(p))   (and X(p)b > 0)
//   log:       X'(p)b        <= 1 / (f1(Q1(p)) Q1(p))
bool constraint_satisfied(const ModelSpec& spec, const Eigen::VectorXd& beta, double p);
bool constraint_satisfied(const ModelSpec& spec, const Eigen::VectorXd& beta,
                          const PercentGrid& grid);

// Density of sample 2 evaluated at its own quantile, f2(Q2(p)), where q2 is
// the quantile value. Throws SingularityError when the denominator collapses.
double f2_density_quantile(const ModelSpec& spec, const Eigen::VectorXd& beta, double q2,
                           double p);

struct SolveOptions {
  // Absolute tolerance on |Q2(p) - y|. Residuals already at the resolution
  // limit of p itself (about eps * p / f2 per ulp) also count as converged,
  // since no representable percentile can do better for very large y.
  double tol = 1e-8;
  int max_iter = 500;
  double clamp = 1e-10; // iterates pinned to (clamp, 1-clamp)
};

// Percentiles p_j with Q2(p_j) = y2[j], found by damped Newton steps
// p <- p + (y - Q2(p)) * f2(Q2(p)). Starts from the plotting positions
// j/(n2+1) unless warm_start supplies previous solutions. ConvergenceError
// carries the index of the first element that failed.
std::vector<double> solve_percentiles(const ModelSpec& spec, const Eigen::VectorXd& beta,
                                      const std::vector<double>& y2_sorted,
                                      const SolveOptions& opts = {},
                                      const std::vector<double>* warm_start = nullptr);
// Reference implementation: identical contract, plain serial loop.
std::vector<double> solve_percentiles_serial(const ModelSpec& spec, const Eigen::VectorXd& beta,
                                             const std::vector<double>& y2_sorted,
                                             const SolveOptions& opts = {},
                                             const std::vector<double>* warm_start = nullptr);

// Joint log likelihood of both samples: sum of log f1 over y1 plus the sum of
// log f2(Q2(p_j)) over the solved percentiles. Constraint violations, solver
// failures, and induced-density singularities all map to -inf so rejection
// sampling over beta can treat them as zero-probability states.
double log_likelihood(const ModelSpec& spec, const Eigen::VectorXd& beta,
                      const TwoSampleData& data);
double log_likelihood_serial(const ModelSpec& spec, const Eigen::VectorXd& beta,
                             const TwoSampleData& data);

// Pieces used by the sampler to avoid recomputing sample-1 terms in the beta
// block. Both return -inf exactly as log_likelihood does.
double log_f1_sum(const CaseDensity& f1, const std::vector<double>& y1);
double log_f2_sum(const ModelSpec& spec, const Eigen::VectorXd& beta,
                  const std::vector<double>& y2_sorted, std::vector<double>* percentiles_io);

}  // namespace gqte
