#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gqte/basis.hpp"
#include "gqte/density.hpp"
#include "gqte/model.hpp"

namespace gqte {

// Density the model-induced f2 is compared against, evaluated at the y2
// order statistics. Production use plugs in a kernel density estimate.
using ReferenceDensity = std::function<double(double)>;

// Empirical L1 discrepancy: sum over the solved percentiles p_i of
// |f2(Q2(p_i) | beta, f1) - reference(y2_(i))|. Candidates whose constraint
// fails at beta, or whose percentile solve breaks down, score +inf.
double l1_discrepancy(const ModelSpec& spec, const Eigen::VectorXd& beta,
                      const TwoSampleData& data, const ReferenceDensity& reference);

// Same, with the reference defaulted to a Silverman-bandwidth kernel
// density estimate of y2.
double l1_discrepancy(const ModelSpec& spec, const Eigen::VectorXd& beta,
                      const TwoSampleData& data);

struct DfSelection {
  int df = 0;
  std::vector<double> discrepancies;  // D0 per candidate, indexed df-1
};

// Minimizes the discrepancy over df in {1..df_max} with the OLS beta and an
// f1 fit on y1 alone; ties break toward the smaller df. Throws SelectionError
// when every candidate is infeasible.
DfSelection select_df(const TwoSampleData& data, const CaseDensity& f1, const LinkFunction& link,
                      SmootherBasis::Family family, int df_max);

}  // namespace gqte
