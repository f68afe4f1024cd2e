#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gqte/grid.hpp"
#include "gqte/model.hpp"
#include "gqte/sampler.hpp"

namespace gqte {

// Choice of g() in the quantile-difference functional, plus evaluation
// points where the functional needs them.
class GqteFunctional {
 public:
  enum class Kind { Qte, Ate, Moment, VarianceDiff, SdDiff, Tailweight, InterRangeRatio };

  static GqteFunctional qte(PercentGrid grid = PercentGrid::equispaced(99));
  static GqteFunctional ate();
  static GqteFunctional moment(int r);
  static GqteFunctional variance_diff();
  static GqteFunctional sd_diff();
  static GqteFunctional tailweight(PercentGrid grid = PercentGrid::equispaced(99));
  static GqteFunctional inter_range_ratio(double p);

  Kind kind() const { return kind_; }
  const PercentGrid& grid() const { return grid_; }
  int moment_order() const { return moment_order_; }
  double range_p() const { return range_p_; }
  bool scalar() const;
  std::string name() const;

 private:
  GqteFunctional(Kind kind, PercentGrid grid, int r, double p);

  Kind kind_;
  PercentGrid grid_;
  int moment_order_;
  double range_p_;
};

// Token grammar used on the command line: qte, ate, moment:r, variance,
// sd, tailweight, ir:p.
GqteFunctional parse_functional(const std::string& token);

struct QuantileCurve {
  std::vector<double> p;
  std::vector<double> q;
};

struct PerDrawQuantiles {
  QuantileCurve q1;  // (p_{2i}, y2_(i) * hinv[X(p_{2i}) beta])
  QuantileCurve q2;  // (p_{1i}, y1_(i) / hinv[X(p_{1i}) beta])
};

PerDrawQuantiles per_draw_quantiles(const ModelSpec& spec, const Eigen::VectorXd& beta,
                                    const TwoSampleData& data);

// Piecewise-linear in p, flat beyond the outermost stored percentiles.
double interpolate_quantile(const QuantileCurve& curve, double p);

struct GqteEstimate {
  std::vector<double> grid;   // evaluation percentiles; empty for scalar functionals
  std::vector<double> point;  // posterior mean per entry
  std::vector<double> lower;  // pointwise 2.5% empirical percentile
  std::vector<double> upper;  // pointwise 97.5% empirical percentile
  Eigen::MatrixXd draw_values;  // retained x points, kept only on request

  std::size_t points() const { return point.size(); }
};

GqteEstimate estimate(const GqteFunctional& functional, const PosteriorDraws& draws,
                      const TwoSampleData& data, const ModelSpec& spec, bool keep_draws = false);

}  // namespace gqte
