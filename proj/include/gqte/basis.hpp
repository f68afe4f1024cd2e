#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gqte/errors.hpp"

namespace gqte {

// Design row X(p) of the percentile smoother s(p) = X(p) beta. The first
// column is identically one, so beta[0] is an intercept and df counts the
// remaining columns.
//
// Families:
//   OrthoPoly      polynomials orthonormalized against the uniform measure on
//                  a fixed 1001-point grid in (0,1)
//   NaturalSpline  natural cubic spline with df-1 interior knots at j/df and
//                  configurable boundary knots (0.005/0.995 unless tied to a
//                  sample's plotting positions)
//   NormalQuantile [1, Phi^{-1}(p)]; df is fixed at 1
//   LogSurvival    [1, log(1-p)]; df is fixed at 1
class SmootherBasis {
 public:
  enum class Family { OrthoPoly, NaturalSpline, NormalQuantile, LogSurvival };

  static SmootherBasis make(Family family, int df);
  static SmootherBasis natural_spline(int df, double boundary_lo, double boundary_hi);
  // Spline boundary knots at the outermost plotting positions 1/(n+1) and
  // n/(n+1); other families ignore n.
  static SmootherBasis for_sample_size(Family family, int df, int n);
  // Spline rebuilt from an explicit knot vector (archives store it verbatim).
  static SmootherBasis natural_spline_with_knots(std::vector<double> knots);

  static const char* family_name(Family family);
  static Family family_from_name(const std::string& name);

  Family family() const noexcept { return family_; }
  int df() const noexcept { return df_; }
  int columns() const noexcept { return df_ + 1; }
  // Full knot vector (boundary + interior); empty unless NaturalSpline.
  const std::vector<double>& knots() const noexcept { return knots_; }

  Eigen::RowVectorXd eval(double p) const;
  Eigen::RowVectorXd deriv(double p) const;

  // Convenience products X(p) beta and X'(p) beta.
  double value(double p, const Eigen::VectorXd& beta) const;
  double slope(double p, const Eigen::VectorXd& beta) const;

 private:
  SmootherBasis(Family family, int df) : family_(family), df_(df) {}
  void build_ortho_recurrence();
  void check_p(double p) const;

  Family family_;
  int df_;
  std::vector<double> knots_;
  // Monic three-term recurrence and norms for the orthonormal polynomials.
  std::vector<double> rec_a_, rec_b_, rec_norm_;
};

}  // namespace gqte
