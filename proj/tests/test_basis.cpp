#include "doctest.h"

#include <cmath>
#include <vector>

#include "gqte/basis.hpp"
#include "gqte/errors.hpp"
#include "gqte/grid.hpp"
#include "helpers.hpp"

using namespace gqte;

namespace {

std::vector<SmootherBasis> all_families_df(int df) {
  return {SmootherBasis::make(SmootherBasis::Family::OrthoPoly, df),
          SmootherBasis::make(SmootherBasis::Family::NaturalSpline, df),
          SmootherBasis::make(SmootherBasis::Family::NormalQuantile, 1),
          SmootherBasis::make(SmootherBasis::Family::LogSurvival, 1)};
}

}  // namespace

TEST_CASE("percent grids are validated and equispaced") {
  const PercentGrid g = PercentGrid::equispaced(9);
  REQUIRE(g.points().size() == 9);
  CHECK(g.points()[0] == doctest::Approx(0.1));
  CHECK(g.points()[8] == doctest::Approx(0.9));
  CHECK_THROWS_AS(PercentGrid({0.5, 0.5}), InputError);
  CHECK_THROWS_AS(PercentGrid({0.0, 0.5}), InputError);
  CHECK_THROWS_AS(PercentGrid({}), InputError);
  CHECK_THROWS_AS(PercentGrid({0.7, 0.3}), InputError);
}

TEST_CASE("every basis row starts with the intercept and its derivative with zero") {
  for (const auto& basis : all_families_df(4)) {
    for (double p : {0.01, 0.25, 0.5, 0.9, 0.99}) {
      const Eigen::RowVectorXd row = basis.eval(p);
      const Eigen::RowVectorXd drow = basis.deriv(p);
      REQUIRE(row.size() == basis.columns());
      REQUIRE(drow.size() == basis.columns());
      CHECK(row[0] == 1.0);
      CHECK(drow[0] == 0.0);
      for (int k = 0; k < row.size(); ++k) {
        CHECK(std::isfinite(row[k]));
        CHECK(std::isfinite(drow[k]));
      }
    }
  }
}

TEST_CASE("evaluation outside (0,1) is a domain error") {
  const SmootherBasis basis = SmootherBasis::make(SmootherBasis::Family::OrthoPoly, 2);
  CHECK_THROWS_AS(basis.eval(0.0), DomainError);
  CHECK_THROWS_AS(basis.eval(1.0), DomainError);
  CHECK_THROWS_AS(basis.deriv(-0.1), DomainError);
  CHECK_THROWS_AS(basis.deriv(1.1), DomainError);
}

TEST_CASE("normal-quantile and log-survival rows match their closed forms") {
  const SmootherBasis nq = SmootherBasis::make(SmootherBasis::Family::NormalQuantile, 1);
  CHECK(nq.eval(0.5)[1] == doctest::Approx(0.0).epsilon(1e-12));
  // d/dp Phi^{-1}(p) at p = 0.5 is sqrt(2 pi).
  CHECK(nq.deriv(0.5)[1] == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-10));

  const SmootherBasis ls = SmootherBasis::make(SmootherBasis::Family::LogSurvival, 1);
  CHECK(ls.eval(0.5)[1] == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(ls.deriv(0.5)[1] == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("orthonormal polynomial columns have identity Gram matrix on the reference grid") {
  const int df = 3;
  const SmootherBasis basis = SmootherBasis::make(SmootherBasis::Family::OrthoPoly, df);
  const int grid_n = 1001;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(df + 1, df + 1);
  for (int i = 1; i <= grid_n; ++i) {
    const double p = i / (grid_n + 1.0);
    const Eigen::RowVectorXd row = basis.eval(p);
    gram += row.transpose() * row;
  }
  gram /= grid_n;
  const Eigen::MatrixXd err = gram - Eigen::MatrixXd::Identity(df + 1, df + 1);
  CHECK(err.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("derivatives agree with a central finite difference for every family") {
  std::vector<SmootherBasis> bases;
  for (int df : {1, 2, 5, 10}) {
    bases.push_back(SmootherBasis::make(SmootherBasis::Family::OrthoPoly, df));
    bases.push_back(SmootherBasis::make(SmootherBasis::Family::NaturalSpline, df));
  }
  bases.push_back(SmootherBasis::make(SmootherBasis::Family::NormalQuantile, 1));
  bases.push_back(SmootherBasis::make(SmootherBasis::Family::LogSurvival, 1));

  const double h = 1e-6;
  for (const auto& basis : bases) {
    for (const PercentGrid grid = PercentGrid::equispaced(99); double p : grid.points()) {
      const Eigen::RowVectorXd drow = basis.deriv(p);
      for (int k = 1; k < basis.columns(); ++k) {
        const double fd = gqte::test::central_diff(
            [&](double x) { return basis.eval(x)[k]; }, p, h);
        CHECK(std::abs(drow[k] - fd) < 1e-4);
      }
    }
  }
}

TEST_CASE("natural spline is linear beyond its boundary knots") {
  // Natural cubic splines have zero second derivative outside the boundary
  // knots, so the derivative of each column must be constant out there.
  const SmootherBasis basis = SmootherBasis::natural_spline(4, 0.1, 0.9);
  for (int k = 1; k < basis.columns(); ++k) {
    CHECK(basis.deriv(0.02)[k] == doctest::Approx(basis.deriv(0.05)[k]).epsilon(1e-9));
    CHECK(basis.deriv(0.95)[k] == doctest::Approx(basis.deriv(0.98)[k]).epsilon(1e-9));
  }
}

TEST_CASE("spline knots follow the sample plotting positions") {
  const SmootherBasis basis =
      SmootherBasis::for_sample_size(SmootherBasis::Family::NaturalSpline, 3, 99);
  REQUIRE(!basis.knots().empty());
  CHECK(basis.knots().front() == doctest::Approx(0.01));
  CHECK(basis.knots().back() == doctest::Approx(0.99));
  // Interior knots sit strictly between the boundaries, in increasing order.
  for (std::size_t i = 1; i < basis.knots().size(); ++i) {
    CHECK(basis.knots()[i] > basis.knots()[i - 1]);
  }

  const SmootherBasis rebuilt = SmootherBasis::natural_spline_with_knots(basis.knots());
  for (double p : {0.05, 0.3, 0.77}) {
    CHECK((rebuilt.eval(p) - basis.eval(p)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("family names round-trip and unknown names are rejected") {
  using F = SmootherBasis::Family;
  for (F f : {F::OrthoPoly, F::NaturalSpline, F::NormalQuantile, F::LogSurvival}) {
    CHECK(SmootherBasis::family_from_name(SmootherBasis::family_name(f)) == f);
  }
  CHECK(SmootherBasis::family_from_name("poly") == F::OrthoPoly);
  CHECK(SmootherBasis::family_from_name("spline") == F::NaturalSpline);
  CHECK_THROWS_AS(SmootherBasis::family_from_name("fourier"), InputError);
}

TEST_CASE("degrees of freedom are validated per family") {
  CHECK_THROWS_AS(SmootherBasis::make(SmootherBasis::Family::OrthoPoly, -1), InputError);
  CHECK_THROWS_AS(SmootherBasis::make(SmootherBasis::Family::NaturalSpline, 0), InputError);
  CHECK_THROWS_AS(SmootherBasis::make(SmootherBasis::Family::NormalQuantile, 2), InputError);
  CHECK_THROWS_AS(SmootherBasis::make(SmootherBasis::Family::LogSurvival, 3), InputError);
  CHECK_NOTHROW(SmootherBasis::make(SmootherBasis::Family::NaturalSpline, 1));

  // The constant basis (df 0) is a legal one-column design.
  const SmootherBasis constant = SmootherBasis::make(SmootherBasis::Family::OrthoPoly, 0);
  CHECK(constant.columns() == 1);
  CHECK(constant.eval(0.42)[0] == 1.0);
  CHECK(constant.deriv(0.42)[0] == 0.0);
}

TEST_CASE("value and slope are the row products with beta") {
  const SmootherBasis basis = SmootherBasis::make(SmootherBasis::Family::OrthoPoly, 2);
  Eigen::VectorXd beta(3);
  beta << 0.3, -1.2, 0.45;
  for (double p : {0.2, 0.5, 0.8}) {
    CHECK(basis.value(p, beta) == doctest::Approx((basis.eval(p) * beta).value()).epsilon(1e-15));
    CHECK(basis.slope(p, beta) == doctest::Approx((basis.deriv(p) * beta).value()).epsilon(1e-15));
  }
}

TEST_CASE("repeated evaluation returns identical rows") {
  for (const auto& basis : all_families_df(3)) {
    const Eigen::RowVectorXd a = basis.eval(0.37);
    const Eigen::RowVectorXd b = basis.eval(0.37);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }
}
