#include "gqte/basis.hpp"

#include <algorithm>
#include <cmath>

#include "gqte/normal.hpp"

namespace gqte {

namespace {

constexpr int kOrthoGridSize = 1001;
constexpr double kDefaultBoundaryLo = 0.005;
constexpr double kDefaultBoundaryHi = 0.995;

double cube_plus(double u) { return u > 0.0 ? u * u * u : 0.0; }
double square_plus(double u) { return u > 0.0 ? u * u : 0.0; }

}  // namespace

const char* SmootherBasis::family_name(Family family) {
  switch (family) {
    case Family::OrthoPoly: return "orthonormal-polynomial";
    case Family::NaturalSpline: return "natural-cubic-spline";
    case Family::NormalQuantile: return "normal-quantile-affine";
    case Family::LogSurvival: return "log-survival-affine";
  }
  return "?";
}

SmootherBasis::Family SmootherBasis::family_from_name(const std::string& name) {
  if (name == "orthonormal-polynomial" || name == "poly") return Family::OrthoPoly;
  if (name == "natural-cubic-spline" || name == "spline") return Family::NaturalSpline;
  if (name == "normal-quantile-affine" || name == "normal-quantile") return Family::NormalQuantile;
  if (name == "log-survival-affine" || name == "log-survival") return Family::LogSurvival;
  throw InputError("unknown basis family '" + name + "'");
}

SmootherBasis SmootherBasis::make(Family family, int df) {
  switch (family) {
    case Family::OrthoPoly: {
      if (df < 0) throw InputError("orthonormal-polynomial basis: df must be >= 0");
      SmootherBasis b(family, df);
      b.build_ortho_recurrence();
      return b;
    }
    case Family::NaturalSpline:
      return natural_spline(df, kDefaultBoundaryLo, kDefaultBoundaryHi);
    case Family::NormalQuantile:
    case Family::LogSurvival: {
      if (df != 1) throw InputError("affine basis families have df fixed at 1");
      return SmootherBasis(family, 1);
    }
  }
  throw InputError("unknown basis family");
}

SmootherBasis SmootherBasis::natural_spline(int df, double boundary_lo, double boundary_hi) {
  if (df < 1) throw InputError("natural-cubic-spline basis: df must be >= 1");
  if (!(boundary_lo > 0.0 && boundary_hi < 1.0 && boundary_lo < boundary_hi)) {
    throw InputError("natural-cubic-spline basis: boundary knots must satisfy 0 < lo < hi < 1");
  }
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(df) + 1);
  knots.push_back(boundary_lo);
  for (int j = 1; j < df; ++j) knots.push_back(static_cast<double>(j) / df);
  knots.push_back(boundary_hi);
  return natural_spline_with_knots(std::move(knots));
}

SmootherBasis SmootherBasis::natural_spline_with_knots(std::vector<double> knots) {
  if (knots.size() < 2) throw InputError("natural-cubic-spline basis: need at least two knots");
  double prev = 0.0;
  for (double k : knots) {
    if (!(k > prev && k < 1.0)) {
      throw InputError("natural-cubic-spline basis: knots must be strictly increasing inside (0,1)");
    }
    prev = k;
  }
  SmootherBasis b(Family::NaturalSpline, static_cast<int>(knots.size()) - 1);
  b.knots_ = std::move(knots);
  return b;
}

SmootherBasis SmootherBasis::for_sample_size(Family family, int df, int n) {
  if (family != Family::NaturalSpline) return make(family, df);
  if (n < 2) throw InputError("natural-cubic-spline basis: sample too small for boundary knots");
  return natural_spline(df, 1.0 / (n + 1.0), n / (n + 1.0));
}

// Stieltjes recurrence for the polynomials orthonormal under the discrete
// uniform measure on the grid. Equivalent to Gram-Schmidt on the monomials
// but conditioned well enough to hold the 1e-8 orthonormality bound at df 10.
void SmootherBasis::build_ortho_recurrence() {
  const int n = kOrthoGridSize;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = (i + 1) / static_cast<double>(n + 1);

  std::vector<double> prev(n, 0.0), cur(n, 1.0);
  double prev_ss = 0.0;
  double cur_ss = 1.0;  // mean of 1^2

  rec_a_.clear();
  rec_b_.clear();
  rec_norm_.assign(1, 1.0);
  for (int k = 0; k < df_; ++k) {
    double xss = 0.0;
    for (int i = 0; i < n; ++i) xss += xs[i] * cur[i] * cur[i];
    xss /= n;
    const double a = xss / cur_ss;
    const double b = k == 0 ? 0.0 : cur_ss / prev_ss;
    rec_a_.push_back(a);
    rec_b_.push_back(b);

    std::vector<double> next(n);
    double next_ss = 0.0;
    for (int i = 0; i < n; ++i) {
      next[i] = (xs[i] - a) * cur[i] - b * prev[i];
      next_ss += next[i] * next[i];
    }
    next_ss /= n;
    prev.swap(cur);
    cur.swap(next);
    prev_ss = cur_ss;
    cur_ss = next_ss;
    rec_norm_.push_back(std::sqrt(cur_ss));
  }
}

void SmootherBasis::check_p(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("basis evaluation: p must lie in (0,1)");
}

Eigen::RowVectorXd SmootherBasis::eval(double p) const {
  check_p(p);
  Eigen::RowVectorXd row(columns());
  row[0] = 1.0;
  switch (family_) {
    case Family::OrthoPoly: {
      double prev = 0.0, cur = 1.0;
      for (int k = 0; k < df_; ++k) {
        const double next = (p - rec_a_[static_cast<std::size_t>(k)]) * cur -
                            rec_b_[static_cast<std::size_t>(k)] * prev;
        prev = cur;
        cur = next;
        row[k + 1] = cur / rec_norm_[static_cast<std::size_t>(k) + 1];
      }
      break;
    }
    case Family::NaturalSpline: {
      if (df_ >= 1) row[1] = p;
      const std::size_t K = knots_.size();
      const double xi_last = knots_[K - 1];
      const double d_last = K >= 2 ? (cube_plus(p - knots_[K - 2]) - cube_plus(p - xi_last)) /
                                         (xi_last - knots_[K - 2])
                                   : 0.0;
      for (int k = 1; k <= df_ - 1; ++k) {
        const double xi = knots_[static_cast<std::size_t>(k) - 1];
        const double dk = (cube_plus(p - xi) - cube_plus(p - xi_last)) / (xi_last - xi);
        row[k + 1] = dk - d_last;
      }
      break;
    }
    case Family::NormalQuantile:
      row[1] = normal_quantile(p);
      break;
    case Family::LogSurvival:
      row[1] = std::log1p(-p);
      break;
  }
  return row;
}

Eigen::RowVectorXd SmootherBasis::deriv(double p) const {
  check_p(p);
  Eigen::RowVectorXd row(columns());
  row[0] = 0.0;
  switch (family_) {
    case Family::OrthoPoly: {
      double prev = 0.0, cur = 1.0;
      double dprev = 0.0, dcur = 0.0;
      for (int k = 0; k < df_; ++k) {
        const double a = rec_a_[static_cast<std::size_t>(k)];
        const double b = rec_b_[static_cast<std::size_t>(k)];
        const double next = (p - a) * cur - b * prev;
        const double dnext = cur + (p - a) * dcur - b * dprev;
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
        row[k + 1] = dcur / rec_norm_[static_cast<std::size_t>(k) + 1];
      }
      break;
    }
    case Family::NaturalSpline: {
      if (df_ >= 1) row[1] = 1.0;
      const std::size_t K = knots_.size();
      const double xi_last = knots_[K - 1];
      const double dd_last =
          K >= 2 ? 3.0 * (square_plus(p - knots_[K - 2]) - square_plus(p - xi_last)) /
                       (xi_last - knots_[K - 2])
                 : 0.0;
      for (int k = 1; k <= df_ - 1; ++k) {
        const double xi = knots_[static_cast<std::size_t>(k) - 1];
        const double ddk = 3.0 * (square_plus(p - xi) - square_plus(p - xi_last)) / (xi_last - xi);
        row[k + 1] = ddk - dd_last;
      }
      break;
    }
    case Family::NormalQuantile: {
      const double z = normal_quantile(p);
      row[1] = 1.0 / normal_pdf(z);
      break;
    }
    case Family::LogSurvival:
      row[1] = -1.0 / (1.0 - p);
      break;
  }
  return row;
}

double SmootherBasis::value(double p, const Eigen::VectorXd& beta) const {
  if (beta.size() != columns()) throw InputError("basis value: beta length must equal df+1");
  return eval(p).dot(beta);
}

double SmootherBasis::slope(double p, const Eigen::VectorXd& beta) const {
  if (beta.size() != columns()) throw InputError("basis slope: beta length must equal df+1");
  return deriv(p).dot(beta);
}

}  // namespace gqte
