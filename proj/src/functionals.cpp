#include "gqte/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "gqte/parallel.hpp"
#include "gqte/stats.hpp"

namespace gqte {

namespace {

// Basis rows evaluated at the plotting positions of a sorted sample.
Eigen::MatrixXd basis_at_positions(const SmootherBasis& basis, int n) {
  Eigen::MatrixXd X(n, basis.columns());
  for (int i = 1; i <= n; ++i) X.row(i - 1) = basis.eval(i / (n + 1.0));
  return X;
}

double column_mean(const Eigen::MatrixXd& vals, int col) {
  double acc = 0.0;
  for (Eigen::Index m = 0; m < vals.rows(); ++m) acc += vals(m, col);
  return acc / static_cast<double>(vals.rows());
}

// Piecewise-linear interpolation of values attached to the plotting
// positions i/(n+1), flat beyond the outermost positions.
double interp_positions(const Eigen::VectorXd& q, int n, double p) {
  const double lo_p = 1.0 / (n + 1.0);
  const double hi_p = n / (n + 1.0);
  if (p <= lo_p) return q[0];
  if (p >= hi_p) return q[n - 1];
  const double t = p * (n + 1.0) - 1.0;  // fractional order-statistic index
  const int i = std::min(static_cast<int>(t), n - 2);
  return q[i] + (t - i) * (q[i + 1] - q[i]);
}

}  // namespace

GqteFunctional::GqteFunctional(Kind kind, PercentGrid grid, int r, double p)
    : kind_(kind), grid_(std::move(grid)), moment_order_(r), range_p_(p) {}

GqteFunctional GqteFunctional::qte(PercentGrid grid) {
  return GqteFunctional(Kind::Qte, std::move(grid), 1, 0.1);
}
GqteFunctional GqteFunctional::ate() {
  return GqteFunctional(Kind::Ate, PercentGrid::equispaced(1), 1, 0.1);
}
GqteFunctional GqteFunctional::moment(int r) {
  if (r < 1) throw InputError("moment functional: order must be >= 1");
  return GqteFunctional(Kind::Moment, PercentGrid::equispaced(1), r, 0.1);
}
GqteFunctional GqteFunctional::variance_diff() {
  return GqteFunctional(Kind::VarianceDiff, PercentGrid::equispaced(1), 2, 0.1);
}
GqteFunctional GqteFunctional::sd_diff() {
  return GqteFunctional(Kind::SdDiff, PercentGrid::equispaced(1), 2, 0.1);
}
GqteFunctional GqteFunctional::tailweight(PercentGrid grid) {
  return GqteFunctional(Kind::Tailweight, std::move(grid), 1, 0.1);
}
GqteFunctional GqteFunctional::inter_range_ratio(double p) {
  if (!(p > 0.0 && p < 0.5)) {
    throw InputError("inter-range ratio: percentile must lie strictly inside (0, 0.5)");
  }
  return GqteFunctional(Kind::InterRangeRatio, PercentGrid::equispaced(1), 1, p);
}

bool GqteFunctional::scalar() const {
  return kind_ != Kind::Qte && kind_ != Kind::Tailweight;
}

std::string GqteFunctional::name() const {
  switch (kind_) {
    case Kind::Qte: return "qte";
    case Kind::Ate: return "ate";
    case Kind::Moment: return "moment:" + std::to_string(moment_order_);
    case Kind::VarianceDiff: return "variance";
    case Kind::SdDiff: return "sd";
    case Kind::Tailweight: return "tailweight";
    case Kind::InterRangeRatio: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "ir:%g", range_p_);
      return buf;
    }
  }
  return "unknown";
}

GqteFunctional parse_functional(const std::string& token) {
  if (token == "qte") return GqteFunctional::qte();
  if (token == "ate") return GqteFunctional::ate();
  if (token == "variance") return GqteFunctional::variance_diff();
  if (token == "sd") return GqteFunctional::sd_diff();
  if (token == "tailweight") return GqteFunctional::tailweight();
  const auto colon = token.find(':');
  if (colon != std::string::npos) {
    const std::string head = token.substr(0, colon);
    const std::string arg = token.substr(colon + 1);
    try {
      std::size_t used = 0;
      if (head == "moment") {
        const int r = std::stoi(arg, &used);
        if (used == arg.size()) return GqteFunctional::moment(r);
      } else if (head == "ir") {
        const double p = std::stod(arg, &used);
        if (used == arg.size()) return GqteFunctional::inter_range_ratio(p);
      }
    } catch (const std::logic_error&) {
      // falls through to the uniform error below
    }
  }
  throw InputError("unknown functional '" + token +
                   "' (expected qte, ate, moment:r, variance, sd, tailweight, or ir:p)");
}

PerDrawQuantiles per_draw_quantiles(const ModelSpec& spec, const Eigen::VectorXd& beta,
                                    const TwoSampleData& data) {
  if (beta.size() != spec.basis.columns()) {
    throw InputError("per_draw_quantiles: beta length must equal df+1");
  }
  PerDrawQuantiles out;
  const int n1 = data.n1();
  const int n2 = data.n2();
  out.q1.p.resize(static_cast<std::size_t>(n2));
  out.q1.q.resize(static_cast<std::size_t>(n2));
  out.q2.p.resize(static_cast<std::size_t>(n1));
  out.q2.q.resize(static_cast<std::size_t>(n1));
  for (int i = 1; i <= n2; ++i) {
    const double p = i / (n2 + 1.0);
    out.q1.p[static_cast<std::size_t>(i - 1)] = p;
    out.q1.q[static_cast<std::size_t>(i - 1)] =
        data.y2[static_cast<std::size_t>(i - 1)] * spec.link.inverse(spec.basis.value(p, beta));
  }
  for (int i = 1; i <= n1; ++i) {
    const double p = i / (n1 + 1.0);
    out.q2.p[static_cast<std::size_t>(i - 1)] = p;
    out.q2.q[static_cast<std::size_t>(i - 1)] =
        data.y1[static_cast<std::size_t>(i - 1)] / spec.link.inverse(spec.basis.value(p, beta));
  }
  return out;
}

double interpolate_quantile(const QuantileCurve& curve, double p) {
  if (curve.p.empty() || curve.p.size() != curve.q.size()) {
    throw InputError("interpolate_quantile: empty or ragged curve");
  }
  if (p <= curve.p.front()) return curve.q.front();
  if (p >= curve.p.back()) return curve.q.back();
  const auto it = std::upper_bound(curve.p.begin(), curve.p.end(), p);
  const std::size_t hi = static_cast<std::size_t>(it - curve.p.begin());
  const std::size_t lo = hi - 1;
  const double w = (p - curve.p[lo]) / (curve.p[hi] - curve.p[lo]);
  return curve.q[lo] + w * (curve.q[hi] - curve.q[lo]);
}

GqteEstimate estimate(const GqteFunctional& functional, const PosteriorDraws& draws,
                      const TwoSampleData& data, const ModelSpec& spec, bool keep_draws) {
  const int retained = draws.retained();
  if (retained < 1) throw InputError("estimate: no retained posterior draws");
  if (draws.beta.cols() != spec.basis.columns()) {
    throw InputError("estimate: draw width must equal df+1");
  }
  using Kind = GqteFunctional::Kind;
  const Kind kind = functional.kind();

  std::vector<double> eval_grid;
  if (!functional.scalar()) eval_grid = functional.grid().points();
  const int npoints = functional.scalar() ? 1 : static_cast<int>(eval_grid.size());

  const int n1 = data.n1();
  const int n2 = data.n2();
  const bool needs_quantiles = kind != Kind::Tailweight;
  Eigen::MatrixXd X1, X2;
  if (needs_quantiles) {
    X1 = basis_at_positions(spec.basis, n1);
    X2 = basis_at_positions(spec.basis, n2);
  }

  // Tailweight needs the derivative of log hinv[X beta] along the grid. The
  // log link admits the exact row X'(p); anything else goes through a central
  // difference, which also owns the identity-link positivity requirement.
  Eigen::MatrixXd Xg_deriv, Xg_lo, Xg_hi, Xg_mid;
  std::vector<double> fd_steps;
  const bool analytic_tw = spec.link.kind() == LinkFunction::Kind::Log;
  if (kind == Kind::Tailweight) {
    if (analytic_tw) {
      Xg_deriv.resize(npoints, spec.basis.columns());
      for (int k = 0; k < npoints; ++k) Xg_deriv.row(k) = spec.basis.deriv(eval_grid[static_cast<std::size_t>(k)]);
    } else {
      Xg_lo.resize(npoints, spec.basis.columns());
      Xg_hi.resize(npoints, spec.basis.columns());
      Xg_mid.resize(npoints, spec.basis.columns());
      fd_steps.resize(static_cast<std::size_t>(npoints));
      for (int k = 0; k < npoints; ++k) {
        const double p = eval_grid[static_cast<std::size_t>(k)];
        const double h = std::min({1e-5, 0.5 * p, 0.5 * (1.0 - p)});
        fd_steps[static_cast<std::size_t>(k)] = h;
        Xg_lo.row(k) = spec.basis.eval(p - h);
        Xg_hi.row(k) = spec.basis.eval(p + h);
        Xg_mid.row(k) = spec.basis.eval(p);
      }
    }
  }

  Eigen::MatrixXd vals(retained, npoints);
  parallel_for(static_cast<std::size_t>(retained), [&](std::size_t m) {
    const Eigen::VectorXd beta = draws.beta.row(static_cast<Eigen::Index>(m)).transpose();
    Eigen::VectorXd q1, q2;
    if (needs_quantiles) {
      q1 = (X2 * beta).unaryExpr([&](double v) { return spec.link.inverse(v); });
      q2 = (X1 * beta).unaryExpr([&](double v) { return spec.link.inverse(v); });
      for (int i = 0; i < n2; ++i) q1[i] *= data.y2[static_cast<std::size_t>(i)];
      for (int i = 0; i < n1; ++i) q2[i] = data.y1[static_cast<std::size_t>(i)] / q2[i];
    }
    const auto row = static_cast<Eigen::Index>(m);
    switch (kind) {
      case Kind::Qte: {
        for (int k = 0; k < npoints; ++k) {
          const double p = eval_grid[static_cast<std::size_t>(k)];
          vals(row, k) = interp_positions(q1, n2, p) - interp_positions(q2, n1, p);
        }
        break;
      }
      case Kind::Ate: {
        double s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < n2; ++i) s1 += q1[i];
        for (int i = 0; i < n1; ++i) s2 += q2[i];
        vals(row, 0) = s1 / n2 - s2 / n1;
        break;
      }
      case Kind::Moment: {
        const double r = functional.moment_order();
        double s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < n2; ++i) s1 += std::pow(q1[i], r);
        for (int i = 0; i < n1; ++i) s2 += std::pow(q2[i], r);
        vals(row, 0) = s1 / n2 - s2 / n1;
        break;
      }
      case Kind::VarianceDiff:
      case Kind::SdDiff: {
        double m1 = 0.0, m2 = 0.0, sq1 = 0.0, sq2 = 0.0;
        for (int i = 0; i < n2; ++i) {
          m1 += q1[i];
          sq1 += q1[i] * q1[i];
        }
        for (int i = 0; i < n1; ++i) {
          m2 += q2[i];
          sq2 += q2[i] * q2[i];
        }
        m1 /= n2;
        m2 /= n1;
        sq1 /= n2;
        sq2 /= n1;
        if (kind == Kind::VarianceDiff) {
          vals(row, 0) = (sq1 - sq2) - (m1 * m1 - m2 * m2);
        } else {
          vals(row, 0) = std::sqrt(std::max(0.0, sq1 - m1 * m1)) -
                         std::sqrt(std::max(0.0, sq2 - m2 * m2));
        }
        break;
      }
      case Kind::Tailweight: {
        if (analytic_tw) {
          const Eigen::VectorXd tw = Xg_deriv * beta;
          for (int k = 0; k < npoints; ++k) vals(row, k) = tw[k];
        } else {
          const Eigen::VectorXd vlo = Xg_lo * beta;
          const Eigen::VectorXd vhi = Xg_hi * beta;
          const Eigen::VectorXd vmid = Xg_mid * beta;
          for (int k = 0; k < npoints; ++k) {
            const double ilo = spec.link.inverse(vlo[k]);
            const double ihi = spec.link.inverse(vhi[k]);
            if (!(ilo > 0.0) || !(ihi > 0.0) || !(spec.link.inverse(vmid[k]) > 0.0)) {
              throw DomainError("tailweight: quantile ratio is not positive at p");
            }
            vals(row, k) = (std::log(ihi) - std::log(ilo)) /
                           (2.0 * fd_steps[static_cast<std::size_t>(k)]);
          }
        }
        break;
      }
      case Kind::InterRangeRatio: {
        const double p = functional.range_p();
        vals(row, 0) = interp_positions(q1, n2, 1.0 - p) / interp_positions(q1, n2, p) -
                       interp_positions(q2, n1, 1.0 - p) / interp_positions(q2, n1, p);
        break;
      }
    }
  });

  GqteEstimate out;
  out.grid = eval_grid;
  out.point.resize(static_cast<std::size_t>(npoints));
  out.lower.resize(static_cast<std::size_t>(npoints));
  out.upper.resize(static_cast<std::size_t>(npoints));
  std::vector<double> column(static_cast<std::size_t>(retained));
  for (int k = 0; k < npoints; ++k) {
    out.point[static_cast<std::size_t>(k)] = column_mean(vals, k);
    for (int m = 0; m < retained; ++m) column[static_cast<std::size_t>(m)] = vals(m, k);
    std::sort(column.begin(), column.end());
    out.lower[static_cast<std::size_t>(k)] = percentile_sorted(column, 0.025);
    out.upper[static_cast<std::size_t>(k)] = percentile_sorted(column, 0.975);
  }
  if (keep_draws) out.draw_values = std::move(vals);
  return out;
}

}  // namespace gqte
