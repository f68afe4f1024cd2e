#include "doctest.h"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "gqte/archive.hpp"
#include "gqte/df_select.hpp"
#include "gqte/functionals.hpp"
#include "gqte/grid.hpp"
#include "gqte/model.hpp"
#include "gqte/normal.hpp"
#include "gqte/rng.hpp"
#include "gqte/sampler.hpp"
#include "gqte/simulate.hpp"
#include "helpers.hpp"

using namespace gqte;
using gqte::test::sample_from;

// Each test case below checks one release gate and prints a single verdict
// line, so a log scan shows the whole gate status at a glance.

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

bool verdict(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d %s  %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  return pass;
}

ModelSpec case1_spec(double theta) {
  return ModelSpec(CaseDensity::uniform(theta), LinkFunction::identity(),
                   SmootherBasis::make(SmootherBasis::Family::OrthoPoly, 0));
}

ModelSpec case2_spec(double mu, double sigma) {
  return ModelSpec(CaseDensity::log_normal(mu, sigma), LinkFunction::log(),
                   SmootherBasis::make(SmootherBasis::Family::NormalQuantile, 1));
}

ModelSpec case3_spec(double tail, double scale) {
  return ModelSpec(CaseDensity::pareto(tail, scale), LinkFunction::log(),
                   SmootherBasis::make(SmootherBasis::Family::LogSurvival, 1));
}

Eigen::VectorXd beta1(double b0) {
  Eigen::VectorXd b(1);
  b << b0;
  return b;
}

Eigen::VectorXd beta2(double b0, double b1) {
  Eigen::VectorXd b(2);
  b << b0, b1;
  return b;
}

double lognormal_pdf(double y, double mu, double sigma) {
  return normal_pdf((std::log(y) - mu) / sigma) / (sigma * y);
}

double pareto_pdf(double y, double tail, double scale) {
  if (y < scale) return 0.0;
  return tail * std::pow(scale, tail) / std::pow(y, tail + 1.0);
}

// Induced-density denominator sign at the model's own quantile, written
// straight from the change-of-variables identity with no per-link shortcuts.
bool raw_constraint(const ModelSpec& spec, const Eigen::VectorXd& beta, double p) {
  const double z = spec.basis.value(p, beta);
  const double ratio = spec.link.inverse(z);
  if (!(ratio > 0.0)) return false;
  const double q1 = spec.f1.quantile(p);
  const double q2 = q1 / ratio;
  const double denom =
      1.0 - spec.f1.pdf(q1) * spec.basis.slope(p, beta) * q2 * spec.link.inverse_deriv(z);
  return denom >= 0.0;
}

// dQ2/dp written from the quotient rule, with the reference quantile density
// taken as 1/f1(Q1(p)). Exact up to roundoff, no finite differences.
double analytic_q2_density(const ModelSpec& spec, const Eigen::VectorXd& beta, double p) {
  const double z = spec.basis.value(p, beta);
  const double ratio = spec.link.inverse(z);
  const double q1 = spec.f1.quantile(p);
  const double dratio = spec.link.inverse_deriv(z) * spec.basis.slope(p, beta);
  return 1.0 / (spec.f1.pdf(q1) * ratio) - q1 * dratio / (ratio * ratio);
}

PosteriorDraws draws_from_rows(const std::vector<Eigen::VectorXd>& rows) {
  PosteriorDraws draws;
  draws.beta.resize(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    draws.beta.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  }
  draws.eta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), 1);
  draws.eta_names = {"unused"};
  return draws;
}

}  // namespace

TEST_CASE("criterion 1: induced densities match the closed forms") {
  Timer timer;
  RngEngine eng = make_engine(811);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const PercentGrid grid = PercentGrid::equispaced(99);
  double max_err = 0.0;

  for (int k = 0; k < 50; ++k) {
    {
      const double theta = 3.0;
      const ModelSpec spec = case1_spec(theta);
      const Eigen::VectorXd b = beta1(0.2 + 4.8 * u01(eng));
      const double expected = b[0] / theta;
      for (double p : grid.points()) {
        const double q2 = model_quantile2(spec, b, p);
        max_err = std::max(max_err, std::abs(f2_density_quantile(spec, b, q2, p) - expected));
      }
    }
    {
      const double mu = 7.0, sigma = 1.5;
      const ModelSpec spec = case2_spec(mu, sigma);
      const Eigen::VectorXd b =
          beta2(-1.0 + 2.0 * u01(eng), -1.0 + (sigma - 0.05 + 1.0) * u01(eng));
      for (double p : grid.points()) {
        const double q2 = model_quantile2(spec, b, p);
        const double expected = lognormal_pdf(q2, mu - b[0], sigma - b[1]);
        max_err = std::max(max_err, std::abs(f2_density_quantile(spec, b, q2, p) - expected));
      }
    }
    {
      const double tail = 3.0, scale = 2.0;
      const ModelSpec spec = case3_spec(tail, scale);
      const Eigen::VectorXd b =
          beta2(-1.0 + 2.0 * u01(eng), -1.0 / tail + 0.02 + 1.5 * u01(eng));
      const double tail2 = tail / (tail * b[1] + 1.0);
      const double scale2 = scale * std::exp(-b[0]);
      for (double p : grid.points()) {
        const double q2 = model_quantile2(spec, b, p);
        const double expected = pareto_pdf(q2, tail2, scale2);
        max_err = std::max(max_err, std::abs(f2_density_quantile(spec, b, q2, p) - expected));
      }
    }
  }

  const double secs = timer.secs();
  const bool pass = max_err <= 1e-10 && secs < 5.0;
  CHECK(verdict(1, pass,
                strf("closed-form pdf match, 3 models x 50 betas x 99 percentiles "
                     "(max |err| %.2e, limit 1e-10; %.1fs, limit 5s)",
                     max_err, secs)));
}

TEST_CASE("criterion 2: induced density normalizes against the quantile density") {
  Timer timer;
  RngEngine eng = make_engine(812);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  constexpr int kPoints = 10000;
  double max_dev = 0.0;

  for (int k = 0; k < 20; ++k) {
    ModelSpec spec = case1_spec(1.0);
    Eigen::VectorXd b;
    switch (k % 3) {
      case 0: {
        spec = case1_spec(0.5 + 4.5 * u01(eng));
        b = beta1(0.3 + 2.7 * u01(eng));
        break;
      }
      case 1: {
        const double sigma = 0.8 + 1.4 * u01(eng);
        spec = case2_spec(5.0 + 4.0 * u01(eng), sigma);
        b = beta2(-1.0 + 2.0 * u01(eng), -1.0 + (sigma - 0.1 + 1.0) * u01(eng));
        break;
      }
      default: {
        const double tail = 1.5 + 3.5 * u01(eng);
        spec = case3_spec(tail, 0.5 + 3.5 * u01(eng));
        b = beta2(-1.0 + 2.0 * u01(eng), -1.0 / tail + 0.05 + 1.15 * u01(eng));
        break;
      }
    }
    double integral = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const double p = (i + 0.5) / kPoints;
      const double q2 = model_quantile2(spec, b, p);
      integral += f2_density_quantile(spec, b, q2, p) * analytic_q2_density(spec, b, p);
    }
    integral /= kPoints;
    max_dev = std::max(max_dev, std::abs(integral - 1.0));
  }

  const double secs = timer.secs();
  const bool pass = max_dev <= 1e-6 && secs < 10.0;
  CHECK(verdict(2, pass,
                strf("normalization via midpoint rule, 20 models x 1e4 points "
                     "(max |integral-1| %.2e, limit 1e-6; %.1fs, limit 10s)",
                     max_dev, secs)));
}

TEST_CASE("criterion 3: percentile solver residuals and cdf agreement") {
  Timer timer;
  const ModelSpec spec = case2_spec(7.5, 1.75);
  const Eigen::VectorXd beta = beta2(0.5, 0.25);
  const double mu2 = 7.0, sigma2 = 1.5;
  std::vector<double> y2 = sample_from(CaseDensity::log_normal(mu2, sigma2), 1000, 20240818, 2);
  std::sort(y2.begin(), y2.end());

  const std::vector<double> ps = solve_percentiles(spec, beta, y2);
  double max_resid = 0.0, max_cdf_err = 0.0;
  for (std::size_t j = 0; j < y2.size(); ++j) {
    max_resid = std::max(max_resid, std::abs(model_quantile2(spec, beta, ps[j]) - y2[j]));
    const double cdf = normal_cdf((std::log(y2[j]) - mu2) / sigma2);
    max_cdf_err = std::max(max_cdf_err, std::abs(ps[j] - cdf));
  }

  const double secs = timer.secs();
  const bool pass = max_resid < 1e-8 && max_cdf_err < 1e-7 && secs < 5.0;
  CHECK(verdict(3, pass,
                strf("1000-point inversion (max |Q2(p)-y| %.2e, limit 1e-8; "
                     "max |p-F2(y)| %.2e, limit 1e-7; %.1fs, limit 5s)",
                     max_resid, max_cdf_err, secs)));
}

TEST_CASE("criterion 4: constraint reductions equal the raw denominator test") {
  Timer timer;
  RngEngine eng = make_engine(813);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const PercentGrid grid = PercentGrid::equispaced(kConstraintAuditPoints);
  long checked = 0, mismatches = 0;

  const ModelSpec c2 = case2_spec(7.0, 1.5);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd b = beta2(-1.5 + 3.0 * u01(eng), 0.5 + 2.0 * u01(eng));
    const bool closed = b[1] <= 1.5;  // slope bound at the reference sigma
    for (double p : grid.points()) {
      ++checked;
      if (raw_constraint(c2, b, p) != closed) ++mismatches;
      if (constraint_satisfied(c2, b, p) != closed) ++mismatches;
    }
  }
  const ModelSpec c3 = case3_spec(3.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd b = beta2(-1.0 + 2.0 * u01(eng), -1.2 + 2.0 * u01(eng));
    const bool closed = b[1] >= -1.0 / 3.0;  // slope bound at the reference tail index
    for (double p : grid.points()) {
      ++checked;
      if (raw_constraint(c3, b, p) != closed) ++mismatches;
      if (constraint_satisfied(c3, b, p) != closed) ++mismatches;
    }
  }

  const double secs = timer.secs();
  const bool pass = mismatches == 0;
  CHECK(verdict(4, pass,
                strf("feasibility booleans, 200 betas x 199 grid points x 2 routes "
                     "(%ld checks, %ld mismatches; %.1fs)",
                     checked, mismatches, secs)));
}

TEST_CASE("criterion 5: least-squares start recovers noiseless coefficients") {
  Timer timer;
  const SmootherBasis basis = SmootherBasis::make(SmootherBasis::Family::NormalQuantile, 1);
  double max_err = 0.0;
  bool pairing_ok = true;

  {
    // Balanced arms: order statistics at the shared plotting positions.
    const int n = 40;
    std::vector<double> y1, y2;
    for (int i = 1; i <= n; ++i) {
      const double p = static_cast<double>(i) / (n + 1);
      const double z = normal_quantile(p);
      y1.push_back(std::exp(7.0 + 1.5 * z));
      y2.push_back(y1.back() / std::exp(0.5 + 0.25 * z));
    }
    const OlsFit fit = ols_init(TwoSampleData(y1, y2), LinkFunction::log(), basis);
    pairing_ok = pairing_ok && fit.n_pairs == n;
    max_err = std::max(max_err, std::abs(fit.beta[0] - 0.5));
    max_err = std::max(max_err, std::abs(fit.beta[1] - 0.25));
  }
  {
    // Unbalanced arms: the larger sample only matches the fitted line at the
    // order statistics j = round(p (m+1)), so exact recovery certifies the
    // pairing rule itself.
    const int n = 30, m = 90;
    std::vector<double> y1(n), targets(n);
    std::vector<int> picks(n);
    for (int i = 1; i <= n; ++i) {
      const double p = static_cast<double>(i) / (n + 1);
      const double z = normal_quantile(p);
      y1[i - 1] = std::exp(7.0 + 1.5 * z);
      targets[i - 1] = y1[i - 1] / std::exp(0.5 + 0.3 * z);
      picks[i - 1] = static_cast<int>(std::llround(p * (m + 1)));
    }
    std::vector<double> y2(m, 0.0);
    for (int i = 0; i < n; ++i) y2[static_cast<std::size_t>(picks[i] - 1)] = targets[i];
    for (int j = 1; j <= m; ++j) {
      if (y2[j - 1] != 0.0) continue;
      if (j < picks.front()) {
        y2[j - 1] = targets.front() * (0.4 + 0.2 * j / picks.front());
      } else if (j > picks.back()) {
        y2[j - 1] = targets.back() * (1.0 + 0.05 * (j - picks.back()));
      } else {
        int a = 0;
        while (picks[a + 1] < j) ++a;
        const double t = static_cast<double>(j - picks[a]) / (picks[a + 1] - picks[a]);
        y2[j - 1] = targets[a] + t * (targets[a + 1] - targets[a]);
      }
    }
    for (int j = 1; j < m; ++j) pairing_ok = pairing_ok && y2[j] > y2[j - 1];

    const OlsFit fit = ols_init(TwoSampleData(y1, y2), LinkFunction::log(), basis);
    pairing_ok = pairing_ok && fit.n_pairs == n;
    max_err = std::max(max_err, std::abs(fit.beta[0] - 0.5));
    max_err = std::max(max_err, std::abs(fit.beta[1] - 0.3));
  }

  const double secs = timer.secs();
  const bool pass = max_err <= 1e-10 && pairing_ok;
  CHECK(verdict(5, pass,
                strf("noiseless recovery, balanced and 30-vs-90 pairing "
                     "(max |beta err| %.2e, limit 1e-10; pairing %s; %.1fs)",
                     max_err, pairing_ok ? "exact" : "broken", secs)));
}

TEST_CASE("criterion 6: chain determinism, admissibility, and posterior accuracy") {
  Timer timer;
  const auto data = test::lognormal_pair(1000, 1000, 7.0, 1.5, 0.5, 0.25, 303);
  const ModelSpec spec = case2_spec(7.0, 1.5);
  const PriorSpec prior = default_prior(ols_init(data, spec.link, spec.basis));
  SamplerConfig cfg;
  cfg.iterations = 20000;
  cfg.burnin = 5000;
  cfg.seed = 20240815;

  auto archived = [&] {
    DrawArchive archive(spec.f1, spec.link, spec.basis);
    archive.y1 = data.y1;
    archive.y2 = data.y2;
    archive.prior_mean = prior.beta_mean;
    archive.prior_variance_scale = prior.beta_variance_scale;
    archive.draws = run_mh(spec, data, prior, cfg);
    return archive;
  };
  const DrawArchive first = archived();
  const DrawArchive second = archived();
  const bool bitwise = archive_to_json(first) == archive_to_json(second);

  const PercentGrid audit = PercentGrid::equispaced(kConstraintAuditPoints);
  long violations = 0;
  for (Eigen::Index r = 0; r < first.draws.beta.rows(); ++r) {
    if (!constraint_satisfied(spec, first.draws.beta.row(r).transpose(), audit)) ++violations;
  }

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  for (Eigen::Index r = 0; r < first.draws.beta.rows(); ++r) mean += first.draws.beta.row(r);
  mean /= static_cast<double>(first.draws.beta.rows());
  const double err0 = std::abs(mean[0] - 0.5);
  const double err1 = std::abs(mean[1] - 0.25);

  const double secs = timer.secs();
  const bool pass =
      bitwise && violations == 0 && err0 < 0.1 && err1 < 0.1 && secs < 300.0;
  CHECK(verdict(6, pass,
                strf("20000-draw chain at n=1000 (bitwise repeat %s; %ld audit violations; "
                     "posterior mean err %.3f, %.3f, limit 0.1; %.0fs, limit 300s)",
                     bitwise ? "yes" : "NO", violations, err0, err1, secs)));
}

TEST_CASE("criterion 7: functional identities hold draw by draw") {
  Timer timer;
  const auto data = test::lognormal_pair(40, 60, 7.0, 1.5, 0.5, 0.25, 23);
  const ModelSpec spec = case2_spec(7.0, 1.5);
  const std::vector<Eigen::VectorXd> rows{beta2(0.5, 0.25), beta2(0.3, -0.1), beta2(0.8, 0.4)};
  const PosteriorDraws draws = draws_from_rows(rows);
  double max_rel = 0.0;

  const auto ate = estimate(GqteFunctional::ate(), draws, data, spec, true);
  const auto m2 = estimate(GqteFunctional::moment(2), draws, data, spec, true);
  const auto var = estimate(GqteFunctional::variance_diff(), draws, data, spec, true);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto curves = per_draw_quantiles(spec, rows[r], data);
    auto moment_of = [](const std::vector<double>& q, double ord) {
      double acc = 0.0;
      for (double v : q) acc += std::pow(v, ord);
      return acc / static_cast<double>(q.size());
    };
    const auto row = static_cast<Eigen::Index>(r);
    auto rel = [](double got, double want) {
      return std::abs(got - want) / std::max(1.0, std::abs(want));
    };
    max_rel = std::max(
        max_rel, rel(ate.draw_values(row, 0), moment_of(curves.q1.q, 1) - moment_of(curves.q2.q, 1)));
    max_rel = std::max(
        max_rel, rel(m2.draw_values(row, 0), moment_of(curves.q1.q, 2) - moment_of(curves.q2.q, 2)));
    const double v1 = moment_of(curves.q1.q, 2) - std::pow(moment_of(curves.q1.q, 1), 2);
    const double v2 = moment_of(curves.q2.q, 2) - std::pow(moment_of(curves.q2.q, 1), 2);
    max_rel = std::max(max_rel, rel(var.draw_values(row, 0), v1 - v2));
  }

  // Tailweight: the analytic derivative row against a centered difference of
  // the smoother itself, under the log link.
  double max_tw = 0.0;
  {
    const PercentGrid grid = PercentGrid::equispaced(99);
    RngEngine eng = make_engine(814);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd b = beta2(-0.5 + u01(eng), -0.8 + 1.6 * u01(eng));
      for (double p : grid.points()) {
        const double analytic = spec.basis.slope(p, b);
        const double fd = test::central_diff(
            [&](double x) { return spec.basis.value(x, b); }, p, 1e-6);
        max_tw = std::max(max_tw, std::abs(analytic - fd));
      }
    }
  }

  // Identity-link tailweight falls back to differencing the log ratio; it
  // must agree with the analytic slope-over-value form.
  double max_tw_id = 0.0;
  {
    const ModelSpec flat(CaseDensity::uniform(4.0), LinkFunction::identity(),
                         SmootherBasis::make(SmootherBasis::Family::OrthoPoly, 1));
    const Eigen::VectorXd b = beta2(2.0, 0.3);
    const PosteriorDraws one = draws_from_rows({b});
    const PercentGrid grid = PercentGrid::equispaced(19);
    const auto tw = estimate(GqteFunctional::tailweight(grid), one, data, flat, true);
    for (std::size_t k = 0; k < grid.points().size(); ++k) {
      const double p = grid.points()[k];
      const double analytic = flat.basis.slope(p, b) / flat.basis.value(p, b);
      max_tw_id = std::max(max_tw_id, std::abs(tw.draw_values(0, static_cast<Eigen::Index>(k)) -
                                               analytic));
    }
  }

  // Zero coefficients on one shared sample collapse every effect to zero.
  double max_null = 0.0;
  {
    std::vector<double> y = sample_from(CaseDensity::log_normal(7.0, 1.5), 50, 20240819, 1);
    const TwoSampleData same(y, y);
    const PosteriorDraws zero = draws_from_rows({Eigen::VectorXd::Zero(2)});
    const auto null_ate = estimate(GqteFunctional::ate(), zero, same, spec);
    max_null = std::max(max_null, std::abs(null_ate.point[0]));
    const auto null_qte = estimate(GqteFunctional::qte(), zero, same, spec);
    for (double v : null_qte.point) max_null = std::max(max_null, std::abs(v));
  }

  const double secs = timer.secs();
  const bool pass = max_rel <= 1e-10 && max_tw <= 1e-5 && max_tw_id <= 1e-5 && max_null <= 1e-12;
  CHECK(verdict(7, pass,
                strf("per-draw recomputation (max rel err %.2e, limit 1e-10); tailweight "
                     "analytic-vs-FD %.2e and identity-link %.2e, limit 1e-5; null effects "
                     "%.2e, limit 1e-12 (%.1fs)",
                     max_rel, max_tw, max_tw_id, max_null, secs)));
}

TEST_CASE("criterion 8: simulation study direction at desk scale") {
  Timer timer;
  StudyOptions options;
  options.iterations = 1200;
  options.burnin = 400;
  options.df = 0;
  options.df_max = 6;
  const MetricsReport report =
      run_study(ScenarioSpec::from_id('A'),
                {EstimatorKind::Baseline, EstimatorKind::GqteLogNormal}, 20, 1, options);
  const EstimatorResult& row = report.rows[1];

  const double secs = timer.secs();
  const bool pass = row.rmse > 0.0 && row.rb < 0.0 && row.failures == 0 && secs < 900.0;
  CHECK(verdict(8, pass,
                strf("scenario A, 20 replicates (mse improvement %.1f%%, needs > 0; "
                     "relative bias %.1f%%, needs < 0; %d failures; %.0fs, limit 900s)",
                     row.rmse, row.rb, row.failures, secs)));
}

TEST_CASE("criterion 9: analytic scenario effect matches brute-force simulation") {
  Timer timer;
  const double analytic = true_delta(ScenarioSpec::from_id('A'));

  // Common normal draws for both populations tighten the difference.
  constexpr int kChunks = 100;
  constexpr int kPerChunk = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int c = 0; c < kChunks; ++c) {
    RngEngine eng = make_engine(20240819, static_cast<std::uint64_t>(300 + c));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < kPerChunk; ++i) {
      const double z = normal_quantile(u01(eng));
      const double d = std::exp(7.5 + 1.75 * z) - std::exp(7.0 + 1.5 * z);
      s += d;
      s2 += d * d;
    }
    sum += s;
    sumsq += s2;
  }
  const double n = static_cast<double>(kChunks) * kPerChunk;
  const double mc = sum / n;
  const double se = std::sqrt((sumsq / n - mc * mc) / n);

  const double secs = timer.secs();
  const bool pass = std::abs(analytic - mc) < 3.0 * se && secs < 30.0;
  CHECK(verdict(9, pass,
                strf("1e7-draw check of the scenario A effect (analytic %.3f, "
                     "simulated %.3f, |gap| %.2f vs 3se %.2f; %.1fs, limit 30s)",
                     analytic, mc, std::abs(analytic - mc), 3.0 * se, secs)));
}

TEST_CASE("criterion 10: smoothness selection equals the brute-force sweep") {
  Timer timer;
  bool argmin_ok = true, nonneg_ok = true;
  double max_gap = 0.0;
  constexpr int kDfMax = 4;

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto data = test::lognormal_pair(120, 120, 7.0, 1.2, 0.4, 0.3, 900 + seed);
    const CaseDensity f1 = fit_mle(CaseDensity::log_normal(0.0, 1.0), data.y1);
    const DfSelection sel =
        select_df(data, f1, LinkFunction::log(), SmootherBasis::Family::NaturalSpline, kDfMax);

    int best_df = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int df = 1; df <= kDfMax; ++df) {
      double d = std::numeric_limits<double>::infinity();
      try {
        const SmootherBasis basis =
            SmootherBasis::for_sample_size(SmootherBasis::Family::NaturalSpline, df, 120);
        const ModelSpec spec(f1, LinkFunction::log(), basis);
        d = l1_discrepancy(spec, ols_init(data, spec.link, basis).beta, data);
      } catch (const InputError&) {
      } catch (const NumericError&) {
      }
      if (std::isfinite(d)) {
        nonneg_ok = nonneg_ok && d >= 0.0;
        max_gap = std::max(max_gap, std::abs(d - sel.discrepancies[df - 1]) /
                                        std::max(1.0, std::abs(d)));
      }
      if (d < best) {
        best = d;
        best_df = df;
      }
    }
    argmin_ok = argmin_ok && best_df == sel.df;
  }

  // Identical-density substitution: scoring the model against its own induced
  // density has nothing left to explain.
  double self_score = std::numeric_limits<double>::infinity();
  {
    const ModelSpec spec = case2_spec(7.5, 1.75);
    const Eigen::VectorXd b = beta2(0.5, 0.25);
    const CaseDensity f2 = CaseDensity::log_normal(7.0, 1.5);
    std::vector<double> y1 = sample_from(spec.f1, 200, 31, 1);
    std::vector<double> y2 = sample_from(f2, 200, 31, 2);
    self_score =
        l1_discrepancy(spec, b, TwoSampleData(y1, y2), [&](double y) { return f2.pdf(y); });
  }

  const double secs = timer.secs();
  const bool pass =
      argmin_ok && nonneg_ok && max_gap <= 1e-12 && self_score >= 0.0 && self_score <= 1e-7;
  CHECK(verdict(10, pass,
                strf("10 datasets x %d candidates (argmin match %s; discrepancy gap %.2e, "
                     "limit 1e-12; self-reference score %.2e, limit 1e-7; %.1fs)",
                     kDfMax, argmin_ok ? "yes" : "NO", max_gap, self_score, secs)));
}
