#include "gqte/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gqte/archive.hpp"
#include "gqte/df_select.hpp"
#include "gqte/functionals.hpp"
#include "gqte/simulate.hpp"

namespace gqte {

namespace {

// Shortest representation that parses back to the same double.
std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open output file '" + path + "'");
  body(out);
  if (!out) throw InputError("failed writing '" + path + "'");
}

int parse_positive_int(const std::string& token, const char* what) {
  int value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size() || value < 1) {
    throw InputError(std::string(what) + " must be a positive integer or 'auto', got '" + token +
                     "'");
  }
  return value;
}

CaseDensity prototype_density(const std::string& family, int mixture_size) {
  switch (CaseDensity::kind_from_name(family)) {
    case CaseDensity::Kind::Uniform: return CaseDensity::uniform(1.0);
    case CaseDensity::Kind::LogNormal: return CaseDensity::log_normal(0.0, 1.0);
    case CaseDensity::Kind::Pareto: return CaseDensity::pareto(1.0, 1.0);
    case CaseDensity::Kind::Gamma: return CaseDensity::gamma(1.0, 1.0);
    case CaseDensity::Kind::GammaScaleMixture: {
      if (mixture_size < 2) throw InputError("mixture size must be at least 2");
      const std::vector<double> w(static_cast<std::size_t>(mixture_size), 1.0 / mixture_size);
      return CaseDensity::gamma_scale_mixture(w, GsmPriorDefaults::kRateShape /
                                                     GsmPriorDefaults::kRateRate);
    }
  }
  throw InputError("unknown density family '" + family + "'");
}

struct FitFlags {
  std::string y1_path, y2_path;
  std::string f1_family = "lognormal";
  int mixture_size = GsmPriorDefaults::kMixtureSize;
  std::string link_name = "log";
  std::string basis_family = "natural-cubic-spline";
  std::string df_token = "auto";
  int df_max = 10;
  int iters = 20000;
  int burnin = 5000;
  int thin = 1;
  double proposal_df = 3.0;
  std::uint64_t seed = 0;
  double beta_var = 100.0;
  double power = 1.0;
  std::string out_path = "gqte-draws.json";
};

void print_diagnostics(std::ostream& os, const PosteriorDraws& draws) {
  os << "acceptance rates\n";
  for (const BlockStat& s : draws.acceptance) {
    os << "  " << s.name << ": " << fmt(s.rate()) << " (" << s.accepted << "/" << s.proposals
       << ")\n";
  }
  if (draws.degenerate) {
    os << "warning: no beta proposal was accepted; the chain is degenerate\n";
  }
  if (draws.retained() >= 10) {
    const DiagnosticsSummary summary = diagnostics(draws);
    os << "posterior summaries (mean, sd, ess, 95% interval)\n";
    for (const CoordinateSummary& c : summary.coords) {
      os << "  " << c.name << ": " << fmt(c.mean) << " " << fmt(c.sd) << " " << fmt(c.ess) << " ["
         << fmt(c.ci_lo) << ", " << fmt(c.ci_hi) << "]\n";
    }
  }
  os << "retained draws: " << draws.retained() << "\n";
}

int run_fit(const FitFlags& flags) {
  TwoSampleData data(read_sample_file(flags.y1_path, flags.power),
                     read_sample_file(flags.y2_path, flags.power));
  const CaseDensity f1 = fit_mle(prototype_density(flags.f1_family, flags.mixture_size), data.y1);
  const LinkFunction link = LinkFunction::from_name(flags.link_name);
  const auto family = SmootherBasis::family_from_name(flags.basis_family);

  int df = 0;
  const bool df_auto = flags.df_token == "auto";
  if (df_auto) {
    df = select_df(data, f1, link, family, flags.df_max).df;
  } else {
    df = parse_positive_int(flags.df_token, "--df");
  }
  const SmootherBasis basis =
      SmootherBasis::for_sample_size(family, df, std::min(data.n1(), data.n2()));
  const ModelSpec spec(f1, link, basis);

  const OlsFit ols = ols_init(data, link, basis);
  PriorSpec prior = default_prior(ols);
  if (!(flags.beta_var > 0.0)) throw InputError("--beta-var must be positive");
  prior.beta_variance_scale = flags.beta_var;

  SamplerConfig config;
  config.iterations = flags.iters;
  config.burnin = flags.burnin;
  config.thin = flags.thin;
  config.proposal_df = flags.proposal_df;
  config.seed = flags.seed;

  DrawArchive archive(f1, link, basis);
  archive.df_auto = df_auto;
  archive.y1 = data.y1;
  archive.y2 = data.y2;
  archive.prior_mean = prior.beta_mean;
  archive.prior_variance_scale = prior.beta_variance_scale;
  archive.draws = run_mh(spec, data, prior, config);
  write_archive(archive, flags.out_path);

  print_diagnostics(std::cout, archive.draws);
  if (df_auto) std::cout << "selected df: " << df << "\n";
  std::cout << "archive written to " << flags.out_path << "\n";
  return 0;
}

struct ReportFlags {
  std::string archive_path;
  std::string functional_token = "ate";
  int grid_size = 99;
  std::string format = "csv";
  std::string out_path;
};

int run_report(const ReportFlags& flags) {
  const DrawArchive archive = read_archive(flags.archive_path);
  GqteFunctional functional = parse_functional(flags.functional_token);
  if (!functional.scalar() && flags.grid_size != 99) {
    const PercentGrid grid = PercentGrid::equispaced(flags.grid_size);
    functional = functional.kind() == GqteFunctional::Kind::Qte ? GqteFunctional::qte(grid)
                                                                : GqteFunctional::tailweight(grid);
  }
  const GqteEstimate est =
      estimate(functional, archive.draws, archive.data(), archive.spec());

  if (flags.format == "json") {
    nlohmann::json j;
    j["functional"] = functional.name();
    j["grid"] = est.grid;
    j["mean"] = est.point;
    j["lo95"] = est.lower;
    j["hi95"] = est.upper;
    with_output(flags.out_path, [&](std::ostream& os) { os << j.dump() << "\n"; });
    return 0;
  }
  if (flags.format != "csv") throw InputError("--format must be csv or json");
  with_output(flags.out_path, [&](std::ostream& os) {
    if (functional.scalar()) {
      os << "functional,mean,lo95,hi95\n";
      os << functional.name() << "," << fmt(est.point[0]) << "," << fmt(est.lower[0]) << ","
         << fmt(est.upper[0]) << "\n";
    } else {
      os << "p,mean,lo95,hi95\n";
      for (std::size_t k = 0; k < est.points(); ++k) {
        os << fmt(est.grid[k]) << "," << fmt(est.point[k]) << "," << fmt(est.lower[k]) << ","
           << fmt(est.upper[k]) << "\n";
      }
    }
  });
  return 0;
}

struct SelectFlags {
  std::string y1_path, y2_path;
  std::string f1_family = "lognormal";
  int mixture_size = GsmPriorDefaults::kMixtureSize;
  std::string link_name = "log";
  std::string basis_family = "natural-cubic-spline";
  int df_max = 10;
  double power = 1.0;
  std::string out_path;
};

int run_select_df(const SelectFlags& flags) {
  TwoSampleData data(read_sample_file(flags.y1_path, flags.power),
                     read_sample_file(flags.y2_path, flags.power));
  const CaseDensity f1 = prototype_density(flags.f1_family, flags.mixture_size);
  const DfSelection sel =
      select_df(data, f1, LinkFunction::from_name(flags.link_name),
                SmootherBasis::family_from_name(flags.basis_family), flags.df_max);
  with_output(flags.out_path, [&](std::ostream& os) {
    os << "df,discrepancy\n";
    for (std::size_t i = 0; i < sel.discrepancies.size(); ++i) {
      os << (i + 1) << "," << fmt(sel.discrepancies[i]) << "\n";
    }
    os << "selected," << sel.df << "\n";
  });
  return 0;
}

struct SimulateFlags {
  std::string scenario = "A";
  int replicates = 20;
  std::string estimators = "baseline,gqte-lognormal";
  std::uint64_t seed = 0;
  int iters = 3000;
  int burnin = 1000;
  int thin = 1;
  std::string df_token = "auto";
  int df_max = 10;
  std::string out_path;
};

std::vector<EstimatorKind> parse_estimators(const std::string& csv) {
  std::vector<EstimatorKind> out;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(estimator_from_name(token));
  }
  if (out.empty()) throw InputError("estimator list is empty");
  return out;
}

int run_simulate(const SimulateFlags& flags) {
  const ScenarioSpec scenario = ScenarioSpec::parse(flags.scenario);
  StudyOptions options;
  options.iterations = flags.iters;
  options.burnin = flags.burnin;
  options.thin = flags.thin;
  options.df = flags.df_token == "auto" ? 0 : parse_positive_int(flags.df_token, "--df");
  options.df_max = flags.df_max;
  const MetricsReport report = run_study(scenario, parse_estimators(flags.estimators),
                                         flags.replicates, flags.seed, options);
  with_output(flags.out_path, [&](std::ostream& os) {
    os << "scenario," << report.scenario << "\n";
    os << "replicates," << report.replicates << "\n";
    os << "seed," << report.seed << "\n";
    os << "true_delta," << fmt(report.true_delta) << "\n";
    os << "baseline_mse," << fmt(report.baseline_mse) << "\n";
    if (!report.note.empty()) os << "note,\"" << report.note << "\"\n";
    os << "estimator,rmse,rb,mse,mean_estimate,failures,used_replicates\n";
    for (const EstimatorResult& row : report.rows) {
      os << row.name << "," << fmt(row.rmse) << "," << fmt(row.rb) << "," << fmt(row.mse) << ","
         << fmt(row.mean_estimate) << "," << row.failures << "," << row.used_replicates << "\n";
    }
  });
  return 0;
}

}  // namespace

std::vector<double> read_sample_file(const std::string& path, double power) {
  if (!(power > 0.0)) throw InputError("power transform exponent must be positive");
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  int blank_line = 0;  // line number of the first pending blank line
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t a = line.find_first_not_of(" \t");
    if (a == std::string::npos) {
      if (blank_line == 0) blank_line = lineno;
      continue;
    }
    if (blank_line != 0) {
      throw InputError("parse error at " + path + ":" + std::to_string(blank_line) +
                       ": empty line inside the sample");
    }
    const std::size_t b = line.find_last_not_of(" \t");
    const std::string token = line.substr(a, b - a + 1);
    double value = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      throw InputError("parse error at " + path + ":" + std::to_string(lineno) +
                       ": not a number: '" + token + "'");
    }
    if (!std::isfinite(value) || value <= 0.0) {
      throw InputError("parse error at " + path + ":" + std::to_string(lineno) +
                       ": values must be positive and finite");
    }
    out.push_back(power == 1.0 ? value : std::pow(value, power));
  }
  if (out.empty()) {
    throw InputError("parse error at " + path + ":1: file holds no values");
  }
  return out;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Bayesian quantile-ratio estimation of distributional treatment effects"};
  app.require_subcommand(1);

  FitFlags fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "sample the posterior and write a draws archive");
  fit_cmd->add_option("--y1", fit.y1_path, "treated-sample CSV (one value per line)")->required();
  fit_cmd->add_option("--y2", fit.y2_path, "control-sample CSV (one value per line)")->required();
  fit_cmd->add_option("--f1", fit.f1_family, "density family for sample 1");
  fit_cmd->add_option("--mixture-size", fit.mixture_size, "gamma mixture components (gsm only)");
  fit_cmd->add_option("--link", fit.link_name, "quantile-ratio link: identity or log");
  fit_cmd->add_option("--basis", fit.basis_family, "smoother basis family");
  fit_cmd->add_option("--df", fit.df_token, "degrees of freedom, or 'auto'");
  fit_cmd->add_option("--df-max", fit.df_max, "largest df candidate for auto selection");
  fit_cmd->add_option("--iters", fit.iters, "post burn-in iterations");
  fit_cmd->add_option("--burnin", fit.burnin, "burn-in iterations");
  fit_cmd->add_option("--thin", fit.thin, "retain every thin-th draw");
  fit_cmd->add_option("--proposal-df", fit.proposal_df, "t degrees of freedom of the proposal");
  fit_cmd->add_option("--seed", fit.seed, "RNG seed");
  fit_cmd->add_option("--beta-var", fit.beta_var, "prior variance of each beta coordinate");
  fit_cmd->add_option("--power-transform", fit.power, "exponent applied to inputs on ingest");
  fit_cmd->add_option("--out", fit.out_path, "archive output path");

  ReportFlags report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "evaluate a functional from a draws archive");
  report_cmd->add_option("--archive", report.archive_path, "draws archive path")->required();
  report_cmd->add_option("--functional", report.functional_token,
                         "qte | ate | moment:r | variance | sd | tailweight | ir:p");
  report_cmd->add_option("--grid", report.grid_size, "grid size for qte/tailweight");
  report_cmd->add_option("--format", report.format, "csv or json");
  report_cmd->add_option("--out", report.out_path, "output path (stdout when omitted)");

  SelectFlags select;
  CLI::App* select_cmd =
      app.add_subcommand("select-df", "score candidate degrees of freedom by L1 discrepancy");
  select_cmd->add_option("--y1", select.y1_path, "treated-sample CSV")->required();
  select_cmd->add_option("--y2", select.y2_path, "control-sample CSV")->required();
  select_cmd->add_option("--f1", select.f1_family, "density family for sample 1");
  select_cmd->add_option("--mixture-size", select.mixture_size, "gamma mixture components");
  select_cmd->add_option("--link", select.link_name, "identity or log");
  select_cmd->add_option("--basis", select.basis_family, "smoother basis family");
  select_cmd->add_option("--df-max", select.df_max, "largest candidate df");
  select_cmd->add_option("--power-transform", select.power, "exponent applied on ingest");
  select_cmd->add_option("--out", select.out_path, "output path (stdout when omitted)");

  SimulateFlags simulate;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "run a replication study on a bundled scenario");
  simulate_cmd->add_option("--scenario", simulate.scenario, "scenario id A..E")->required();
  simulate_cmd->add_option("--replicates", simulate.replicates, "number of replicate datasets");
  simulate_cmd->add_option("--estimators", simulate.estimators,
                           "comma-separated: baseline,gqte-lognormal,gqte-gamma,oracle");
  simulate_cmd->add_option("--seed", simulate.seed, "master seed");
  simulate_cmd->add_option("--iters", simulate.iters, "post burn-in iterations per fit");
  simulate_cmd->add_option("--burnin", simulate.burnin, "burn-in iterations per fit");
  simulate_cmd->add_option("--thin", simulate.thin, "retain every thin-th draw");
  simulate_cmd->add_option("--df", simulate.df_token, "degrees of freedom, or 'auto'");
  simulate_cmd->add_option("--df-max", simulate.df_max, "largest df candidate");
  simulate_cmd->add_option("--out", simulate.out_path, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit);
    if (report_cmd->parsed()) return run_report(report);
    if (select_cmd->parsed()) return run_select_df(select);
    if (simulate_cmd->parsed()) return run_simulate(simulate);
    std::cerr << "error: no subcommand given\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SelectionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const SingularityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace gqte
