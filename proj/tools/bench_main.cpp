// Times the OpenMP likelihood kernels against their serial reference
// implementations on a synthetic log-normal configuration. On a single-core
// host the interesting number is the overhead, not the speedup.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "gqte/model.hpp"
#include "gqte/normal.hpp"
#include "gqte/parallel.hpp"
#include "gqte/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct BenchCase {
  gqte::ModelSpec spec;
  gqte::TwoSampleData data;
  Eigen::VectorXd beta;
};

BenchCase make_case(int n1, int n2) {
  using namespace gqte;
  RngEngine eng = make_engine(7);
  std::vector<double> y1(static_cast<std::size_t>(n1));
  std::vector<double> y2(static_cast<std::size_t>(n2));
  for (double& v : y1) v = std::exp(7.5 + 1.75 * normal_quantile(runif01(eng)));
  for (double& v : y2) v = std::exp(7.0 + 1.5 * normal_quantile(runif01(eng)));
  BenchCase out{ModelSpec(CaseDensity::log_normal(7.5, 1.75), LinkFunction::log(),
                          SmootherBasis::make(SmootherBasis::Family::NormalQuantile, 1)),
                TwoSampleData(std::move(y1), std::move(y2)), Eigen::VectorXd(2)};
  out.beta << 0.5, 0.25;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  int n1 = 1000, n2 = 10000, reps = 20;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> int {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "error: %s needs a value\n", arg.c_str());
        std::exit(2);
      }
      return std::atoi(argv[++i]);
    };
    if (arg == "--n1") {
      n1 = next();
    } else if (arg == "--n2") {
      n2 = next();
    } else if (arg == "--reps") {
      reps = next();
    } else {
      std::fprintf(stderr, "usage: gqte_bench [--n1 N] [--n2 N] [--reps R]\n");
      return 2;
    }
  }
  if (n1 < 2 || n2 < 2 || reps < 1) {
    std::fprintf(stderr, "error: sizes must be >= 2 and reps >= 1\n");
    return 2;
  }

  const BenchCase bc = make_case(n1, n2);
  std::printf("workers: %d (GQTE_THREADS caps them)\n", gqte::max_threads());
  std::printf("samples: n1=%d n2=%d, %d repetitions per kernel\n\n", n1, n2, reps);

  double parallel_ms = 0.0, serial_ms = 0.0;
  double sink = 0.0;  // keep the optimizer honest
  for (int r = 0; r < reps; ++r) {
    auto t0 = Clock::now();
    sink += gqte::log_likelihood(bc.spec, bc.beta, bc.data);
    parallel_ms += ms_since(t0);

    t0 = Clock::now();
    sink += gqte::log_likelihood_serial(bc.spec, bc.beta, bc.data);
    serial_ms += ms_since(t0);
  }
  std::printf("log_likelihood          %10.3f ms/rep (parallel)\n", parallel_ms / reps);
  std::printf("log_likelihood_serial   %10.3f ms/rep (reference)\n", serial_ms / reps);
  std::printf("speedup                 %10.2fx\n\n", serial_ms / parallel_ms);

  double psolve_ms = 0.0, ssolve_ms = 0.0;
  for (int r = 0; r < reps; ++r) {
    auto t0 = Clock::now();
    sink += gqte::solve_percentiles(bc.spec, bc.beta, bc.data.y2).back();
    psolve_ms += ms_since(t0);

    t0 = Clock::now();
    sink += gqte::solve_percentiles_serial(bc.spec, bc.beta, bc.data.y2).back();
    ssolve_ms += ms_since(t0);
  }
  std::printf("solve_percentiles        %10.3f ms/rep (parallel)\n", psolve_ms / reps);
  std::printf("solve_percentiles_serial %10.3f ms/rep (reference)\n", ssolve_ms / reps);
  std::printf("speedup                  %10.2fx\n", ssolve_ms / psolve_ms);

  if (sink == 42.0) std::printf("\n");  // defeat dead-code elimination
  return 0;
}
