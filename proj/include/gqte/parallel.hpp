#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gqte {

// Worker cap: GQTE_THREADS when set to a positive integer, otherwise the
// OpenMP default (1 in a non-OpenMP build). Read on every call so tests can
// flip the environment.
int max_threads();

// Runs fn(i) for i in [0, n). Iterations must be independent. Exceptions are
// captured and the one thrown by the smallest index is rethrown after all
// workers join, so failure reporting does not depend on scheduling.
//
// Reductions are deliberately NOT offered here: callers store per-index
// results and sum them in index order, which keeps results bit-identical for
// any thread count.
template <class Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
#ifdef _OPENMP
  const int workers = max_threads();
  if (n > 1 && workers > 1) {
    std::exception_ptr error = nullptr;
    std::ptrdiff_t error_index = n;
    std::mutex guard;
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(guard);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
}

}  // namespace gqte
