#include "gqte/parallel.hpp"

#include <cstdlib>

namespace gqte {

int max_threads() {
  int hw = 1;
#ifdef _OPENMP
  hw = omp_get_max_threads();
#endif
  if (const char* env = std::getenv("GQTE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return hw;
}

}  // namespace gqte
