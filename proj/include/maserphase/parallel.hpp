#pragma once

#include <cstdint>
#include <exception>
#include <functional>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace maser {

// jobs <= 1 runs the plain serial loop; this path is the reference the
// parallel one is tested against (sweep outputs must be byte-identical).
// jobs == 0 means "use all hardware threads".
template <class Fn>
void parallel_for(std::int64_t n, int jobs, Fn&& fn) {
  if (n <= 0) return;
#if defined(_OPENMP)
  if (jobs != 1) {
    std::exception_ptr err;
    int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#else
  (void)jobs;
#endif
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

inline int hardware_jobs() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace maser
