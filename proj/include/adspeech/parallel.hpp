#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adspeech {

// Runs f(i) for i in [0, n). The parallel path is OpenMP, the serial path is
// the reference the tests compare against; call sites write results into
// per-index slots so both paths produce identical output. Bodies must not
// throw (capture errors into slots instead).
template <class F>
void for_index(std::size_t n, bool parallel, F&& f) {
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      f(static_cast<std::size_t>(i));
    }
    return;
  }
#else
  (void)parallel;
#endif
  for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace adspeech
